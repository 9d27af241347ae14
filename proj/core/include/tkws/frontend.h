// tkws/frontend.h
#pragma once

#include <vector>

#include "tkws/config.h"
#include "tkws/feature_map.h"
#include "tkws/mat.h"
#include "tkws/wav.h"

namespace tkws::frontend {

// Natural-log floor added to every mel energy before the log.
inline constexpr double kLogEps = 0x1p-20;

// Channel order in the BooleanFeatureMap.
inline constexpr int kChannelMfsc = 0;
inline constexpr int kChannelFlux = 1;
inline constexpr int kNumChannels = 2;

struct FrameConfig {
  int frame_len = 512;
  int hop = 256;
  int fft = 512;
  int mel_bins = 32;
  double fmin_hz = 60.0;
  double fmax_hz = 7600.0;

  // Throws ConfigError unless frame_len <= fft, hop >= 1, mel_bins >= 2 and
  // 0 <= fmin < fmax <= sample_rate / 2.
  void validate() const;

  int frame_count(int n_samples = kClipSamples) const {
    return (n_samples - frame_len) / hop + 1;
  }

  static FrameConfig from(const Config& cfg);
};

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular filters, unit peak, 50% overlap: filter f rises over mel points
// [m_f, m_{f+1}] and falls over [m_{f+1}, m_{f+2}], where the F + 2 points
// are uniform on the mel scale between fmin and fmax. Returned matrix is
// mel_bins rows x (fft/2 + 1) DFT-bin columns.
Mat mel_filterbank(const FrameConfig& cfg);

// Peak frequency of mel bin j, in Hz.
double mel_center_hz(const FrameConfig& cfg, int bin);

// Log-mel energies, mel_bins rows x frame_count columns. Frame t covers
// samples [t*hop, t*hop + frame_len), Hann-windowed, zero-padded to fft.
// Entry (f, t) = log(kLogEps + sum_k weight[f][k] * |DFT[k]|^2).
Mat mfsc(const AudioClip& clip, const FrameConfig& cfg);

// Per-bin half-wave-rectified first difference along time. Column 0 is all
// zeros; same shape as the input.
Mat spectral_flux(const Mat& mel);

// Streaming binarization threshold, one value per bin.
struct ThresholdState {
  std::vector<double> theta;
  double alpha = 0.0625;
};

// theta' = (1 - alpha) * theta + alpha * frame, elementwise.
void update_threshold(ThresholdState& state, const double* frame,
                      std::size_t n);

// Walks frames in time order; bit = 1 iff value >= theta where theta is read
// before that frame's update. Channel 0 thresholds mel, channel 1 flux.
BooleanFeatureMap binarize(const Mat& mel, const Mat& flux,
                           ThresholdState init_mel, ThresholdState init_flux);

// Same, with each channel's theta initialized to its first frame.
BooleanFeatureMap binarize(const Mat& mel, const Mat& flux, double alpha);

// Full frontend: mfsc + flux + binarize with first-frame threshold init.
BooleanFeatureMap extract_features(const AudioClip& clip,
                                   const FrameConfig& cfg, double alpha);

}  // namespace tkws::frontend
