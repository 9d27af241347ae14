// frontend.cc
#include "tkws/frontend.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>

#include "tkws/error.h"

namespace tkws::frontend {
namespace {

// FFTW plan creation is not thread-safe; executing a plan on private buffers
// is. Plans are cached per FFT size and created with FFTW_UNALIGNED so any
// caller-owned buffer works. FFTW_ESTIMATE keeps planning deterministic.
fftw_plan plan_for(int fft_size) {
  static std::mutex mu;
  static std::map<int, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(fft_size);
  if (it != cache.end()) return it->second;
  std::vector<double> in(static_cast<std::size_t>(fft_size));
  std::vector<std::complex<double>> out(
      static_cast<std::size_t>(fft_size / 2 + 1));
  fftw_plan p = fftw_plan_dft_r2c_1d(
      fft_size, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
      FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!p) throw Error("fftw plan creation failed");
  cache.emplace(fft_size, p);
  return p;
}

std::vector<double> mel_points(const FrameConfig& cfg) {
  const double lo = hz_to_mel(cfg.fmin_hz);
  const double hi = hz_to_mel(cfg.fmax_hz);
  std::vector<double> m(static_cast<std::size_t>(cfg.mel_bins) + 2);
  for (std::size_t j = 0; j < m.size(); ++j)
    m[j] = lo + (hi - lo) * static_cast<double>(j) /
                    static_cast<double>(cfg.mel_bins + 1);
  return m;
}

}  // namespace

void FrameConfig::validate() const {
  if (frame_len <= 0 || frame_len > fft)
    throw ConfigError(cat("frame_len ", frame_len,
                          " must be in [1, fft=", fft, "]"));
  if (hop < 1) throw ConfigError(cat("hop ", hop, " must be >= 1"));
  if (mel_bins < 2)
    throw ConfigError(cat("mel_bins ", mel_bins, " must be >= 2"));
  if (!(fmin_hz >= 0.0 && fmin_hz < fmax_hz &&
        fmax_hz <= kSampleRate / 2.0))
    throw ConfigError(cat("mel range [", fmin_hz, ", ", fmax_hz,
                          "] must satisfy 0 <= fmin < fmax <= ",
                          kSampleRate / 2));
  if (frame_len > kClipSamples)
    throw ConfigError(cat("frame_len ", frame_len, " exceeds clip length"));
}

FrameConfig FrameConfig::from(const Config& cfg) {
  FrameConfig fc;
  fc.frame_len = static_cast<int>(cfg.get_int("frontend.frame_len"));
  fc.hop = static_cast<int>(cfg.get_int("frontend.hop"));
  fc.fft = static_cast<int>(cfg.get_int("frontend.fft"));
  fc.mel_bins = static_cast<int>(cfg.get_int("frontend.mel_bins"));
  fc.fmin_hz = cfg.get_double("frontend.fmin_hz");
  fc.fmax_hz = cfg.get_double("frontend.fmax_hz");
  fc.validate();
  return fc;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

Mat mel_filterbank(const FrameConfig& cfg) {
  const std::vector<double> m = mel_points(cfg);
  const int n_bins = cfg.fft / 2 + 1;
  Mat w(static_cast<std::size_t>(cfg.mel_bins),
        static_cast<std::size_t>(n_bins));
  for (int k = 0; k < n_bins; ++k) {
    const double freq =
        static_cast<double>(k) * kSampleRate / static_cast<double>(cfg.fft);
    const double mk = hz_to_mel(freq);
    for (int f = 0; f < cfg.mel_bins; ++f) {
      const double rise = (mk - m[f]) / (m[f + 1] - m[f]);
      const double fall = (m[f + 2] - mk) / (m[f + 2] - m[f + 1]);
      w.at(static_cast<std::size_t>(f), static_cast<std::size_t>(k)) =
          std::max(0.0, std::min(rise, fall));
    }
  }
  return w;
}

double mel_center_hz(const FrameConfig& cfg, int bin) {
  return mel_to_hz(mel_points(cfg)[static_cast<std::size_t>(bin) + 1]);
}

Mat mfsc(const AudioClip& clip, const FrameConfig& cfg) {
  cfg.validate();
  const int n_frames = cfg.frame_count(static_cast<int>(clip.samples.size()));
  const int n_bins = cfg.fft / 2 + 1;
  const Mat fb = mel_filterbank(cfg);

  std::vector<double> hann(static_cast<std::size_t>(cfg.frame_len));
  for (int i = 0; i < cfg.frame_len; ++i)
    hann[static_cast<std::size_t>(i)] =
        0.5 * (1.0 - std::cos(2.0 * M_PI * i / cfg.frame_len));

  const fftw_plan plan = plan_for(cfg.fft);
  std::vector<double> in(static_cast<std::size_t>(cfg.fft));
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n_bins));

  Mat mel(static_cast<std::size_t>(cfg.mel_bins),
          static_cast<std::size_t>(n_frames));
  std::vector<double> power(static_cast<std::size_t>(n_bins));
  for (int t = 0; t < n_frames; ++t) {
    std::fill(in.begin(), in.end(), 0.0);
    const std::size_t base = static_cast<std::size_t>(t) *
                             static_cast<std::size_t>(cfg.hop);
    for (int i = 0; i < cfg.frame_len; ++i)
      in[static_cast<std::size_t>(i)] =
          clip.samples[base + static_cast<std::size_t>(i)] *
          hann[static_cast<std::size_t>(i)];
    fftw_execute_dft_r2c(plan, in.data(),
                         reinterpret_cast<fftw_complex*>(out.data()));
    for (int k = 0; k < n_bins; ++k)
      power[static_cast<std::size_t>(k)] = std::norm(out[static_cast<std::size_t>(k)]);
    for (int f = 0; f < cfg.mel_bins; ++f) {
      double e = 0.0;
      const double* wrow = fb.row(static_cast<std::size_t>(f));
      for (int k = 0; k < n_bins; ++k)
        e += wrow[k] * power[static_cast<std::size_t>(k)];
      mel.at(static_cast<std::size_t>(f), static_cast<std::size_t>(t)) =
          std::log(kLogEps + e);
    }
  }
  return mel;
}

Mat spectral_flux(const Mat& mel) {
  Mat sf(mel.rows(), mel.cols());
  for (std::size_t f = 0; f < mel.rows(); ++f) {
    for (std::size_t t = 1; t < mel.cols(); ++t)
      sf.at(f, t) = std::max(0.0, mel.at(f, t) - mel.at(f, t - 1));
  }
  return sf;
}

void update_threshold(ThresholdState& state, const double* frame,
                      std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    state.theta[i] = (1.0 - state.alpha) * state.theta[i] +
                     state.alpha * frame[i];
}

BooleanFeatureMap binarize(const Mat& mel, const Mat& flux,
                           ThresholdState init_mel,
                           ThresholdState init_flux) {
  const int f_bins = static_cast<int>(mel.rows());
  const int n_frames = static_cast<int>(mel.cols());
  BooleanFeatureMap map(kNumChannels, f_bins, n_frames);
  std::vector<double> col(static_cast<std::size_t>(f_bins));
  ThresholdState* states[kNumChannels] = {&init_mel, &init_flux};
  const Mat* chans[kNumChannels] = {&mel, &flux};
  for (int t = 0; t < n_frames; ++t) {
    for (int c = 0; c < kNumChannels; ++c) {
      ThresholdState& st = *states[c];
      const Mat& values = *chans[c];
      for (int f = 0; f < f_bins; ++f) {
        const double v = values.at(static_cast<std::size_t>(f),
                                   static_cast<std::size_t>(t));
        col[static_cast<std::size_t>(f)] = v;
        if (v >= st.theta[static_cast<std::size_t>(f)])
          map.set_bit(c, f, t);
      }
      update_threshold(st, col.data(), col.size());
    }
  }
  return map;
}

BooleanFeatureMap binarize(const Mat& mel, const Mat& flux, double alpha) {
  const std::size_t f_bins = mel.rows();
  ThresholdState tm, tf;
  tm.alpha = tf.alpha = alpha;
  tm.theta.resize(f_bins);
  tf.theta.resize(f_bins);
  for (std::size_t f = 0; f < f_bins; ++f) {
    tm.theta[f] = mel.at(f, 0);
    tf.theta[f] = flux.at(f, 0);
  }
  return binarize(mel, flux, std::move(tm), std::move(tf));
}

BooleanFeatureMap extract_features(const AudioClip& clip,
                                   const FrameConfig& cfg, double alpha) {
  const Mat mel = mfsc(clip, cfg);
  const Mat flux = spectral_flux(mel);
  return binarize(mel, flux, alpha);
}

}  // namespace tkws::frontend
