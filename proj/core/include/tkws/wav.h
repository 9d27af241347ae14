// tkws/wav.h
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tkws::frontend {

inline constexpr int kSampleRate = 16000;
inline constexpr int kClipSamples = 16000;  // every clip is exactly 1 s

// Mono audio, samples scaled to [-1, 1).
struct AudioClip {
  std::vector<double> samples;
};

// Raw PCM16 mono WAV reader. Rejects anything that is not 16-bit mono at
// 16 kHz with a FormatError naming the offending field.
std::vector<std::int16_t> read_wav(const std::string& path);

void write_wav(const std::string& path,
               const std::vector<std::int16_t>& samples,
               int sample_rate = kSampleRate);

// Loads a clip and forces it to exactly 16000 samples: shorter clips are
// zero-padded at the end, longer ones keep their center 16000 samples.
AudioClip load_clip(const std::string& path);

// The same length rule applied to raw samples; exposed for tests.
std::vector<std::int16_t> fit_to_clip(std::vector<std::int16_t> samples);

}  // namespace tkws::frontend
