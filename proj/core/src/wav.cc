// wav.cc
#include "tkws/wav.h"

#include <cstring>

#include "tkws/binio.h"
#include "tkws/error.h"

namespace tkws::frontend {
namespace {

struct ChunkHeader {
  char id[4];
  std::uint32_t size;
};

ChunkHeader read_chunk_header(std::istream& is) {
  ChunkHeader h;
  read_bytes(is, h.id, 4, "chunk id");
  h.size = read_u32(is, "chunk size");
  return h;
}

}  // namespace

std::vector<std::int16_t> read_wav(const std::string& path) {
  std::ifstream is = open_input(path);
  char riff[4];
  read_bytes(is, riff, 4, "RIFF tag");
  if (std::memcmp(riff, "RIFF", 4) != 0)
    throw FormatError(cat(path, ": not a RIFF file"));
  read_u32(is, "RIFF size");
  char wave[4];
  read_bytes(is, wave, 4, "WAVE tag");
  if (std::memcmp(wave, "WAVE", 4) != 0)
    throw FormatError(cat(path, ": not a WAVE file"));

  bool have_fmt = false;
  while (true) {
    ChunkHeader h;
    try {
      h = read_chunk_header(is);
    } catch (const FormatError&) {
      throw FormatError(cat(path, ": no data chunk"));
    }
    if (std::memcmp(h.id, "fmt ", 4) == 0) {
      if (h.size < 16) throw FormatError(cat(path, ": fmt chunk too small"));
      const std::uint16_t audio_format = read_u16(is, "audio format");
      const std::uint16_t channels = read_u16(is, "channel count");
      const std::uint32_t sample_rate = read_u32(is, "sample rate");
      read_u32(is, "byte rate");
      read_u16(is, "block align");
      const std::uint16_t bits = read_u16(is, "bits per sample");
      if (audio_format != 1)
        throw FormatError(cat(path, ": not PCM (format ", audio_format, ")"));
      if (channels != 1)
        throw FormatError(cat(path, ": expected mono, got ", channels,
                              " channels"));
      if (sample_rate != kSampleRate)
        throw FormatError(cat(path, ": expected ", kSampleRate, " Hz, got ",
                              sample_rate));
      if (bits != 16)
        throw FormatError(cat(path, ": expected 16-bit samples, got ", bits));
      is.ignore(h.size - 16);
      have_fmt = true;
    } else if (std::memcmp(h.id, "data", 4) == 0) {
      if (!have_fmt) throw FormatError(cat(path, ": data before fmt"));
      const std::size_t n = h.size / 2;
      std::vector<std::int16_t> out(n);
      for (std::size_t i = 0; i < n; ++i)
        out[i] = static_cast<std::int16_t>(read_u16(is, "sample"));
      return out;
    } else {
      // Unknown chunk (LIST, fact, ...): skip, chunks are word-aligned.
      is.ignore(h.size + (h.size & 1));
      if (!is) throw FormatError(cat(path, ": truncated chunk"));
    }
  }
}

void write_wav(const std::string& path,
               const std::vector<std::int16_t>& samples, int sample_rate) {
  std::ofstream os = open_output(path);
  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(samples.size() * 2);
  write_bytes(os, "RIFF", 4);
  write_u32(os, 36 + data_bytes);
  write_bytes(os, "WAVE", 4);
  write_bytes(os, "fmt ", 4);
  write_u32(os, 16);
  write_u16(os, 1);  // PCM
  write_u16(os, 1);  // mono
  write_u32(os, static_cast<std::uint32_t>(sample_rate));
  write_u32(os, static_cast<std::uint32_t>(sample_rate * 2));  // byte rate
  write_u16(os, 2);   // block align
  write_u16(os, 16);  // bits per sample
  write_bytes(os, "data", 4);
  write_u32(os, data_bytes);
  for (std::int16_t s : samples)
    write_u16(os, static_cast<std::uint16_t>(s));
}

std::vector<std::int16_t> fit_to_clip(std::vector<std::int16_t> samples) {
  if (samples.size() > kClipSamples) {
    const std::size_t start = (samples.size() - kClipSamples) / 2;
    samples =
        std::vector<std::int16_t>(samples.begin() + start,
                                  samples.begin() + start + kClipSamples);
  } else {
    samples.resize(kClipSamples, 0);
  }
  return samples;
}

AudioClip load_clip(const std::string& path) {
  const std::vector<std::int16_t> raw = fit_to_clip(read_wav(path));
  AudioClip clip;
  clip.samples.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i)
    clip.samples[i] = raw[i] / 32768.0;
  return clip;
}

}  // namespace tkws::frontend
