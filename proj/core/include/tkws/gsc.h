// tkws/gsc.h
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "tkws/frontend.h"
#include "tkws/wav.h"

namespace tkws::gsc {

// 12-class task: the ten command words, then "unknown", then "silence".
inline constexpr int kClasses = 12;
inline constexpr int kUnknownClass = 10;
inline constexpr int kSilenceClass = 11;
inline constexpr int kDatasetVersion = 2;
inline constexpr char kNoiseDir[] = "_background_noise_";

const std::array<std::string, 10>& keywords();
// Keyword -> 0..9; anything else -> the unknown class.
int word_label(const std::string& word);
const std::string& class_name(int label);

enum class Split { kTrain = 0, kVal = 1, kTest = 2 };
const char* split_name(Split s);

// Clip paths are relative to the dataset root, e.g. "yes/abc_nohash_0.wav".
// Silence entries reference a crop of a noise file as "path@sample_offset".
struct ManifestEntry {
  std::string path;
  int label = 0;
  Split split = Split::kTrain;
  bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
  int version = kDatasetVersion;
  std::uint64_t seed = 0;
  std::vector<ManifestEntry> entries;

  std::size_t count(int label, Split split) const;
  bool operator==(const Manifest&) const = default;
};

// Scans an extracted dataset directory. Splits follow validation_list.txt
// and testing_list.txt; remaining clips train. Words outside the ten
// keywords are "unknown", downsampled per split to the rounded mean keyword
// class count of that split; the same count of 1 s noise crops per split
// becomes "silence". Deterministic given the seed. Throws on missing list
// files, list lines without a clip, clips in two splits, or any class left
// empty in any split.
Manifest build_manifest(const std::string& root, std::uint64_t seed);

// CSV: "# version"/"# seed" header lines, a "path,label,split" header row,
// then one row per entry. Reading validates labels, split names and the
// version.
void write_manifest(std::ostream& os, const Manifest& m);
Manifest read_manifest(std::istream& is);
void save_manifest(const std::string& path, const Manifest& m);
Manifest load_manifest(const std::string& path);

// Loads one manifest clip as 16000 samples in [-1, 1). Plain paths follow
// the center-crop/zero-pad clip rule; "@offset" crops at that sample.
frontend::AudioClip load_entry(const std::string& root,
                               const std::string& path_spec);

// Cache file name: fnv1a over the frontend fingerprint, the path spec and
// the clip bytes, so a config change or an edited wav recomputes while
// untouched entries are skipped.
std::string cache_name(const std::string& path_spec,
                       const frontend::FrameConfig& fc, double alpha,
                       std::uint64_t content_hash);

struct CacheSummary {
  int written = 0;
  int skipped = 0;
  std::vector<std::pair<std::string, std::string>> failures;  // path, error
};

// One feature file per entry under cache_dir (created if needed). Failures
// are collected per clip, never fatal. Parallel across clips; outputs are
// byte-identical regardless of thread schedule.
CacheSummary cache_features(const Manifest& m, const std::string& root,
                            const std::string& cache_dir,
                            const frontend::FrameConfig& fc, double alpha);

// Cache path for one entry, or empty string when the clip is unreadable.
std::string cached_feature_path(const std::string& root,
                                const std::string& cache_dir,
                                const std::string& path_spec,
                                const frontend::FrameConfig& fc, double alpha);

}  // namespace tkws::gsc
