// src/gsc.cc
#include "tkws/gsc.h"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "tkws/binio.h"
#include "tkws/error.h"
#include "tkws/feature_map.h"
#include "tkws/hash.h"
#include "tkws/rng.h"

namespace fs = std::filesystem;

namespace tkws::gsc {

const std::array<std::string, 10>& keywords() {
  static const std::array<std::string, 10> words = {
      "yes", "no", "up", "down", "left", "right", "on", "off", "stop", "go"};
  return words;
}

int word_label(const std::string& word) {
  const auto& words = keywords();
  for (std::size_t i = 0; i < words.size(); ++i)
    if (words[i] == word) return static_cast<int>(i);
  return kUnknownClass;
}

const std::string& class_name(int label) {
  static const std::string unknown = "unknown";
  static const std::string silence = "silence";
  if (label == kUnknownClass) return unknown;
  if (label == kSilenceClass) return silence;
  if (label < 0 || label >= kClasses)
    throw Error(cat("class label ", label, " out of range"));
  return keywords()[static_cast<std::size_t>(label)];
}

const char* split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  throw Error("bad split");
}

std::size_t Manifest::count(int label, Split split) const {
  std::size_t n = 0;
  for (const ManifestEntry& e : entries)
    n += e.label == label && e.split == split;
  return n;
}

namespace {

struct PathSpec {
  std::string rel;
  bool cropped = false;
  std::uint64_t offset = 0;
};

PathSpec parse_spec(const std::string& spec) {
  PathSpec p;
  const std::size_t at = spec.rfind('@');
  if (at == std::string::npos) {
    p.rel = spec;
    return p;
  }
  const std::string tail = spec.substr(at + 1);
  if (tail.empty() ||
      tail.find_first_not_of("0123456789") != std::string::npos)
    throw FormatError(cat("bad crop offset in clip path: ", spec));
  p.rel = spec.substr(0, at);
  p.cropped = true;
  p.offset = std::stoull(tail);
  return p;
}

std::string trimmed(const std::string& s) {
  const std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::set<std::string> read_list(const std::string& root, const char* name) {
  if (!fs::is_regular_file(root + "/" + name))
    throw DatasetError(cat("split list missing: ", root, "/", name));
  std::ifstream is = open_input(root + "/" + name, std::ios::in);
  std::set<std::string> out;
  std::string line;
  while (std::getline(is, line)) {
    const std::string t = trimmed(line);
    if (!t.empty()) out.insert(t);
  }
  return out;
}

std::vector<std::string> sorted_dir(const std::string& dir,
                                    bool dirs_only) {
  std::vector<std::string> names;
  for (const fs::directory_entry& e : fs::directory_iterator(dir)) {
    if (dirs_only ? e.is_directory()
                  : (e.is_regular_file() &&
                     e.path().extension() == ".wav"))
      names.push_back(e.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

constexpr std::size_t kSplits = 3;

}  // namespace

Manifest build_manifest(const std::string& root, std::uint64_t seed) {
  if (!fs::is_directory(root))
    throw DatasetError(cat("dataset root is not a directory: ", root));
  const std::set<std::string> val_list = read_list(root, "validation_list.txt");
  const std::set<std::string> test_list = read_list(root, "testing_list.txt");
  for (const std::string& p : val_list)
    if (test_list.count(p))
      throw FormatError(cat("clip in both validation and testing lists: ", p));

  Manifest m;
  m.seed = seed;
  std::array<std::size_t, kSplits> keyword_count{};
  std::array<std::vector<std::size_t>, kSplits> unknown_at;
  std::set<std::string> matched;

  for (const std::string& dir : sorted_dir(root, true)) {
    if (dir == kNoiseDir) continue;
    const int label = word_label(dir);
    for (const std::string& file : sorted_dir(root + "/" + dir, false)) {
      const std::string rel = dir + "/" + file;
      Split split = Split::kTrain;
      if (val_list.count(rel)) {
        split = Split::kVal;
        matched.insert(rel);
      } else if (test_list.count(rel)) {
        split = Split::kTest;
        matched.insert(rel);
      }
      m.entries.push_back({rel, label, split});
      const auto s = static_cast<std::size_t>(split);
      if (label == kUnknownClass)
        unknown_at[s].push_back(m.entries.size() - 1);
      else
        ++keyword_count[s];
    }
  }
  for (const auto* list : {&val_list, &test_list})
    for (const std::string& p : *list)
      if (!matched.count(p))
        throw FormatError(cat("split list names a missing clip: ", p));

  // Per split: unknowns downsample to the rounded mean keyword class count,
  // and the same number of noise crops becomes the silence class.
  std::array<std::size_t, kSplits> target{};
  for (std::size_t s = 0; s < kSplits; ++s)
    target[s] = (keyword_count[s] + keywords().size() / 2) / keywords().size();

  std::vector<char> keep(m.entries.size(), 1);
  for (std::size_t s = 0; s < kSplits; ++s) {
    if (unknown_at[s].size() <= target[s]) continue;
    std::vector<std::size_t> pick = unknown_at[s];
    Rng rng(Rng::mix(seed, 100 + s));
    rng.shuffle(pick);
    for (std::size_t i : unknown_at[s]) keep[i] = 0;
    for (std::size_t i = 0; i < target[s]; ++i) keep[pick[i]] = 1;
  }
  {
    std::vector<ManifestEntry> kept;
    kept.reserve(m.entries.size());
    for (std::size_t i = 0; i < m.entries.size(); ++i)
      if (keep[i]) kept.push_back(std::move(m.entries[i]));
    m.entries = std::move(kept);
  }

  const std::size_t silence_total = target[0] + target[1] + target[2];
  if (silence_total > 0) {
    const std::string noise_root = root + "/" + kNoiseDir;
    std::vector<std::string> noise;
    if (fs::is_directory(noise_root)) noise = sorted_dir(noise_root, false);
    if (noise.empty())
      throw DatasetError(cat("no background noise files under ", noise_root));
    std::vector<std::uint64_t> lengths(noise.size());
    for (std::size_t i = 0; i < noise.size(); ++i)
      lengths[i] =
          frontend::read_wav(noise_root + "/" + noise[i]).size();
    for (std::size_t s = 0; s < kSplits; ++s) {
      Rng rng(Rng::mix(seed, 200 + s));
      for (std::size_t i = 0; i < target[s]; ++i) {
        const std::size_t f = static_cast<std::size_t>(
            rng.below(static_cast<std::uint64_t>(noise.size())));
        const std::uint64_t len = lengths[f];
        const std::uint64_t max_off =
            len > frontend::kClipSamples ? len - frontend::kClipSamples : 0;
        const std::uint64_t off = max_off ? rng.below(max_off + 1) : 0;
        m.entries.push_back({cat(kNoiseDir, "/", noise[f], "@", off),
                             kSilenceClass, static_cast<Split>(s)});
      }
    }
  }

  for (std::size_t s = 0; s < kSplits; ++s)
    for (int label = 0; label < kClasses; ++label)
      if (m.count(label, static_cast<Split>(s)) == 0)
        throw DatasetError(cat("class \"", class_name(label),
                               "\" is empty in the ",
                               split_name(static_cast<Split>(s)), " split"));
  return m;
}

void write_manifest(std::ostream& os, const Manifest& m) {
  os << "# version " << m.version << "\n";
  os << "# seed " << m.seed << "\n";
  os << "path,label,split\n";
  for (const ManifestEntry& e : m.entries) {
    if (e.path.empty() || e.path.find(',') != std::string::npos)
      throw FormatError(cat("clip path unusable in a manifest: \"", e.path,
                            "\""));
    os << e.path << ',' << e.label << ',' << split_name(e.split) << "\n";
  }
}

Manifest read_manifest(std::istream& is) {
  Manifest m;
  m.version = -1;
  bool saw_header = false;
  bool saw_seed = false;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = trimmed(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      std::istringstream ls(t.substr(1));
      std::string key;
      ls >> key;
      if (key == "version") {
        if (!(ls >> m.version))
          throw FormatError(cat("manifest line ", line_no, ": bad version"));
      } else if (key == "seed") {
        if (!(ls >> m.seed))
          throw FormatError(cat("manifest line ", line_no, ": bad seed"));
        saw_seed = true;
      }
      continue;
    }
    if (!saw_header) {
      if (t != "path,label,split")
        throw FormatError(cat("manifest line ", line_no,
                              ": expected header row, got \"", t, "\""));
      saw_header = true;
      continue;
    }
    const std::size_t c1 = t.find(',');
    const std::size_t c2 = c1 == std::string::npos
                               ? std::string::npos
                               : t.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos ||
        t.find(',', c2 + 1) != std::string::npos)
      throw FormatError(cat("manifest line ", line_no,
                            ": want path,label,split"));
    ManifestEntry e;
    e.path = t.substr(0, c1);
    const std::string label_s = t.substr(c1 + 1, c2 - c1 - 1);
    const std::string split_s = t.substr(c2 + 1);
    try {
      std::size_t used = 0;
      e.label = std::stoi(label_s, &used);
      if (used != label_s.size()) throw std::invalid_argument(label_s);
    } catch (const std::exception&) {
      throw FormatError(cat("manifest line ", line_no, ": bad label \"",
                            label_s, "\""));
    }
    if (e.label < 0 || e.label >= kClasses)
      throw FormatError(cat("manifest line ", line_no, ": label ", e.label,
                            " out of range"));
    if (split_s == "train") e.split = Split::kTrain;
    else if (split_s == "val") e.split = Split::kVal;
    else if (split_s == "test") e.split = Split::kTest;
    else
      throw FormatError(cat("manifest line ", line_no, ": bad split \"",
                            split_s, "\""));
    if (e.path.empty())
      throw FormatError(cat("manifest line ", line_no, ": empty path"));
    m.entries.push_back(std::move(e));
  }
  if (!saw_header) throw FormatError("manifest has no header row");
  if (m.version != kDatasetVersion)
    throw FormatError(cat("manifest version ", m.version, ", want ",
                          kDatasetVersion));
  if (!saw_seed) throw FormatError("manifest missing seed line");
  return m;
}

void save_manifest(const std::string& path, const Manifest& m) {
  std::ofstream os = open_output(path, std::ios::out);
  write_manifest(os, m);
  if (!os) throw IoError(cat("write failed: ", path));
}

Manifest load_manifest(const std::string& path) {
  std::ifstream is = open_input(path, std::ios::in);
  return read_manifest(is);
}

frontend::AudioClip load_entry(const std::string& root,
                               const std::string& path_spec) {
  const PathSpec p = parse_spec(path_spec);
  const std::string full = root + "/" + p.rel;
  if (!p.cropped) return frontend::load_clip(full);
  const std::vector<std::int16_t> raw = frontend::read_wav(full);
  if (p.offset >= raw.size())
    throw FormatError(cat("crop offset ", p.offset, " beyond ", raw.size(),
                          " samples: ", path_spec));
  frontend::AudioClip clip;
  clip.samples.assign(frontend::kClipSamples, 0.0);
  const std::size_t n = std::min<std::size_t>(
      frontend::kClipSamples, raw.size() - static_cast<std::size_t>(p.offset));
  for (std::size_t i = 0; i < n; ++i)
    clip.samples[i] =
        raw[static_cast<std::size_t>(p.offset) + i] / 32768.0;
  return clip;
}

namespace {

std::string frontend_fingerprint(const frontend::FrameConfig& fc,
                                 double alpha) {
  return cat(fc.frame_len, ",", fc.hop, ",", fc.fft, ",", fc.mel_bins, ",",
             fc.fmin_hz, ",", fc.fmax_hz, ",", alpha);
}

}  // namespace

std::string cache_name(const std::string& path_spec,
                       const frontend::FrameConfig& fc, double alpha,
                       std::uint64_t content_hash) {
  std::uint64_t h = fnv1a64(frontend_fingerprint(fc, alpha));
  h = fnv1a64(path_spec, h);
  h = fnv1a64(&content_hash, sizeof content_hash, h);
  return hex64(h) + ".feat";
}

CacheSummary cache_features(const Manifest& m, const std::string& root,
                            const std::string& cache_dir,
                            const frontend::FrameConfig& fc, double alpha) {
  fc.validate();
  fs::create_directories(cache_dir);

  // Duplicate path specs would race on one output file; process each once.
  std::vector<const ManifestEntry*> work;
  {
    std::set<std::string> seen;
    for (const ManifestEntry& e : m.entries)
      if (seen.insert(e.path).second) work.push_back(&e);
  }

  CacheSummary sum;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= work.size()) return;
      const ManifestEntry& e = *work[i];
      try {
        const PathSpec p = parse_spec(e.path);
        const std::uint64_t content = fnv1a64_file(root + "/" + p.rel);
        const std::string out =
            cache_dir + "/" + cache_name(e.path, fc, alpha, content);
        if (fs::exists(out)) {
          const std::lock_guard<std::mutex> lock(mu);
          ++sum.skipped;
          continue;
        }
        const frontend::AudioClip clip = load_entry(root, e.path);
        const frontend::BooleanFeatureMap fmap =
            frontend::extract_features(clip, fc, alpha);
        frontend::save_feature_map(out, fmap);
        const std::lock_guard<std::mutex> lock(mu);
        ++sum.written;
      } catch (const std::exception& ex) {
        const std::lock_guard<std::mutex> lock(mu);
        sum.failures.push_back({e.path, ex.what()});
      }
    }
  };
  const unsigned n_threads =
      std::clamp(std::thread::hardware_concurrency(), 1u, 8u);
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  return sum;
}

std::string cached_feature_path(const std::string& root,
                                const std::string& cache_dir,
                                const std::string& path_spec,
                                const frontend::FrameConfig& fc,
                                double alpha) {
  try {
    const PathSpec p = parse_spec(path_spec);
    const std::uint64_t content = fnv1a64_file(root + "/" + p.rel);
    return cache_dir + "/" + cache_name(path_spec, fc, alpha, content);
  } catch (const std::exception&) {
    return "";
  }
}

}  // namespace tkws::gsc
