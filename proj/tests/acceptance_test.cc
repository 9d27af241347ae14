// tests/acceptance_test.cc
//
// Gates of record for this repository. Each criterion prints exactly one
// line: "criterion N: PASS|FAIL  <evidence>". The process exit code is the
// number of failed criteria, so ctest fails iff any gate fails.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "support/fixtures.h"
#include "support/gsc_corpus.h"
#include "tkws/accel.h"
#include "tkws/ctm_eval.h"
#include "tkws/ctm_model.h"
#include "tkws/ctm_train.h"
#include "tkws/frontend.h"
#include "tkws/gsc.h"
#include "tkws/hash.h"
#include "tkws/mat.h"
#include "tkws/ogbcsr.h"
#include "tkws/rng.h"
#include "tkws/sched.h"

using namespace tkws;
using namespace tkws::testsupport;

namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string note;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fresh_dir(const std::string& name) {
  const std::string dir =
      (fs::temp_directory_path() / ("tkws_acc_" + name)).string();
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ctm::ModelShape random_shape(Rng& rng) {
  ctm::ModelShape sh;
  sh.channels = 1 + static_cast<int>(rng.below(2));
  sh.bins = 3 + static_cast<int>(rng.below(4));
  sh.frames = 5 + static_cast<int>(rng.below(5));
  sh.window = 1 + static_cast<int>(rng.below(3));
  sh.classes = 2 + static_cast<int>(rng.below(3));
  sh.clauses_per_class = 2 * (1 + static_cast<int>(rng.below(3)));
  sh.threshold = 2 + static_cast<int>(rng.below(30));
  sh.position_literals = rng.below(5) == 0;
  return sh;
}

// Desk-scale setup shared by several criteria: a synthetic corpus in the
// dataset layout, cached default-frontend features, and a model trained on
// the train split for a few epochs.
struct Desk {
  std::string root;
  std::string cache;
  gsc::Manifest manifest;
  frontend::FrameConfig fc;
  double alpha = 0.0625;
  ctm::Model model;
  std::vector<ctm::LabeledMap> train_set;

  frontend::BooleanFeatureMap cached_map(const std::string& path_spec) const {
    return frontend::load_feature_map(
        gsc::cached_feature_path(root, cache, path_spec, fc, alpha));
  }
};

const Desk& desk() {
  static const Desk d = [] {
    Desk v;
    v.root = fresh_dir("desk_data");
    CorpusSpec spec;
    spec.clips_per_keyword = 10;
    make_gsc_corpus(v.root, 4242, spec);
    v.cache = fresh_dir("desk_cache");
    v.manifest = gsc::build_manifest(v.root, 7);
    const gsc::CacheSummary sum =
        gsc::cache_features(v.manifest, v.root, v.cache, v.fc, v.alpha);
    if (!sum.failures.empty()) throw Error("desk corpus failed to featurize");

    ctm::ModelShape sh;
    sh.clauses_per_class = 16;
    std::vector<ctm::LabeledMap> val;
    for (const gsc::ManifestEntry& e : v.manifest.entries) {
      if (e.split == gsc::Split::kTrain)
        v.train_set.push_back({v.cached_map(e.path), e.label});
      else if (e.split == gsc::Split::kVal)
        val.push_back({v.cached_map(e.path), e.label});
    }
    v.model = ctm::Model(sh);
    Rng rng(8);
    ctm::train(v.model, v.train_set, val, 3, rng);
    return v;
  }();
  return d;
}

// ---------------------------------------------------------------------------
// 1: simulated class sums equal the dense reference exactly.

Outcome c1_oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1001);
  const std::uint32_t block_sizes[] = {1, 3, 8, 16, 64};
  int bad_random = 0;
  const int n_random = 1000;
  for (int i = 0; i < n_random; ++i) {
    const ctm::ModelShape sh = random_shape(rng);
    const ctm::Model model =
        random_model(sh, rng.below(1u << 30), 0.03 + 0.2 * rng.unit());
    const frontend::BooleanFeatureMap fmap =
        random_fmap(sh, rng.below(1u << 30), 0.2 + 0.6 * rng.unit());
    const ogbcsr::OGBCSRModel c = ogbcsr::encode(
        model, block_sizes[rng.below(5)], ogbcsr::GroupingMode::kExact);
    const std::vector<sched::ClauseJob> jobs =
        sched::jobs_from(c, sh.windows());
    const sched::Schedule sch =
        sched::greedy_lpt(jobs, 1 + static_cast<int>(rng.below(4)));
    const accel::SimReport sim =
        accel::simulate(c, sch, fmap, accel::ModelMeta::from(model));
    if (sim.class_sums != ctm::class_sums(model, fmap)) ++bad_random;
  }

  // Cached-clip leg: a trained model over clips that went through the real
  // manifest + feature-cache path.
  const Desk& d = desk();
  const char* gsc_root = std::getenv("TKWS_GSC_ROOT");
  std::string clip_source = "synthetic corpus";
  std::vector<frontend::BooleanFeatureMap> clips;
  if (gsc_root != nullptr) {
    clip_source = "TKWS_GSC_ROOT";
    gsc::Manifest full = gsc::build_manifest(gsc_root, 7);
    full.entries.resize(100);
    const std::string cache = fresh_dir("real_cache");
    if (!gsc::cache_features(full, gsc_root, cache, d.fc, d.alpha)
             .failures.empty())
      return {false, "real clips failed to featurize"};
    for (const gsc::ManifestEntry& e : full.entries)
      clips.push_back(frontend::load_feature_map(
          gsc::cached_feature_path(gsc_root, cache, e.path, d.fc, d.alpha)));
  } else {
    for (const gsc::ManifestEntry& e : d.manifest.entries) {
      if (clips.size() == 100) break;
      clips.push_back(d.cached_map(e.path));
    }
  }

  const ogbcsr::OGBCSRModel c =
      ogbcsr::encode(d.model, 16, ogbcsr::GroupingMode::kExact);
  sched::AnnealConfig acfg;
  acfg.seed = 5;
  const sched::Schedule sch = sched::anneal(
      sched::jobs_from(c, d.model.shape().windows()), 4, acfg);
  const accel::ModelMeta meta = accel::ModelMeta::from(d.model);
  int bad_clips = 0;
  for (const frontend::BooleanFeatureMap& fmap : clips) {
    const accel::SimReport sim = accel::simulate(
        c, sch, fmap, meta, accel::SimConfig{});
    if (sim.class_sums != ctm::class_sums(d.model, fmap)) ++bad_clips;
  }

  std::ostringstream note;
  note << n_random << " random pairs (" << bad_random << " mismatches), "
       << clips.size() << " cached clips from " << clip_source << " ("
       << bad_clips << " mismatches), " << std::fixed << std::setprecision(1)
       << seconds_since(t0) << "s";
  return {bad_random == 0 && bad_clips == 0 && clips.size() == 100,
          note.str()};
}

// ---------------------------------------------------------------------------
// 2: decode(encode(m)) returns the exact include masks.

Outcome c2_lossless() {
  Rng rng(2002);
  const std::uint32_t block_sizes[] = {1, 4, 8, 16, 64};
  int bad = 0;
  for (int i = 0; i < 200; ++i) {
    const ctm::ModelShape sh = random_shape(rng);
    const ctm::Model model =
        random_model(sh, rng.below(1u << 30), 0.02 + 0.3 * rng.unit());
    const ogbcsr::IncludeMaskSet masks = ogbcsr::extract_masks(model);
    for (std::uint32_t b : block_sizes) {
      const ogbcsr::OGBCSRModel c =
          ogbcsr::encode_masks(masks, b, ogbcsr::GroupingMode::kExact);
      if (!(ogbcsr::decode(c) == masks)) ++bad;
    }
  }
  std::ostringstream note;
  note << "200 models x 5 block sizes, " << bad << " round-trip mismatches";
  return {bad == 0, note.str()};
}

// ---------------------------------------------------------------------------
// 3: exact pairing weight equals brute force on every small instance.

std::int64_t brute_force_best(const std::vector<ogbcsr::BlockRow>& rows,
                              const std::vector<int>& live, std::size_t first,
                              std::vector<char>& used,
                              std::uint32_t mask_bits) {
  while (first < live.size() && used[first]) ++first;
  if (first >= live.size()) return 0;
  used[first] = 1;
  // Row `first` stays single.
  std::int64_t best =
      brute_force_best(rows, live, first + 1, used, mask_bits);
  for (std::size_t j = first + 1; j < live.size(); ++j) {
    if (used[j]) continue;
    used[j] = 1;
    const std::int64_t w =
        ogbcsr::pair_weight(rows[static_cast<std::size_t>(live[first])],
                            rows[static_cast<std::size_t>(live[j])],
                            mask_bits);
    best = std::max(
        best, w + brute_force_best(rows, live, first + 1, used, mask_bits));
    used[j] = 0;
  }
  used[first] = 0;
  return best;
}

std::int64_t pairing_weight(const std::vector<ogbcsr::BlockRow>& rows,
                            const std::vector<int>& mate,
                            std::uint32_t mask_bits) {
  std::int64_t total = 0;
  for (std::size_t i = 0; i < mate.size(); ++i)
    if (mate[i] >= 0 && static_cast<std::size_t>(mate[i]) > i)
      total += ogbcsr::pair_weight(rows[i],
                                   rows[static_cast<std::size_t>(mate[i])],
                                   mask_bits);
  return total;
}

Outcome c3_matching_optimality() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(3003);
  int bad_exact = 0;
  int bad_greedy = 0;
  const int n = 300;
  for (int i = 0; i < n; ++i) {
    const std::uint32_t mask_bits = 16 + rng.below(49);
    const std::uint32_t block = 4 + rng.below(13);
    const std::size_t n_rows = 2 + rng.below(9);  // up to 10
    ogbcsr::IncludeMaskSet masks;
    masks.mask_bits = mask_bits;
    for (std::size_t r = 0; r < n_rows; ++r) {
      BitVec m(mask_bits);
      const double density = rng.unit() * 0.5;
      for (std::uint32_t b = 0; b < mask_bits; ++b)
        if (rng.unit() < density) m.set(b, true);
      // Duplicate an earlier mask sometimes so strong pairs exist.
      if (r > 0 && rng.below(4) == 0) m = masks.masks[rng.below(r)];
      masks.masks.push_back(std::move(m));
    }
    const std::vector<ogbcsr::BlockRow> rows =
        ogbcsr::to_block_rows(masks, block);
    std::vector<int> live;
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (!rows[r].dead()) live.push_back(static_cast<int>(r));
    std::vector<char> used(live.size(), 0);
    const std::int64_t best =
        brute_force_best(rows, live, 0, used, mask_bits);
    const std::int64_t exact = pairing_weight(
        rows, ogbcsr::optimal_pairing(rows, mask_bits,
                                      ogbcsr::GroupingMode::kExact),
        mask_bits);
    const std::int64_t greedy = pairing_weight(
        rows, ogbcsr::optimal_pairing(rows, mask_bits,
                                      ogbcsr::GroupingMode::kGreedy),
        mask_bits);
    if (exact != best) ++bad_exact;
    if (greedy > exact) ++bad_greedy;
  }
  std::ostringstream note;
  note << n << " instances <= 10 rows: " << bad_exact
       << " exact-vs-brute mismatches, " << bad_greedy
       << " greedy-above-exact, " << std::fixed << std::setprecision(1)
       << seconds_since(t0) << "s";
  return {bad_exact == 0 && bad_greedy == 0, note.str()};
}

// ---------------------------------------------------------------------------
// 4: size(exact) <= size(greedy) <= size(ungrouped); stream length matches.

Outcome c4_size_ordering() {
  Rng rng(4004);
  int bad_order = 0;
  int bad_stream = 0;
  auto check_model = [&](const ctm::Model& model, std::uint32_t block) {
    const ogbcsr::IncludeMaskSet masks = ogbcsr::extract_masks(model);
    std::uint64_t size[3];
    int k = 0;
    for (auto mode :
         {ogbcsr::GroupingMode::kExact, ogbcsr::GroupingMode::kGreedy,
          ogbcsr::GroupingMode::kUngrouped}) {
      const ogbcsr::OGBCSRModel c = ogbcsr::encode_masks(masks, block, mode);
      size[k++] = c.size_bits();
      if (ogbcsr::pack_stream(c).bit_len != c.size_bits()) ++bad_stream;
    }
    if (!(size[0] <= size[1] && size[1] <= size[2])) ++bad_order;
  };
  const int n = 100;
  for (int i = 0; i < n; ++i) {
    const ctm::ModelShape sh = random_shape(rng);
    check_model(random_model(sh, rng.below(1u << 30), 0.02 + 0.3 * rng.unit()),
                1 + static_cast<std::uint32_t>(rng.below(24)));
  }
  check_model(desk().model, 16);
  std::ostringstream note;
  note << n << " random models + trained model: " << bad_order
       << " ordering violations, " << bad_stream << " stream-length mismatches";
  return {bad_order == 0 && bad_stream == 0, note.str()};
}

// ---------------------------------------------------------------------------
// 5: trained-model compression ratio against both uncompressed baselines.

Outcome c5_ratio() {
  const ogbcsr::OGBCSRModel c =
      ogbcsr::encode(desk().model, 16, ogbcsr::GroupingMode::kExact);
  const std::uint64_t size = c.size_bits();
  const std::uint64_t mask_base =
      static_cast<std::uint64_t>(c.clause_count) * c.mask_bits;
  const std::uint64_t state_base = mask_base * 8;
  const double r_mask = static_cast<double>(mask_base) /
                        static_cast<double>(size == 0 ? 1 : size);
  const double r_state = static_cast<double>(state_base) /
                         static_cast<double>(size == 0 ? 1 : size);
  std::ostringstream note;
  note << std::fixed << std::setprecision(2) << r_state
       << "x vs 8-bit states, " << r_mask
       << "x vs raw masks (published 9.84x is model-dependent, not gated)";
  return {size > 0 && r_state > 1.0, note.str()};
}

// ---------------------------------------------------------------------------
// 6: two-stage annealing beats greedy on skewed instances; optimal on small.

std::uint64_t brute_force_makespan(const std::vector<sched::ClauseJob>& jobs,
                                   int num_pes) {
  std::vector<std::uint64_t> loads(static_cast<std::size_t>(num_pes), 0);
  std::uint64_t best = ~0ull;
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == jobs.size()) {
      best = std::min(best, *std::max_element(loads.begin(), loads.end()));
      return;
    }
    for (int p = 0; p < num_pes; ++p) {
      loads[static_cast<std::size_t>(p)] += jobs[i].cost;
      self(self, i + 1);
      loads[static_cast<std::size_t>(p)] -= jobs[i].cost;
    }
  };
  rec(rec, 0);
  return best;
}

Outcome c6_scheduler_quality() {
  const auto t0 = std::chrono::steady_clock::now();

  // Skewed family: pairs of distinct large sizes plus one mid job defeat
  // longest-first placement while a balanced packing exists; small filler
  // jobs bring the count into range without hiding the trap.
  Rng rng(6006);
  double gap_sum = 0.0;
  int worse = 0;
  const int n = 100;
  for (int i = 0; i < n; ++i) {
    const int pes = 4 + static_cast<int>(rng.below(13));  // 4..16
    const std::uint64_t scale = 20;
    std::vector<sched::ClauseJob> jobs;
    auto add = [&](std::uint64_t cost) {
      jobs.push_back({static_cast<std::uint32_t>(jobs.size()), cost});
    };
    for (int k = pes; k < 2 * pes; ++k) {
      add(static_cast<std::uint64_t>(k) * scale + rng.below(6));
      add(static_cast<std::uint64_t>(k) * scale + rng.below(6));
    }
    add(static_cast<std::uint64_t>(pes) * scale + rng.below(6));
    const std::size_t target = 20 + rng.below(181);  // 20..200 jobs
    while (jobs.size() < target) add(1 + rng.below(3));
    rng.shuffle(jobs);
    for (std::size_t j = 0; j < jobs.size(); ++j)
      jobs[j].group = static_cast<std::uint32_t>(j);

    sched::AnnealConfig cfg;
    cfg.seed = 600 + static_cast<std::uint64_t>(i);
    const sched::Schedule greedy = sched::greedy_lpt(jobs, pes);
    const sched::Schedule two_stage = sched::anneal(jobs, pes, cfg);
    if (two_stage.utilization < greedy.utilization) ++worse;
    gap_sum += two_stage.utilization - greedy.utilization;
  }
  const double mean_gap = gap_sum / n;

  // Exhaustive leg: annealing lands on the optimum for every tiny instance.
  Rng srng(6007);
  int not_optimal = 0;
  const int n_small = 60;
  for (int i = 0; i < n_small; ++i) {
    const int pes = 1 + static_cast<int>(srng.below(3));
    const std::size_t n_jobs = 1 + srng.below(10);
    std::vector<sched::ClauseJob> jobs;
    for (std::size_t j = 0; j < n_jobs; ++j)
      jobs.push_back({static_cast<std::uint32_t>(j), 1 + srng.below(30)});
    sched::AnnealConfig cfg;
    cfg.seed = 60 + static_cast<std::uint64_t>(i);
    if (sched::anneal(jobs, pes, cfg).makespan !=
        brute_force_makespan(jobs, pes))
      ++not_optimal;
  }

  std::ostringstream note;
  note << "mean utilization gain " << std::fixed << std::setprecision(1)
       << 100.0 * mean_gap << "pp over " << n << " skewed instances (" << worse
       << " regressions; published 12.2% not gated), " << not_optimal << "/"
       << n_small << " small instances off optimum, " << std::setprecision(1)
       << seconds_since(t0) << "s";
  return {mean_gap >= 0.05 && worse == 0 && not_optimal == 0, note.str()};
}

// ---------------------------------------------------------------------------
// 7: closed-form op count equals the simulator's pre-short-circuit counter.

Outcome c7_ops_accounting() {
  Rng rng(7007);
  int bad = 0;
  const int n = 100;
  for (int i = 0; i < n; ++i) {
    const ctm::ModelShape sh = random_shape(rng);
    const ctm::Model model =
        random_model(sh, rng.below(1u << 30), 0.03 + 0.25 * rng.unit());
    const frontend::BooleanFeatureMap fmap =
        random_fmap(sh, rng.below(1u << 30));
    const ogbcsr::OGBCSRModel c =
        ogbcsr::encode(model, 8, ogbcsr::GroupingMode::kExact);
    const sched::Schedule sch = sched::greedy_lpt(
        sched::jobs_from(c, sh.windows()), 1 + static_cast<int>(rng.below(3)));
    const accel::SimReport sim =
        accel::simulate(c, sch, fmap, accel::ModelMeta::from(model));
    if (sim.logic_ops != accel::analytic_ops(c, sh)) ++bad;
  }

  // Both op definitions for the trained model, against the first cached clip.
  const Desk& d = desk();
  const ogbcsr::OGBCSRModel c =
      ogbcsr::encode(d.model, 16, ogbcsr::GroupingMode::kExact);
  const sched::Schedule sch =
      sched::greedy_lpt(sched::jobs_from(c, d.model.shape().windows()), 4);
  const accel::SimReport sim =
      accel::simulate(c, sch, d.cached_map(d.manifest.entries[0].path),
                      accel::ModelMeta::from(d.model));
  std::ostringstream note;
  note << n << " random models, " << bad
       << " analytic-vs-simulated mismatches; trained model per inference: "
       << sim.logic_ops << " ops all-windows, " << sim.logic_ops_short_circuit
       << " with short-circuit (published 907k reference, not gated)";
  return {bad == 0, note.str()};
}

// ---------------------------------------------------------------------------
// 8: accuracy gates. The toy gate always runs; the 12-keyword gate runs when
// TKWS_GSC_ROOT points at the dataset.

Outcome c8_accuracy() {
  const ToyTask task = make_toy_task(88);
  ctm::Model model(task.shape);
  Rng rng(9);
  const ctm::TrainTrace trace = ctm::train(model, task.train, {}, 5, rng);
  const double best_train =
      *std::max_element(trace.train_accuracy.begin(),
                        trace.train_accuracy.end());
  const double toy_test = ctm::accuracy(model, task.test);

  std::ostringstream note;
  note << std::fixed << std::setprecision(4) << "toy task train " << best_train
       << " (gate >= 0.99), test " << toy_test;
  bool pass = best_train >= 0.99;

  const char* gsc_root = std::getenv("TKWS_GSC_ROOT");
  if (gsc_root == nullptr) {
    note << "; 12-keyword gate skipped (set TKWS_GSC_ROOT to run)";
    return {pass, note.str()};
  }

  // Full-dataset leg: default config end to end, gate at 0.75 test accuracy.
  const auto t0 = std::chrono::steady_clock::now();
  const frontend::FrameConfig fc;
  const double alpha = 0.0625;
  gsc::Manifest manifest = gsc::build_manifest(gsc_root, 0);
  const std::string cache = fresh_dir("gsc_cache");
  const gsc::CacheSummary sum =
      gsc::cache_features(manifest, gsc_root, cache, fc, alpha);
  if (!sum.failures.empty())
    return {false, note.str() + "; dataset clips failed to featurize"};
  auto load_split = [&](gsc::Split split) {
    std::vector<ctm::LabeledMap> out;
    for (const gsc::ManifestEntry& e : manifest.entries)
      if (e.split == split)
        out.push_back({frontend::load_feature_map(gsc::cached_feature_path(
                           gsc_root, cache, e.path, fc, alpha)),
                       e.label});
    return out;
  };
  const std::vector<ctm::LabeledMap> train_set = load_split(gsc::Split::kTrain);
  const std::vector<ctm::LabeledMap> val_set = load_split(gsc::Split::kVal);
  const std::vector<ctm::LabeledMap> test_set = load_split(gsc::Split::kTest);
  ctm::Model gsc_model{ctm::ModelShape{}};
  Rng grng(1);
  ctm::train(gsc_model, train_set, val_set, 30, grng);
  const double test_acc = ctm::accuracy(gsc_model, test_set);
  note << std::fixed << std::setprecision(4) << "; 12-keyword test "
       << test_acc << " (gate >= 0.75, published 87.35% uses unpublished "
       << "hyperparameters), " << std::setprecision(0) << seconds_since(t0)
       << "s";
  return {pass && test_acc >= 0.75, note.str()};
}

// ---------------------------------------------------------------------------
// 9: frontend properties over >= 1000 random inputs.

Mat random_mat(std::size_t rows, std::size_t cols, Rng& rng) {
  Mat m(rows, cols);
  for (double& v : m.data()) v = rng.unit() * 8.0 - 2.0;
  return m;
}

Outcome c9_frontend_properties() {
  Rng rng(9009);
  int inputs = 0;
  int violations = 0;

  // Spectral flux is non-negative and its first column is all zero.
  for (int i = 0; i < 400; ++i) {
    const Mat spec = random_mat(2 + rng.below(39), 2 + rng.below(79), rng);
    const Mat flux = frontend::spectral_flux(spec);
    ++inputs;
    for (std::size_t r = 0; r < flux.rows(); ++r)
      for (std::size_t c = 0; c < flux.cols(); ++c) {
        if (flux.at(r, c) < 0.0) ++violations;
        if (c == 0 && flux.at(r, c) != 0.0) ++violations;
      }
  }

  // Binarization is causal and deterministic: bits before frame t0 cannot
  // change when frames at or after t0 do, and reruns agree bit for bit.
  for (int i = 0; i < 300; ++i) {
    const std::size_t bins = 1 + rng.below(8);
    const std::size_t cols = 4 + rng.below(40);
    const Mat mel = random_mat(bins, cols, rng);
    const Mat flux = random_mat(bins, cols, rng);
    const double alpha = 0.03 + rng.unit() * 0.5;
    const frontend::BooleanFeatureMap a = frontend::binarize(mel, flux, alpha);
    ++inputs;
    if (!(a == frontend::binarize(mel, flux, alpha))) ++violations;
    Mat mel2 = mel;
    Mat flux2 = flux;
    const std::size_t t0 = 1 + rng.below(cols - 1);
    for (std::size_t r = 0; r < bins; ++r)
      for (std::size_t c = t0; c < cols; ++c) {
        mel2.at(r, c) += 1.0 + rng.unit() * 4.0;
        flux2.at(r, c) += 1.0 + rng.unit() * 4.0;
      }
    const frontend::BooleanFeatureMap b =
        frontend::binarize(mel2, flux2, alpha);
    for (int ch = 0; ch < a.channels(); ++ch)
      for (std::size_t f = 0; f < bins; ++f)
        for (std::size_t t = 0; t < t0; ++t)
          if (a.bit(ch, static_cast<int>(f), static_cast<int>(t)) !=
              b.bit(ch, static_cast<int>(f), static_cast<int>(t)))
            ++violations;
  }

  // Filterbank weights partition the passband: for DFT bins strictly inside
  // (fmin, fmax) the per-bin column sum lies in (0, 1].
  for (int i = 0; i < 300; ++i) {
    frontend::FrameConfig fc;
    fc.fft = 256u << rng.below(3);
    fc.frame_len = fc.fft;
    fc.hop = fc.fft / 2;
    fc.mel_bins = 4 + static_cast<int>(rng.below(29));
    fc.fmin_hz = rng.unit() * 500.0;
    fc.fmax_hz = 3000.0 + rng.unit() * 5000.0;
    const Mat fb = frontend::mel_filterbank(fc);
    ++inputs;
    for (std::size_t bin = 0; bin < fb.cols(); ++bin) {
      const double freq = static_cast<double>(bin) * 16000.0 /
                          static_cast<double>(fc.fft);
      if (freq <= fc.fmin_hz || freq >= fc.fmax_hz) continue;
      double sum = 0.0;
      for (std::size_t f = 0; f < fb.rows(); ++f) sum += fb.at(f, bin);
      if (!(sum > 0.0 && sum <= 1.0 + 1e-6)) ++violations;
    }
  }

  std::ostringstream note;
  note << inputs << " random inputs (flux, causality, partition), "
       << violations << " violations";
  return {inputs >= 1000 && violations == 0, note.str()};
}

// ---------------------------------------------------------------------------
// 10: two same-seed pipeline runs produce bit-identical artifacts.

int quiet_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("tkws");
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream sink;
  std::streambuf* out = std::cout.rdbuf(sink.rdbuf());
  std::streambuf* err = std::cerr.rdbuf(sink.rdbuf());
  const int rc = cli::run(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(out);
  std::cerr.rdbuf(err);
  return rc;
}

Outcome c10_determinism() {
  const Desk& d = desk();
  const std::string cfg_path =
      (fs::path(fresh_dir("det_cfg")) / "acc.cfg").string();
  {
    std::ofstream cfg(cfg_path);
    cfg << "ctm.clauses_per_class = 8\n"
        << "train.epochs = 1\n"
        << "schedule.num_pes = 3\n"
        << "schedule.iters_per_temp = 50\n";
  }
  std::vector<std::string> dirs;
  for (const char* name : {"det_a", "det_b"}) {
    const std::string out = fresh_dir(name);
    dirs.push_back(out);
    auto stage = [&](const char* cmd, bool seeded, bool data,
                     bool trace = false) {
      std::vector<std::string> args{cmd, "--config", cfg_path, "--out", out};
      if (seeded) { args.insert(args.end(), {"--seed", "21"}); }
      if (data) { args.insert(args.end(), {"--data-root", d.root}); }
      if (trace) args.push_back("--trace");
      return quiet_cli(args) == cli::kExitOk;
    };
    if (!stage("prepare", true, true))
      return {false, "pipeline stage failed: prepare"};
    if (!stage("extract", false, true))
      return {false, "pipeline stage failed: extract"};
    if (!stage("train", true, true))
      return {false, "pipeline stage failed: train"};
    if (!stage("eval", false, true))
      return {false, "pipeline stage failed: eval"};
    if (!stage("compress", false, false))
      return {false, "pipeline stage failed: compress"};
    if (!stage("schedule", true, false))
      return {false, "pipeline stage failed: schedule"};
    if (!stage("simulate", false, true, true))
      return {false, "pipeline stage failed: simulate"};
    if (!stage("report", false, false))
      return {false, "pipeline stage failed: report"};
  }

  // Hash every artifact, including each cached feature file.
  auto artifact_hashes = [](const std::string& out) {
    std::vector<std::pair<std::string, std::uint64_t>> hashes;
    for (const char* name :
         {"manifest.csv", "model.tkws", "train_trace.txt", "eval.txt",
          "model.ogbcsr", "compress.txt", "schedule.txt", "sim_report.txt",
          "sim_trace.csv", "report.txt"})
      hashes.emplace_back(name, fnv1a64_file((fs::path(out) / name).string()));
    std::vector<std::string> feats;
    for (const auto& e : fs::directory_iterator(fs::path(out) / "features"))
      feats.push_back(e.path().filename().string());
    std::sort(feats.begin(), feats.end());
    for (const std::string& f : feats)
      hashes.emplace_back("features/" + f,
                          fnv1a64_file((fs::path(out) / "features" / f)
                                           .string()));
    return hashes;
  };
  const auto a = artifact_hashes(dirs[0]);
  const auto b = artifact_hashes(dirs[1]);
  if (a.size() != b.size()) return {false, "artifact sets differ in size"};
  int diff = 0;
  std::string first_diff;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i] && ++diff == 1) first_diff = a[i].first;
  std::ostringstream note;
  note << a.size() << " artifacts hashed per run, " << diff << " differ";
  if (diff > 0) note << " (first: " << first_diff << ")";
  return {diff == 0, note.str()};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* label;
    Outcome (*fn)();
  };
  const Criterion criteria[] = {
      {1, "sparse simulator matches dense class sums", c1_oracle_equivalence},
      {2, "compressed model round-trips losslessly", c2_lossless},
      {3, "exact pairing is optimal, greedy never above it",
       c3_matching_optimality},
      {4, "grouping only ever shrinks the encoding", c4_size_ordering},
      {5, "trained model compresses below its stored size", c5_ratio},
      {6, "two-stage annealing beats greedy, exact on small instances",
       c6_scheduler_quality},
      {7, "analytic op count matches the simulator", c7_ops_accounting},
      {8, "accuracy gates", c8_accuracy},
      {9, "frontend properties hold on random inputs",
       c9_frontend_properties},
      {10, "same seed reproduces every artifact", c10_determinism},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    Outcome outcome;
    try {
      outcome = c.fn();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::cout << "criterion " << c.id << ": "
              << (outcome.pass ? "PASS" : "FAIL") << "  [" << c.label << "] "
              << outcome.note << std::endl;
  }
  return failures;
}
