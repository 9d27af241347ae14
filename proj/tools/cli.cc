// tools/cli.cc
#include "cli.h"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "tkws/accel.h"
#include "tkws/binio.h"
#include "tkws/config.h"
#include "tkws/ctm_eval.h"
#include "tkws/ctm_model.h"
#include "tkws/ctm_train.h"
#include "tkws/error.h"
#include "tkws/frontend.h"
#include "tkws/gsc.h"
#include "tkws/ogbcsr.h"
#include "tkws/rng.h"
#include "tkws/sched.h"

namespace tkws::cli {
namespace {

namespace fs = std::filesystem;

// Pipeline state shared by the subcommands. Artifacts live under one output
// directory with fixed names, so each stage finds its predecessors without
// extra flags; --model overrides the dense model path on both ends.
struct Ctx {
  Config cfg;
  std::uint64_t seed = 0;
  std::string data_root;
  std::string out_dir = "tkws-out";
  std::string model_path;
  bool trace = false;

  std::string model_file() const {
    return model_path.empty() ? out_dir + "/model.tkws" : model_path;
  }
  std::string manifest_file() const { return out_dir + "/manifest.csv"; }
  std::string cache_dir() const { return out_dir + "/features"; }
  std::string train_trace_file() const { return out_dir + "/train_trace.txt"; }
  std::string eval_file() const { return out_dir + "/eval.txt"; }
  std::string compressed_file() const { return out_dir + "/model.ogbcsr"; }
  std::string compress_report_file() const { return out_dir + "/compress.txt"; }
  std::string schedule_file() const { return out_dir + "/schedule.txt"; }
  std::string sim_report_file() const { return out_dir + "/sim_report.txt"; }
  std::string sim_trace_file() const { return out_dir + "/sim_trace.csv"; }
  std::string report_file() const { return out_dir + "/report.txt"; }
};

// Every textual artifact starts with the effective settings behind it, as
// comment lines the readers skip.
void write_provenance(std::ostream& os, const Ctx& ctx, const char* kind) {
  os << "# " << kind << "\n";
  os << "# seed " << ctx.seed << "\n";
  std::istringstream is(ctx.cfg.dump());
  std::string line;
  while (std::getline(is, line)) os << "# cfg " << line << "\n";
}

void require_input(const std::string& path, const char* producer) {
  if (!fs::exists(path))
    throw IoError(cat("missing input: ", path, " (produce it with `tkws ",
                      producer, "`)"));
}

std::string fixed4(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  return os.str();
}

std::string ratio_or_inf(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return "inf";
  return fixed4(static_cast<double>(num) / static_cast<double>(den));
}

// Writes provenance plus a prebuilt body and echoes the body to stdout.
void emit_artifact(const Ctx& ctx, const std::string& path, const char* kind,
                   const std::string& body) {
  fs::create_directories(ctx.out_dir);
  std::ofstream os = open_output(path, std::ios::out);
  write_provenance(os, ctx, kind);
  os << body;
  if (!os) throw IoError(cat("write failed: ", path));
  std::cout << body;
}

frontend::BooleanFeatureMap feature_for(const Ctx& ctx,
                                        const frontend::FrameConfig& fc,
                                        double alpha,
                                        const std::string& path_spec) {
  const std::string cached =
      gsc::cached_feature_path(ctx.data_root, ctx.cache_dir(), path_spec, fc,
                               alpha);
  if (!cached.empty() && fs::exists(cached))
    return frontend::load_feature_map(cached);
  return frontend::extract_features(gsc::load_entry(ctx.data_root, path_spec),
                                    fc, alpha);
}

std::vector<ctm::LabeledMap> load_split(const Ctx& ctx,
                                        const gsc::Manifest& m,
                                        gsc::Split split,
                                        const frontend::FrameConfig& fc,
                                        double alpha) {
  std::vector<ctm::LabeledMap> out;
  for (const gsc::ManifestEntry& e : m.entries)
    if (e.split == split)
      out.push_back({feature_for(ctx, fc, alpha, e.path), e.label});
  return out;
}

// The trained geometry must agree with the frontend the features come from,
// otherwise the windows silently misalign.
void check_geometry(const ctm::ModelShape& shape,
                    const frontend::FrameConfig& fc) {
  if (shape.channels != frontend::kNumChannels || shape.bins != fc.mel_bins ||
      shape.frames != fc.frame_count())
    throw ConfigError(cat("model geometry ", shape.channels, "x", shape.bins,
                          "x", shape.frames,
                          " does not match the frontend config (",
                          frontend::kNumChannels, "x", fc.mel_bins, "x",
                          fc.frame_count(), ")"));
}

int cmd_prepare(const Ctx& ctx) {
  const gsc::Manifest m = gsc::build_manifest(ctx.data_root, ctx.seed);
  fs::create_directories(ctx.out_dir);
  {
    std::ofstream os = open_output(ctx.manifest_file(), std::ios::out);
    write_provenance(os, ctx, "manifest");
    gsc::write_manifest(os, m);
    if (!os) throw IoError(cat("write failed: ", ctx.manifest_file()));
  }
  std::size_t per_split[3] = {0, 0, 0};
  for (const gsc::ManifestEntry& e : m.entries)
    ++per_split[static_cast<int>(e.split)];
  std::cout << "entries: " << m.entries.size() << "\n"
            << "train: " << per_split[0] << "\n"
            << "val: " << per_split[1] << "\n"
            << "test: " << per_split[2] << "\n"
            << "manifest: " << ctx.manifest_file() << "\n";
  return kExitOk;
}

int cmd_extract(const Ctx& ctx) {
  require_input(ctx.manifest_file(), "prepare");
  const gsc::Manifest m = gsc::load_manifest(ctx.manifest_file());
  const frontend::FrameConfig fc = frontend::FrameConfig::from(ctx.cfg);
  const double alpha = ctx.cfg.get_double("frontend.alpha");
  const gsc::CacheSummary sum =
      gsc::cache_features(m, ctx.data_root, ctx.cache_dir(), fc, alpha);
  std::cout << "written: " << sum.written << "\n"
            << "skipped: " << sum.skipped << "\n"
            << "failures: " << sum.failures.size() << "\n"
            << "cache: " << ctx.cache_dir() << "\n";
  for (const auto& [path, what] : sum.failures)
    std::cerr << "failed clip: " << path << ": " << what << "\n";
  if (!sum.failures.empty())
    throw DatasetError(cat(sum.failures.size(),
                           " clip(s) could not be featurized"));
  return kExitOk;
}

int cmd_train(const Ctx& ctx) {
  require_input(ctx.manifest_file(), "prepare");
  const gsc::Manifest m = gsc::load_manifest(ctx.manifest_file());
  const frontend::FrameConfig fc = frontend::FrameConfig::from(ctx.cfg);
  const double alpha = ctx.cfg.get_double("frontend.alpha");

  ctm::ModelShape shape = ctm::ModelShape::from(ctx.cfg);
  shape.frames = fc.frame_count();
  shape.validate();
  check_geometry(shape, fc);
  if (shape.classes != gsc::kClasses)
    throw ConfigError(cat("ctm.classes is ", shape.classes, ", dataset has ",
                          gsc::kClasses));

  const std::vector<ctm::LabeledMap> train_set =
      load_split(ctx, m, gsc::Split::kTrain, fc, alpha);
  const std::vector<ctm::LabeledMap> val_set =
      load_split(ctx, m, gsc::Split::kVal, fc, alpha);

  const int epochs = static_cast<int>(ctx.cfg.get_int("train.epochs"));
  if (epochs < 0) throw ConfigError("train.epochs must be >= 0");

  ctm::Model model(shape);
  Rng rng(ctx.seed);
  const ctm::TrainTrace tr = ctm::train(model, train_set, val_set, epochs, rng);

  fs::create_directories(ctx.out_dir);
  ctm::save_model(ctx.model_file(), model);
  {
    std::ofstream os = open_output(ctx.train_trace_file(), std::ios::out);
    write_provenance(os, ctx, "train trace");
    os << "# columns: epoch train_accuracy val_accuracy\n";
    for (std::size_t e = 0; e < tr.train_accuracy.size(); ++e)
      os << e + 1 << ' ' << fixed4(tr.train_accuracy[e]) << ' '
         << fixed4(tr.eval_accuracy[e]) << "\n";
    if (!os) throw IoError(cat("write failed: ", ctx.train_trace_file()));
  }

  std::cout << "epochs: " << tr.train_accuracy.size() << "\n";
  if (!tr.train_accuracy.empty()) {
    std::cout << "final_train_accuracy: " << fixed4(tr.train_accuracy.back())
              << "\n"
              << "final_val_accuracy: " << fixed4(tr.eval_accuracy.back())
              << "\n";
  }
  std::cout << "model: " << ctx.model_file() << "\n";
  return kExitOk;
}

int cmd_eval(const Ctx& ctx) {
  require_input(ctx.manifest_file(), "prepare");
  require_input(ctx.model_file(), "train");
  const gsc::Manifest m = gsc::load_manifest(ctx.manifest_file());
  const ctm::Model model = ctm::load_model(ctx.model_file());
  const frontend::FrameConfig fc = frontend::FrameConfig::from(ctx.cfg);
  const double alpha = ctx.cfg.get_double("frontend.alpha");
  check_geometry(model.shape(), fc);
  if (model.shape().classes != gsc::kClasses)
    throw ConfigError(cat("model has ", model.shape().classes,
                          " classes, dataset has ", gsc::kClasses));

  const std::vector<ctm::LabeledMap> test_set =
      load_split(ctx, m, gsc::Split::kTest, fc, alpha);
  const ctm::CompiledModel compiled(model);

  std::vector<std::vector<int>> confusion(
      gsc::kClasses, std::vector<int>(gsc::kClasses, 0));
  std::size_t correct = 0;
  for (const ctm::LabeledMap& s : test_set) {
    const int p = compiled.predict(s.fmap);
    ++confusion[static_cast<std::size_t>(s.label)][static_cast<std::size_t>(p)];
    if (p == s.label) ++correct;
  }

  std::ostringstream body;
  body << "test_clips: " << test_set.size() << "\n";
  body << "accuracy: "
       << fixed4(test_set.empty()
                     ? 0.0
                     : static_cast<double>(correct) /
                           static_cast<double>(test_set.size()))
       << "\n";
  body << "classes:";
  for (int c = 0; c < gsc::kClasses; ++c) body << ' ' << gsc::class_name(c);
  body << "\n# confusion matrix, rows true class, columns predicted\n";
  for (int t = 0; t < gsc::kClasses; ++t) {
    body << "confusion " << gsc::class_name(t) << ":";
    for (int p = 0; p < gsc::kClasses; ++p)
      body << ' ' << confusion[static_cast<std::size_t>(t)]
                               [static_cast<std::size_t>(p)];
    body << "\n";
  }
  emit_artifact(ctx, ctx.eval_file(), "evaluation", body.str());
  return kExitOk;
}

int cmd_compress(const Ctx& ctx) {
  require_input(ctx.model_file(), "train");
  const ctm::Model model = ctm::load_model(ctx.model_file());
  const auto block =
      static_cast<std::uint32_t>(ctx.cfg.get_int("compress.block_size"));
  const ogbcsr::IncludeMaskSet masks = ogbcsr::extract_masks(model);
  const ogbcsr::OGBCSRModel c =
      ogbcsr::encode_masks(masks, block, ogbcsr::GroupingMode::kExact);
  fs::create_directories(ctx.out_dir);
  ogbcsr::write_ogbcsr(ctx.compressed_file(), c);

  const std::uint64_t mask_base =
      static_cast<std::uint64_t>(c.clause_count) * c.mask_bits;
  const std::uint64_t state_base = mask_base * 8;
  std::ostringstream body;
  body << "block_size: " << c.block_size << "\n"
       << "clauses: " << c.clause_count << "\n"
       << "dead_clauses: " << c.dead.popcount() << "\n"
       << "groups: " << c.groups.size() << "\n"
       << "size_bits: " << c.size_bits() << "\n"
       << "mask_baseline_bits: " << mask_base << "\n"
       << "state_baseline_bits: " << state_base << "\n"
       << "ratio_mask_baseline: " << ratio_or_inf(mask_base, c.size_bits())
       << "\n"
       << "ratio_state_baseline: " << ratio_or_inf(state_base, c.size_bits())
       << "\n";
  emit_artifact(ctx, ctx.compress_report_file(), "compression report",
                body.str());
  std::cout << "compressed: " << ctx.compressed_file() << "\n";
  return kExitOk;
}

int cmd_schedule(const Ctx& ctx) {
  require_input(ctx.compressed_file(), "compress");
  require_input(ctx.model_file(), "train");
  const ogbcsr::OGBCSRModel c = ogbcsr::read_ogbcsr(ctx.compressed_file());
  const ctm::Model model = ctm::load_model(ctx.model_file());
  if (c.mask_bits != static_cast<std::uint32_t>(model.shape().literals()) ||
      c.clause_count != static_cast<std::uint32_t>(model.shape().clause_count()))
    throw FormatError(cat("compressed model does not match ",
                          ctx.model_file()));

  const int pes = static_cast<int>(ctx.cfg.get_int("schedule.num_pes"));
  if (pes < 1) throw ConfigError("schedule.num_pes must be >= 1");
  const std::vector<sched::ClauseJob> jobs =
      sched::jobs_from(c, model.shape().windows());

  sched::AnnealConfig acfg = sched::AnnealConfig::from(ctx.cfg);
  acfg.seed = ctx.seed;
  const sched::Schedule greedy = sched::greedy_lpt(jobs, pes);
  const sched::Schedule annealed = sched::anneal(jobs, pes, acfg);

  fs::create_directories(ctx.out_dir);
  {
    std::ofstream os = open_output(ctx.schedule_file(), std::ios::out);
    write_provenance(os, ctx, "schedule");
    sched::write_schedule(os, annealed, jobs);
    if (!os) throw IoError(cat("write failed: ", ctx.schedule_file()));
  }
  std::cout << "jobs: " << jobs.size() << "\n"
            << "pes: " << pes << "\n"
            << "greedy_makespan: " << greedy.makespan << "\n"
            << "makespan: " << annealed.makespan << "\n"
            << "utilization: " << fixed4(annealed.utilization) << "\n"
            << "schedule: " << ctx.schedule_file() << "\n";
  return kExitOk;
}

int cmd_simulate(const Ctx& ctx) {
  require_input(ctx.model_file(), "train");
  require_input(ctx.compressed_file(), "compress");
  require_input(ctx.schedule_file(), "schedule");
  require_input(ctx.manifest_file(), "prepare");

  const ctm::Model model = ctm::load_model(ctx.model_file());
  const ogbcsr::OGBCSRModel c = ogbcsr::read_ogbcsr(ctx.compressed_file());
  const sched::LoadedSchedule loaded =
      sched::load_schedule(ctx.schedule_file());
  if (loaded.jobs != sched::jobs_from(c, model.shape().windows()))
    throw FormatError(cat(ctx.schedule_file(), " does not match ",
                          ctx.compressed_file()));

  const gsc::Manifest m = gsc::load_manifest(ctx.manifest_file());
  const frontend::FrameConfig fc = frontend::FrameConfig::from(ctx.cfg);
  const double alpha = ctx.cfg.get_double("frontend.alpha");
  check_geometry(model.shape(), fc);

  // The replayed input is the first test-split clip, so repeated runs over
  // one manifest exercise one fixed, reproducible stimulus.
  const gsc::ManifestEntry* clip = nullptr;
  for (const gsc::ManifestEntry& e : m.entries)
    if (e.split == gsc::Split::kTest) {
      clip = &e;
      break;
    }
  if (clip == nullptr)
    throw DatasetError("manifest has no test-split entries");

  accel::SimConfig scfg = accel::SimConfig::from(ctx.cfg);
  scfg.record_trace = ctx.trace;
  const accel::SimReport r =
      accel::simulate(c, loaded.schedule,
                      feature_for(ctx, fc, alpha, clip->path),
                      accel::ModelMeta::from(model), scfg);

  std::ostringstream body;
  body << "clip: " << clip->path << "\n"
       << "label: " << gsc::class_name(clip->label) << "\n";
  {
    std::ostringstream rep;
    accel::write_report(rep, r);
    body << rep.str();
  }
  body << "predicted_name: "
       << gsc::class_name(ctm::argmax_class(r.class_sums)) << "\n";
  emit_artifact(ctx, ctx.sim_report_file(), "simulation report", body.str());
  if (ctx.trace) {
    std::ofstream os = open_output(ctx.sim_trace_file(), std::ios::out);
    write_provenance(os, ctx, "block fetch trace");
    accel::write_trace_csv(os, r);
    if (!os) throw IoError(cat("write failed: ", ctx.sim_trace_file()));
    std::cout << "trace: " << ctx.sim_trace_file() << "\n";
  }
  return kExitOk;
}

// "key: value" lines from one of our textual artifacts; comment lines and
// anything without a colon are skipped.
std::map<std::string, std::string> read_kv(const std::string& path) {
  std::ifstream is = open_input(path, std::ios::in);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const std::size_t colon = line.find(':');
    if (colon == std::string::npos) continue;
    const std::string key = line.substr(0, colon);
    std::size_t b = line.find_first_not_of(' ', colon + 1);
    kv[key] = b == std::string::npos ? "" : line.substr(b);
  }
  return kv;
}

void copy_keys(std::ostringstream& body, const char* prefix,
               const std::map<std::string, std::string>& kv,
               const std::vector<std::string>& keys) {
  for (const std::string& k : keys) {
    const auto it = kv.find(k);
    if (it != kv.end())
      body << prefix << '.' << k << ": " << it->second << "\n";
  }
}

int cmd_report(const Ctx& ctx) {
  std::ostringstream body;
  int present = 0;

  if (fs::exists(ctx.manifest_file())) {
    ++present;
    const gsc::Manifest m = gsc::load_manifest(ctx.manifest_file());
    std::size_t per_split[3] = {0, 0, 0};
    for (const gsc::ManifestEntry& e : m.entries)
      ++per_split[static_cast<int>(e.split)];
    body << "manifest.entries: " << m.entries.size() << "\n"
         << "manifest.train: " << per_split[0] << "\n"
         << "manifest.val: " << per_split[1] << "\n"
         << "manifest.test: " << per_split[2] << "\n";
  } else {
    body << "manifest: missing\n";
  }

  if (fs::exists(ctx.train_trace_file())) {
    ++present;
    std::ifstream is = open_input(ctx.train_trace_file(), std::ios::in);
    std::string line;
    int epochs = 0;
    std::string last_train, last_val;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      int e = 0;
      std::string a, b;
      if (ls >> e >> a >> b) {
        epochs = e;
        last_train = a;
        last_val = b;
      }
    }
    body << "train.epochs: " << epochs << "\n";
    if (epochs > 0)
      body << "train.final_train_accuracy: " << last_train << "\n"
           << "train.final_val_accuracy: " << last_val << "\n";
  } else {
    body << "train: missing\n";
  }

  if (fs::exists(ctx.eval_file())) {
    ++present;
    copy_keys(body, "eval", read_kv(ctx.eval_file()),
              {"test_clips", "accuracy"});
  } else {
    body << "eval: missing\n";
  }

  if (fs::exists(ctx.compress_report_file())) {
    ++present;
    copy_keys(body, "compress", read_kv(ctx.compress_report_file()),
              {"block_size", "groups", "size_bits", "ratio_mask_baseline",
               "ratio_state_baseline"});
  } else {
    body << "compress: missing\n";
  }

  if (fs::exists(ctx.schedule_file())) {
    ++present;
    const sched::LoadedSchedule loaded =
        sched::load_schedule(ctx.schedule_file());
    body << "schedule.jobs: " << loaded.jobs.size() << "\n"
         << "schedule.pes: " << loaded.schedule.num_pes << "\n"
         << "schedule.makespan: " << loaded.schedule.makespan << "\n"
         << "schedule.utilization: " << fixed4(loaded.schedule.utilization)
         << "\n";
  } else {
    body << "schedule: missing\n";
  }

  if (fs::exists(ctx.sim_report_file())) {
    ++present;
    copy_keys(body, "simulate", read_kv(ctx.sim_report_file()),
              {"clip", "total_cycles", "logic_ops", "logic_ops_short_circuit",
               "model_mem_reads", "feature_mem_reads", "utilization_aggregate",
               "predicted_name"});
  } else {
    body << "simulate: missing\n";
  }

  if (present == 0)
    throw IoError(cat("no pipeline artifacts under ", ctx.out_dir,
                      " (run the pipeline subcommands first)"));
  emit_artifact(ctx, ctx.report_file(), "pipeline summary", body.str());
  return kExitOk;
}

int fail(const char* kind, int code, const std::string& what) {
  std::cerr << "error: [" << kind << "] " << what << "\n";
  return code;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{
      "tkws: keyword-spotting pipeline over binarized audio features.\n"
      "Stages chain through fixed file names in the --out directory:\n"
      "manifest.csv -> features/ -> model.tkws -> model.ogbcsr ->\n"
      "schedule.txt -> sim_report.txt."};
  app.require_subcommand(1);
  app.footer(
      "Exit codes:\n"
      "  0  success\n"
      "  64 usage error (bad flags or subcommand)\n"
      "  65 malformed file contents (bad magic, version or fields)\n"
      "  66 missing input file or artifact\n"
      "  69 dataset layout problem\n"
      "  70 unexpected internal failure\n"
      "  78 bad configuration key or value");

  Ctx ctx;
  std::string config_path;
  std::int64_t block_size = 0;
  int pes = 0;

  auto add_common = [&](CLI::App* sub, bool with_seed) {
    sub->add_option("--config", config_path,
                    "config file of 'key = value' lines");
    sub->add_option("--out", ctx.out_dir, "pipeline artifact directory")
        ->capture_default_str();
    if (with_seed)
      sub->add_option("--seed", ctx.seed, "seed for all randomized steps")
          ->capture_default_str();
  };
  auto add_data_root = [&](CLI::App* sub) {
    sub->add_option("--data-root", ctx.data_root,
                    "dataset directory (extracted archive layout)")
        ->required();
  };
  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model", ctx.model_path,
                    "dense model file (default <out>/model.tkws)");
  };

  CLI::App* prepare =
      app.add_subcommand("prepare", "scan the dataset into a split manifest");
  add_common(prepare, true);
  add_data_root(prepare);

  CLI::App* extract = app.add_subcommand(
      "extract", "cache binarized feature maps for every manifest clip");
  add_common(extract, false);
  add_data_root(extract);

  CLI::App* train = app.add_subcommand(
      "train", "train the clause model and write an accuracy trace");
  add_common(train, true);
  add_data_root(train);
  add_model(train);

  CLI::App* eval = app.add_subcommand(
      "eval", "score the test split; prints accuracy and confusion matrix");
  add_common(eval, false);
  add_data_root(eval);
  add_model(eval);

  CLI::App* compress = app.add_subcommand(
      "compress", "group-compress the include masks and report ratios");
  add_common(compress, false);
  add_model(compress);
  compress->add_option("--block-size", block_size, "mask block width in bits")
      ->check(CLI::Range(std::int64_t{1}, std::int64_t{1} << 20));

  CLI::App* schedule = app.add_subcommand(
      "schedule", "assign clause groups to PEs by annealed load balancing");
  add_common(schedule, true);
  add_model(schedule);
  schedule->add_option("--pes", pes, "number of processing elements")
      ->check(CLI::Range(1, 1 << 20));

  CLI::App* simulate = app.add_subcommand(
      "simulate",
      "replay the schedule cycle by cycle on the first test-split clip");
  add_common(simulate, false);
  add_data_root(simulate);
  add_model(simulate);
  simulate->add_flag("--trace", ctx.trace,
                     "also write the block fetch trace CSV");

  CLI::App* report = app.add_subcommand(
      "report", "aggregate all artifacts in --out into one summary");
  add_common(report, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success))
      return app.exit(e);
    return fail("usage", kExitUsage, e.what());
  }

  try {
    if (!config_path.empty()) ctx.cfg.load_file(config_path);
    if (block_size > 0)
      ctx.cfg.set("compress.block_size", std::to_string(block_size));
    if (pes > 0) ctx.cfg.set("schedule.num_pes", std::to_string(pes));

    if (prepare->parsed()) return cmd_prepare(ctx);
    if (extract->parsed()) return cmd_extract(ctx);
    if (train->parsed()) return cmd_train(ctx);
    if (eval->parsed()) return cmd_eval(ctx);
    if (compress->parsed()) return cmd_compress(ctx);
    if (schedule->parsed()) return cmd_schedule(ctx);
    if (simulate->parsed()) return cmd_simulate(ctx);
    if (report->parsed()) return cmd_report(ctx);
    return fail("usage", kExitUsage, "no subcommand given");
  } catch (const ConfigError& e) {
    return fail("config", kExitConfig, e.what());
  } catch (const DatasetError& e) {
    return fail("dataset", kExitDataset, e.what());
  } catch (const FormatError& e) {
    return fail("format", kExitFormat, e.what());
  } catch (const IoError& e) {
    return fail("missing-input", kExitMissingInput, e.what());
  } catch (const std::exception& e) {
    return fail("internal", kExitInternal, e.what());
  }
}

}  // namespace tkws::cli
