// tests/cli_test.cc
#include "cli.h"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "support/gsc_corpus.h"
#include "tkws/binio.h"
#include "tkws/ctm_model.h"
#include "tkws/gsc.h"
#include "tkws/ogbcsr.h"
#include "tkws/sched.h"

using namespace tkws;
using namespace tkws::testsupport;

namespace fs = std::filesystem;

namespace {

std::string fresh_dir(const std::string& name) {
  const std::string dir =
      (fs::temp_directory_path() / ("tkws_" + name)).string();
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Runs one subcommand in-process, capturing stdout + stderr.
int run_cli(const std::vector<std::string>& args, std::string* output = nullptr) {
  std::vector<const char*> argv{"tkws"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  std::streambuf* old_out = std::cout.rdbuf(out.rdbuf());
  std::streambuf* old_err = std::cerr.rdbuf(err.rdbuf());
  const int rc =
      cli::run(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  if (output) *output = out.str() + err.str();
  return rc;
}

// One corpus and config shared by every case; runs write their own out dirs.
struct Env {
  std::string data;
  std::string cfg;
  Env() {
    data = fresh_dir("cli_data");
    make_gsc_corpus(data, 17);
    const std::string dir = fresh_dir("cli_cfg");
    cfg = dir + "/cfg.txt";
    std::ofstream(cfg) << "ctm.clauses_per_class = 8\n"
                          "train.epochs = 2\n"
                          "schedule.num_pes = 3\n"
                          "schedule.iters_per_temp = 50\n";
  }
};

const Env& env() {
  static Env e;
  return e;
}

// prepare .. schedule with one seed; returns the out directory.
std::string run_pipeline(const std::string& name, const std::string& seed) {
  const std::string out = fresh_dir(name);
  REQUIRE(run_cli({"prepare", "--data-root", env().data, "--out", out,
                   "--seed", seed, "--config", env().cfg}) == cli::kExitOk);
  REQUIRE(run_cli({"extract", "--data-root", env().data, "--out", out,
                   "--config", env().cfg}) == cli::kExitOk);
  REQUIRE(run_cli({"train", "--data-root", env().data, "--out", out,
                   "--seed", seed, "--config", env().cfg}) == cli::kExitOk);
  REQUIRE(run_cli({"compress", "--out", out, "--config", env().cfg}) ==
          cli::kExitOk);
  REQUIRE(run_cli({"schedule", "--out", out, "--seed", seed, "--config",
                   env().cfg}) == cli::kExitOk);
  return out;
}

bool same_bytes(const std::string& a, const std::string& b) {
  return read_file(a) == read_file(b);
}

}  // namespace

TEST_CASE("the pipeline chains through one artifact directory") {
  const std::string out = run_pipeline("cli_run", "7");
  std::string text;
  CHECK(run_cli({"eval", "--data-root", env().data, "--out", out, "--config",
                 env().cfg}, &text) == cli::kExitOk);
  CHECK(text.find("accuracy: ") != std::string::npos);
  CHECK(text.find("confusion silence:") != std::string::npos);

  CHECK(run_cli({"simulate", "--data-root", env().data, "--out", out,
                 "--config", env().cfg, "--trace"}, &text) == cli::kExitOk);
  CHECK(text.find("total_cycles: ") != std::string::npos);
  CHECK(text.find("predicted_name: ") != std::string::npos);

  CHECK(run_cli({"report", "--out", out, "--config", env().cfg}, &text) ==
        cli::kExitOk);
  for (const char* key :
       {"manifest.entries: 72", "train.epochs: 2", "eval.accuracy: ",
        "compress.size_bits: ", "schedule.makespan: ",
        "simulate.total_cycles: "})
    CHECK(text.find(key) != std::string::npos);

  // Every artifact parses with the library readers.
  const gsc::Manifest m = gsc::load_manifest(out + "/manifest.csv");
  CHECK(m.entries.size() == 72);
  const ctm::Model model = ctm::load_model(out + "/model.tkws");
  CHECK(model.shape().clauses_per_class == 8);
  const ogbcsr::OGBCSRModel c = ogbcsr::read_ogbcsr(out + "/model.ogbcsr");
  CHECK(ogbcsr::decode(c).masks.size() == 96);
  const sched::LoadedSchedule s = sched::load_schedule(out + "/schedule.txt");
  CHECK(s.jobs.size() == c.groups.size());
  CHECK(s.schedule.num_pes == 3);

  // The trace CSV has one row per model-memory read.
  std::ifstream rep(out + "/sim_report.txt");
  std::string line;
  std::uint64_t reads = 0;
  while (std::getline(rep, line))
    if (line.rfind("model_mem_reads: ", 0) == 0)
      reads = std::stoull(line.substr(17));
  CHECK(reads > 0);
  std::ifstream csv(out + "/sim_trace.csv");
  std::uint64_t rows = 0;
  bool saw_header = false;
  while (std::getline(csv, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line == "cycle,pe,job,block_index") {
      saw_header = true;
      continue;
    }
    ++rows;
  }
  CHECK(saw_header);
  CHECK(rows == reads);
}

TEST_CASE("one seed reproduces every artifact byte for byte") {
  const std::string a = run_pipeline("cli_det_a", "11");
  const std::string b = run_pipeline("cli_det_b", "11");
  for (const char* f :
       {"/manifest.csv", "/model.tkws", "/model.ogbcsr", "/schedule.txt",
        "/train_trace.txt", "/compress.txt"})
    CHECK(same_bytes(a + f, b + f));

  // Feature cache: same names, same bytes.
  std::vector<std::string> names_a;
  for (const auto& e : fs::directory_iterator(a + "/features"))
    names_a.push_back(e.path().filename().string());
  std::sort(names_a.begin(), names_a.end());
  CHECK(!names_a.empty());
  for (const std::string& n : names_a) {
    REQUIRE(fs::exists(b + "/features/" + n));
    CHECK(same_bytes(a + "/features/" + n, b + "/features/" + n));
  }
}

TEST_CASE("a zero-epoch model scores at chance on the balanced test split") {
  const std::string out = fresh_dir("cli_zero");
  const std::string cfg = out + "/cfg.txt";
  std::ofstream(cfg) << "ctm.clauses_per_class = 8\ntrain.epochs = 0\n";
  REQUIRE(run_cli({"prepare", "--data-root", env().data, "--out", out,
                   "--seed", "3", "--config", cfg}) == cli::kExitOk);
  REQUIRE(run_cli({"train", "--data-root", env().data, "--out", out,
                   "--seed", "3", "--config", cfg}) == cli::kExitOk);
  std::string text;
  CHECK(run_cli({"eval", "--data-root", env().data, "--out", out, "--config",
                 cfg}, &text) == cli::kExitOk);
  // All clauses are empty, so every clip falls to the tie-break class and
  // accuracy is exactly one class's share: 1/12.
  CHECK(text.find("accuracy: 0.0833") != std::string::npos);
}

TEST_CASE("each failure class has its own exit code") {
  const std::string out = fresh_dir("cli_fail");
  std::string text;

  CHECK(run_cli({"prepare", "--data-root", env().data, "--bogus"}, &text) ==
        cli::kExitUsage);
  CHECK(text.find("error: [usage]") != std::string::npos);
  CHECK(run_cli({}, &text) == cli::kExitUsage);
  CHECK(run_cli({"prepare"}, &text) == cli::kExitUsage);  // --data-root

  const std::string badcfg = out + "/bad.txt";
  std::ofstream(badcfg) << "nope.key = 1\n";
  CHECK(run_cli({"report", "--out", out, "--config", badcfg}, &text) ==
        cli::kExitConfig);
  CHECK(text.find("error: [config]") != std::string::npos);

  // simulate before schedule exists: the missing-input path.
  CHECK(run_cli({"simulate", "--data-root", env().data, "--out", out},
                &text) == cli::kExitMissingInput);
  CHECK(text.find("error: [missing-input]") != std::string::npos);
  CHECK(text.find("model.tkws") != std::string::npos);

  std::ofstream(out + "/model.ogbcsr") << "XXXXXXXXcorrupt";
  std::ofstream(out + "/model.tkws") << "YYYYYYYYcorrupt";
  CHECK(run_cli({"schedule", "--out", out}, &text) == cli::kExitFormat);
  CHECK(text.find("error: [format]") != std::string::npos);

  const std::string empty_root = fresh_dir("cli_fail_root");
  CHECK(run_cli({"prepare", "--data-root", empty_root, "--out", out},
                &text) == cli::kExitDataset);
  CHECK(text.find("error: [dataset]") != std::string::npos);

  CHECK(run_cli({"report", "--out", fresh_dir("cli_fail_empty")}, &text) ==
        cli::kExitMissingInput);
}

TEST_CASE("flag overrides land in the echoed config header") {
  const std::string out = run_pipeline("cli_flags", "5");
  REQUIRE(run_cli({"compress", "--out", out, "--config", env().cfg,
                   "--block-size", "8"}) == cli::kExitOk);
  std::ifstream is(out + "/compress.txt");
  std::stringstream buf;
  buf << is.rdbuf();
  CHECK(buf.str().find("# cfg compress.block_size = 8") != std::string::npos);
  CHECK(buf.str().find("block_size: 8") != std::string::npos);

  REQUIRE(run_cli({"schedule", "--out", out, "--seed", "5", "--config",
                   env().cfg, "--pes", "2"}) == cli::kExitOk);
  std::ifstream is2(out + "/schedule.txt");
  std::stringstream buf2;
  buf2 << is2.rdbuf();
  CHECK(buf2.str().find("# cfg schedule.num_pes = 2") != std::string::npos);
  CHECK(buf2.str().find("pes 2") != std::string::npos);
}

TEST_CASE("schedule rejects a compressed model from a different geometry") {
  const std::string out = run_pipeline("cli_mismatch", "9");
  ctm::ModelShape other;
  other.channels = 2;
  other.bins = 4;
  other.frames = 6;
  other.window = 2;
  other.classes = 2;
  other.clauses_per_class = 4;
  const std::string other_path = out + "/other.tkws";
  ctm::save_model(other_path, ctm::Model(other));
  std::string text;
  CHECK(run_cli({"schedule", "--out", out, "--model", other_path}, &text) ==
        cli::kExitFormat);
  CHECK(text.find("does not match") != std::string::npos);
}
