// config.cc
#include "tkws/config.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tkws/error.h"

namespace tkws {
namespace {

const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> kv = {
      // Frontend frame geometry (16 kHz input, 1 s clips).
      {"frontend.frame_len", "512"},
      {"frontend.hop", "256"},
      {"frontend.fft", "512"},
      {"frontend.mel_bins", "32"},
      {"frontend.fmin_hz", "60"},
      {"frontend.fmax_hz", "7600"},
      // Streaming binarization threshold smoothing.
      {"frontend.alpha", "0.0625"},
      // Classifier shape and training constants.
      {"ctm.classes", "12"},
      {"ctm.clauses_per_class", "256"},
      {"ctm.window", "16"},
      {"ctm.threshold", "32"},
      {"ctm.s", "5.0"},
      {"ctm.n_states", "128"},
      {"ctm.position_literals", "false"},
      {"train.epochs", "30"},
      // Compressed model layout.
      {"compress.block_size", "16"},
      // PE scheduling and annealing. t_initial 0 means "derive from the
      // greedy makespan".
      {"schedule.num_pes", "8"},
      {"schedule.t_initial", "0"},
      {"schedule.cooling", "0.95"},
      {"schedule.iters_per_temp", "200"},
      {"schedule.t_final", "0.001"},
      // Performance model timing constants.
      {"accel.job_overhead_cycles", "2"},
  };
  return kv;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config::Config() : kv_(defaults()) {}

void Config::load_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError(cat("cannot open config file: ", path));
  std::ostringstream buf;
  buf << is.rdbuf();
  load_text(buf.str(), path);
}

void Config::load_text(const std::string& text, const std::string& origin) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(
          cat(origin, ":", lineno, ": expected 'key = value', got \"", line,
              "\""));
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void Config::set(const std::string& key, const std::string& value) {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw ConfigError(cat("unknown config key: ", key));
  it->second = value;
}

bool Config::has(const std::string& key) const { return kv_.count(key) != 0; }

std::int64_t Config::get_int(const std::string& key) const {
  const std::string& v = get_string(key);
  char* end = nullptr;
  const long long n = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError(cat("config key ", key, ": \"", v,
                          "\" is not an integer"));
  return n;
}

double Config::get_double(const std::string& key) const {
  const std::string& v = get_string(key);
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError(cat("config key ", key, ": \"", v,
                          "\" is not a number"));
  return d;
}

bool Config::get_bool(const std::string& key) const {
  const std::string& v = get_string(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(cat("config key ", key, ": \"", v,
                        "\" is not a boolean (true/false/1/0)"));
}

const std::string& Config::get_string(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw ConfigError(cat("unknown config key: ", key));
  return it->second;
}

std::string Config::dump() const {
  std::ostringstream os;
  for (const auto& [k, v] : kv_) os << k << " = " << v << "\n";
  return os.str();
}

}  // namespace tkws
