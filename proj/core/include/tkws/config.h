// tkws/config.h
#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace tkws {

// Flat key=value configuration shared by every pipeline stage. All keys are
// registered with defaults up front; a config file or a CLI flag may only
// override known keys, so typos fail loudly instead of silently using a
// default.
class Config {
 public:
  // Constructs with every known key at its default value.
  Config();

  // Merges "key = value" lines from a file. '#' starts a comment, blank
  // lines are ignored. Unknown keys raise ConfigError.
  void load_file(const std::string& path);

  // Parses config text directly (same grammar as load_file).
  void load_text(const std::string& text, const std::string& origin);

  // Overrides one key, e.g. from a command-line flag.
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;

  // Typed getters. Throw ConfigError when the stored text does not parse or
  // is out of the documented range for that type.
  std::int64_t get_int(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  const std::string& get_string(const std::string& key) const;

  // Canonical "key = value" lines, sorted by key. Artifact writers echo this
  // into textual outputs so every result records the settings behind it.
  std::string dump() const;

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace tkws
