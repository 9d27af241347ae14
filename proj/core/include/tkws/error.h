// tkws/error.h
#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace tkws {

// Builds a message from stream-printable pieces.
template <class... Args>
std::string cat(Args&&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

// Base class for all recoverable tkws failures. The CLI maps each subclass
// to a distinct exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Missing or unreadable files, failed writes.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed artifact contents: bad magic, truncation, inconsistent fields.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Bad configuration keys or values, invalid parameter combinations.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Dataset layout problems: missing split lists, empty classes.
class DatasetError : public Error {
 public:
  using Error::Error;
};

}  // namespace tkws
