// tkws/binio.h
#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "tkws/error.h"

namespace tkws {

// Little-endian scalar IO. All binary artifact formats use these helpers so
// files are byte-identical across hosts.

inline void write_bytes(std::ostream& os, const void* p, std::size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  if (!os) throw IoError("short write to output stream");
}

inline void read_bytes(std::istream& is, void* p, std::size_t n,
                       const char* what) {
  is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n)
    throw FormatError(cat("truncated input while reading ", what));
}

inline void write_u8(std::ostream& os, std::uint8_t v) {
  write_bytes(os, &v, 1);
}
inline void write_u16(std::ostream& os, std::uint16_t v) {
  std::uint8_t b[2] = {static_cast<std::uint8_t>(v),
                       static_cast<std::uint8_t>(v >> 8)};
  write_bytes(os, b, 2);
}
inline void write_u32(std::ostream& os, std::uint32_t v) {
  std::uint8_t b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
  write_bytes(os, b, 4);
}
inline void write_u64(std::ostream& os, std::uint64_t v) {
  std::uint8_t b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
  write_bytes(os, b, 8);
}
inline void write_i32(std::ostream& os, std::int32_t v) {
  write_u32(os, static_cast<std::uint32_t>(v));
}

inline std::uint8_t read_u8(std::istream& is, const char* what) {
  std::uint8_t v;
  read_bytes(is, &v, 1, what);
  return v;
}
inline std::uint16_t read_u16(std::istream& is, const char* what) {
  std::uint8_t b[2];
  read_bytes(is, b, 2, what);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}
inline std::uint32_t read_u32(std::istream& is, const char* what) {
  std::uint8_t b[4];
  read_bytes(is, b, 4, what);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}
inline std::uint64_t read_u64(std::istream& is, const char* what) {
  std::uint8_t b[8];
  read_bytes(is, b, 8, what);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}
inline std::int32_t read_i32(std::istream& is, const char* what) {
  return static_cast<std::int32_t>(read_u32(is, what));
}

// Magic tags are exactly 8 ASCII bytes, written verbatim.
inline void write_magic(std::ostream& os, const char (&magic)[9]) {
  write_bytes(os, magic, 8);
}

inline void expect_magic(std::istream& is, const char (&magic)[9],
                         const char* what) {
  char got[8];
  read_bytes(is, got, 8, what);
  if (std::memcmp(got, magic, 8) != 0)
    throw FormatError(cat("bad magic for ", what, ": expected \"", magic,
                          "\", got \"", std::string(got, 8), "\""));
}

inline std::ofstream open_output(const std::string& path,
                                 std::ios::openmode mode = std::ios::binary) {
  std::ofstream os(path, mode);
  if (!os) throw IoError(cat("cannot open for writing: ", path));
  return os;
}

inline std::ifstream open_input(const std::string& path,
                                std::ios::openmode mode = std::ios::binary) {
  std::ifstream is(path, mode);
  if (!is) throw IoError(cat("cannot open for reading: ", path));
  return is;
}

inline std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream is = open_input(path);
  is.seekg(0, std::ios::end);
  const auto len = static_cast<std::size_t>(is.tellg());
  is.seekg(0, std::ios::beg);
  std::vector<std::uint8_t> buf(len);
  if (len) read_bytes(is, buf.data(), len, path.c_str());
  return buf;
}

}  // namespace tkws
