// feature_map.cc
#include "tkws/feature_map.h"

#include "tkws/binio.h"
#include "tkws/error.h"

namespace tkws::frontend {

void write_feature_map(std::ostream& os, const BooleanFeatureMap& map) {
  write_magic(os, "TKWSFEAT");
  write_u32(os, kFeatureFileVersion);
  write_u32(os, static_cast<std::uint32_t>(map.channels()));
  write_u32(os, static_cast<std::uint32_t>(map.bins()));
  write_u32(os, static_cast<std::uint32_t>(map.frames()));
  const int row_bytes = (map.frames() + 7) / 8;
  std::vector<std::uint8_t> row(static_cast<std::size_t>(row_bytes));
  for (int c = 0; c < map.channels(); ++c) {
    for (int f = 0; f < map.bins(); ++f) {
      std::fill(row.begin(), row.end(), 0);
      for (int t = 0; t < map.frames(); ++t)
        if (map.bit(c, f, t)) row[t >> 3] |= std::uint8_t(1u << (t & 7));
      write_bytes(os, row.data(), row.size());
    }
  }
}

BooleanFeatureMap read_feature_map(std::istream& is) {
  expect_magic(is, "TKWSFEAT", "feature file");
  const std::uint32_t version = read_u32(is, "feature file version");
  if (version != kFeatureFileVersion)
    throw FormatError(cat("unsupported feature file version ", version));
  const std::uint32_t c = read_u32(is, "channel count");
  const std::uint32_t f = read_u32(is, "bin count");
  const std::uint32_t t = read_u32(is, "frame count");
  if (c == 0 || f == 0 || t == 0 || c > 16 || f > 4096 || t > 1 << 20)
    throw FormatError(cat("implausible feature dims ", c, "x", f, "x", t));
  BooleanFeatureMap map(static_cast<int>(c), static_cast<int>(f),
                        static_cast<int>(t));
  const std::size_t row_bytes = (t + 7) / 8;
  std::vector<std::uint8_t> row(row_bytes);
  for (std::uint32_t ci = 0; ci < c; ++ci) {
    for (std::uint32_t fi = 0; fi < f; ++fi) {
      read_bytes(is, row.data(), row.size(), "feature row");
      for (std::uint32_t ti = 0; ti < t; ++ti)
        if ((row[ti >> 3] >> (ti & 7)) & 1)
          map.set_bit(static_cast<int>(ci), static_cast<int>(fi),
                      static_cast<int>(ti));
    }
  }
  return map;
}

void save_feature_map(const std::string& path, const BooleanFeatureMap& map) {
  std::ofstream os = open_output(path);
  write_feature_map(os, map);
}

BooleanFeatureMap load_feature_map(const std::string& path) {
  std::ifstream is = open_input(path);
  return read_feature_map(is);
}

}  // namespace tkws::frontend
