// tkws/feature_map.h
#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "tkws/bitvec.h"

namespace tkws::frontend {

// Binarized feature tensor of shape C (channels) x F (bins) x T (frames).
// Stored as one bit column per frame, bit index c*F + f, so a classifier
// window over frames [p, p+W) is the concatenation of W columns.
class BooleanFeatureMap {
 public:
  BooleanFeatureMap() = default;
  BooleanFeatureMap(int channels, int bins, int frames)
      : c_(channels), f_(bins), t_(frames),
        cols_(static_cast<std::size_t>(frames),
              BitVec(static_cast<std::size_t>(channels * bins))) {}

  int channels() const { return c_; }
  int bins() const { return f_; }
  int frames() const { return t_; }
  std::size_t column_bits() const {
    return static_cast<std::size_t>(c_) * static_cast<std::size_t>(f_);
  }

  bool bit(int c, int f, int t) const {
    return cols_[static_cast<std::size_t>(t)].get(
        static_cast<std::size_t>(c * f_ + f));
  }
  void set_bit(int c, int f, int t, bool v = true) {
    cols_[static_cast<std::size_t>(t)].set(
        static_cast<std::size_t>(c * f_ + f), v);
  }

  const BitVec& column(int t) const {
    return cols_[static_cast<std::size_t>(t)];
  }
  BitVec& column(int t) { return cols_[static_cast<std::size_t>(t)]; }

  bool operator==(const BooleanFeatureMap&) const = default;

 private:
  int c_ = 0;
  int f_ = 0;
  int t_ = 0;
  std::vector<BitVec> cols_;
};

// Feature cache file: magic "TKWSFEAT", version, C, F, T (u32 each), then
// one packed row of ceil(T/8) bytes per (channel, bin) pair in channel-major
// order; bit t of a row is bit (t % 8) of byte (t / 8).
inline constexpr std::uint32_t kFeatureFileVersion = 1;

void write_feature_map(std::ostream& os, const BooleanFeatureMap& map);
BooleanFeatureMap read_feature_map(std::istream& is);

void save_feature_map(const std::string& path, const BooleanFeatureMap& map);
BooleanFeatureMap load_feature_map(const std::string& path);

}  // namespace tkws::frontend
