// tkws/ctm_model.h
#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "tkws/bitvec.h"
#include "tkws/config.h"

namespace tkws::ctm {

// Model geometry and hyperparameters. The clause kernel spans the full
// C x F spectral column and W consecutive frames, sliding along time with
// stride 1, so a feature map with T frames yields P = T - W + 1 windows.
struct ModelShape {
  int channels = 2;        // C
  int bins = 32;           // F
  int frames = 61;         // T_frames
  int window = 16;         // W
  int classes = 12;
  int clauses_per_class = 256;  // even, half positive polarity
  int n_states = 128;           // N; TA value in [1, 2N], include iff > N
  int threshold = 32;           // T, class-sum clamp
  double s = 5.0;               // specificity, > 1
  bool position_literals = false;

  int windows() const { return frames - window + 1; }

  // Window input count. With position literals on, a thermometer code of
  // the window index (P - 1 bits) is appended to each window.
  int inputs() const {
    const int base = channels * bins * window;
    return position_literals ? base + windows() - 1 : base;
  }
  int literals() const { return 2 * inputs(); }

  int clause_count() const { return classes * clauses_per_class; }

  void validate() const;

  static ModelShape from(const Config& cfg);

  bool operator==(const ModelShape&) const = default;
};

// Clause TA states, stored as value - 1 in a byte (valid while 2N <= 256).
// Clauses are class-major; within a class the first half has polarity +1.
class Model {
 public:
  Model() = default;
  explicit Model(const ModelShape& shape);

  const ModelShape& shape() const { return shape_; }

  int clause_index(int cls, int j) const {
    return cls * shape_.clauses_per_class + j;
  }
  int clause_class(int clause) const {
    return clause / shape_.clauses_per_class;
  }
  int polarity(int clause) const { return pol_[static_cast<std::size_t>(clause)]; }

  // TA value in [1, 2N].
  int state_value(int clause, int lit) const {
    return raw_[idx(clause, lit)] + 1;
  }
  void set_state_value(int clause, int lit, int value) {
    raw_[idx(clause, lit)] = static_cast<std::uint8_t>(value - 1);
  }
  bool include(int clause, int lit) const {
    return raw_[idx(clause, lit)] >= shape_.n_states;
  }

  // Saturating single-step updates. Return true when the include bit
  // flipped, so callers can keep compiled masks in sync.
  bool increment(int clause, int lit);
  bool decrement(int clause, int lit);

  const std::vector<std::uint8_t>& raw_states() const { return raw_; }
  std::vector<std::uint8_t>& raw_states() { return raw_; }

  bool operator==(const Model&) const = default;

 private:
  std::size_t idx(int clause, int lit) const {
    return static_cast<std::size_t>(clause) *
               static_cast<std::size_t>(shape_.literals()) +
           static_cast<std::size_t>(lit);
  }

  ModelShape shape_;
  std::vector<std::int8_t> pol_;
  std::vector<std::uint8_t> raw_;
};

// Include mask of one clause: bit i = 1 iff state value > N, length 2L.
BitVec clause_literals(const Model& model, int clause);

// Model file: magic "TKWSCTM1", version, then C, F, T_frames, W, classes,
// clauses_per_class, N, T as u32 and s as unsigned 16.16 fixed point. Body
// is one polarity byte (1 = +1, 0 = -1) plus 2L state bytes (value - 1) per
// clause, class-major. Whether position literals are enabled is recovered
// from the body length.
inline constexpr std::uint32_t kModelFileVersion = 1;

void write_model(std::ostream& os, const Model& model);
Model read_model(std::istream& is);

void save_model(const std::string& path, const Model& model);
Model load_model(const std::string& path);

}  // namespace tkws::ctm
