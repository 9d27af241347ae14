// ctm_model.cc
#include "tkws/ctm_model.h"

#include <cmath>

#include "tkws/binio.h"
#include "tkws/error.h"

namespace tkws::ctm {

void ModelShape::validate() const {
  if (channels < 1 || bins < 1 || frames < 1)
    throw ConfigError(cat("bad feature dims ", channels, "x", bins, "x",
                          frames));
  if (window < 1 || window > frames)
    throw ConfigError(cat("kernel width ", window,
                          " must be in [1, frames=", frames, "]"));
  if (classes < 1) throw ConfigError("classes must be >= 1");
  if (clauses_per_class < 0 || clauses_per_class % 2 != 0)
    throw ConfigError(cat("clauses_per_class ", clauses_per_class,
                          " must be even and >= 0"));
  if (n_states < 1 || 2 * n_states > 256)
    throw ConfigError(cat("n_states ", n_states,
                          " must be in [1, 128] for byte-backed states"));
  if (threshold < 1) throw ConfigError("threshold must be >= 1");
  if (!(s > 1.0)) throw ConfigError(cat("specificity s = ", s,
                                        " must be > 1"));
}

ModelShape ModelShape::from(const Config& cfg) {
  ModelShape sh;
  sh.channels = 2;
  sh.bins = static_cast<int>(cfg.get_int("frontend.mel_bins"));
  sh.classes = static_cast<int>(cfg.get_int("ctm.classes"));
  sh.clauses_per_class = static_cast<int>(cfg.get_int("ctm.clauses_per_class"));
  sh.window = static_cast<int>(cfg.get_int("ctm.window"));
  sh.threshold = static_cast<int>(cfg.get_int("ctm.threshold"));
  sh.s = cfg.get_double("ctm.s");
  sh.n_states = static_cast<int>(cfg.get_int("ctm.n_states"));
  sh.position_literals = cfg.get_bool("ctm.position_literals");
  return sh;
}

Model::Model(const ModelShape& shape) : shape_(shape) {
  shape_.validate();
  const int n = shape_.clause_count();
  pol_.resize(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c)
    pol_[static_cast<std::size_t>(c)] =
        (c % shape_.clauses_per_class) < shape_.clauses_per_class / 2 ? 1 : -1;
  // All states start at value N: every literal excluded, one step away from
  // inclusion.
  raw_.assign(static_cast<std::size_t>(n) *
                  static_cast<std::size_t>(shape_.literals()),
              static_cast<std::uint8_t>(shape_.n_states - 1));
}

bool Model::increment(int clause, int lit) {
  std::uint8_t& r = raw_[idx(clause, lit)];
  if (r + 1 >= 2 * shape_.n_states) return false;  // saturate at 2N
  ++r;
  return r == shape_.n_states;  // crossed N -> N+1: now included
}

bool Model::decrement(int clause, int lit) {
  std::uint8_t& r = raw_[idx(clause, lit)];
  if (r == 0) return false;  // saturate at 1
  --r;
  return r == shape_.n_states - 1;  // crossed N+1 -> N: now excluded
}

BitVec clause_literals(const Model& model, int clause) {
  const int n = model.shape().literals();
  BitVec mask(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    if (model.include(clause, i)) mask.set(static_cast<std::size_t>(i));
  return mask;
}

void write_model(std::ostream& os, const Model& model) {
  const ModelShape& sh = model.shape();
  write_magic(os, "TKWSCTM1");
  write_u32(os, kModelFileVersion);
  write_u32(os, static_cast<std::uint32_t>(sh.channels));
  write_u32(os, static_cast<std::uint32_t>(sh.bins));
  write_u32(os, static_cast<std::uint32_t>(sh.frames));
  write_u32(os, static_cast<std::uint32_t>(sh.window));
  write_u32(os, static_cast<std::uint32_t>(sh.classes));
  write_u32(os, static_cast<std::uint32_t>(sh.clauses_per_class));
  write_u32(os, static_cast<std::uint32_t>(sh.n_states));
  write_u32(os, static_cast<std::uint32_t>(sh.threshold));
  write_u32(os, static_cast<std::uint32_t>(std::llround(sh.s * 65536.0)));
  const int lits = sh.literals();
  for (int c = 0; c < sh.clause_count(); ++c) {
    write_u8(os, model.polarity(c) > 0 ? 1 : 0);
    write_bytes(os,
                model.raw_states().data() +
                    static_cast<std::size_t>(c) * static_cast<std::size_t>(lits),
                static_cast<std::size_t>(lits));
  }
}

Model read_model(std::istream& is) {
  expect_magic(is, "TKWSCTM1", "model file");
  const std::uint32_t version = read_u32(is, "model version");
  if (version != kModelFileVersion)
    throw FormatError(cat("unsupported model version ", version));
  ModelShape sh;
  sh.channels = static_cast<int>(read_u32(is, "channels"));
  sh.bins = static_cast<int>(read_u32(is, "bins"));
  sh.frames = static_cast<int>(read_u32(is, "frames"));
  sh.window = static_cast<int>(read_u32(is, "kernel width"));
  sh.classes = static_cast<int>(read_u32(is, "classes"));
  sh.clauses_per_class = static_cast<int>(read_u32(is, "clauses per class"));
  sh.n_states = static_cast<int>(read_u32(is, "state count"));
  sh.threshold = static_cast<int>(read_u32(is, "threshold"));
  sh.s = static_cast<double>(read_u32(is, "specificity")) / 65536.0;

  // The position-literal flag is not in the header; the two possible
  // per-clause byte sizes differ unless P == 1, so the body length decides.
  sh.position_literals = false;
  const std::streampos body_start = is.tellg();
  is.seekg(0, std::ios::end);
  const std::streamoff body_bytes = is.tellg() - body_start;
  is.seekg(body_start);
  sh.validate();
  const auto body_for = [&](bool flag) {
    ModelShape probe = sh;
    probe.position_literals = flag;
    return static_cast<std::streamoff>(probe.clause_count()) *
           (1 + static_cast<std::streamoff>(probe.literals()));
  };
  if (body_bytes == body_for(false)) {
    sh.position_literals = false;
  } else if (body_bytes == body_for(true)) {
    sh.position_literals = true;
  } else {
    throw FormatError(cat("model body is ", body_bytes,
                          " bytes; expected ", body_for(false), " or ",
                          body_for(true)));
  }

  Model model(sh);
  const int lits = sh.literals();
  std::vector<int> pos_count(static_cast<std::size_t>(sh.classes), 0);
  for (int c = 0; c < sh.clause_count(); ++c) {
    const std::uint8_t pol = read_u8(is, "clause polarity");
    if (pol > 1) throw FormatError(cat("bad polarity byte ", int{pol}));
    if (pol != (model.polarity(c) > 0 ? 1 : 0))
      throw FormatError(cat("clause ", c,
                            ": polarity layout must put positive clauses "
                            "first in each class"));
    if (pol) ++pos_count[static_cast<std::size_t>(model.clause_class(c))];
    auto* dst = model.raw_states().data() +
                static_cast<std::size_t>(c) * static_cast<std::size_t>(lits);
    read_bytes(is, dst, static_cast<std::size_t>(lits), "clause states");
    for (int i = 0; i < lits; ++i)
      if (dst[i] >= 2 * sh.n_states)
        throw FormatError(cat("clause ", c, " literal ", i,
                              ": state byte ", int{dst[i]},
                              " out of range for N = ", sh.n_states));
  }
  for (int k = 0; k < sh.classes; ++k)
    if (pos_count[static_cast<std::size_t>(k)] != sh.clauses_per_class / 2)
      throw FormatError(cat("class ", k, " polarity split is not half/half"));
  return model;
}

void save_model(const std::string& path, const Model& model) {
  std::ofstream os = open_output(path);
  write_model(os, model);
}

Model load_model(const std::string& path) {
  std::ifstream is = open_input(path);
  return read_model(is);
}

}  // namespace tkws::ctm
