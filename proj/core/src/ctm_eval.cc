// ctm_eval.cc
#include "tkws/ctm_eval.h"

#include <algorithm>

#include "tkws/error.h"

namespace tkws::ctm {
namespace {

int clamp_sum(int sum, int t) { return std::clamp(sum, -t, t); }

void check_dims(const ModelShape& shape,
                const frontend::BooleanFeatureMap& fmap) {
  if (fmap.channels() != shape.channels || fmap.bins() != shape.bins ||
      fmap.frames() != shape.frames)
    throw FormatError(cat("feature map ", fmap.channels(), "x", fmap.bins(),
                          "x", fmap.frames(), " does not fit model ",
                          shape.channels, "x", shape.bins, "x",
                          shape.frames));
}

int sum_for_class(const ModelShape& shape,
                  const std::vector<ClauseMasks>& masks,
                  const std::vector<int>& polarity,
                  const std::vector<BitVec>& windows, int cls) {
  int sum = 0;
  const int base = cls * shape.clauses_per_class;
  for (int j = 0; j < shape.clauses_per_class; ++j) {
    const int c = base + j;
    const ClauseMasks& m = masks[static_cast<std::size_t>(c)];
    if (m.empty) continue;  // inference: empty clause never votes
    for (const BitVec& w : windows) {
      if (eval_clause_window(m, w, EvalMode::kInference)) {
        sum += polarity[static_cast<std::size_t>(c)];
        break;
      }
    }
  }
  return clamp_sum(sum, shape.threshold);
}

}  // namespace

ClauseMasks compile_clause(const Model& model, int clause) {
  const int l = model.shape().inputs();
  ClauseMasks m;
  m.pos = BitVec(static_cast<std::size_t>(l));
  m.neg = BitVec(static_cast<std::size_t>(l));
  for (int i = 0; i < l; ++i) {
    if (model.include(clause, i)) m.pos.set(static_cast<std::size_t>(i));
    if (model.include(clause, l + i)) m.neg.set(static_cast<std::size_t>(i));
  }
  m.empty = m.pos.none() && m.neg.none();
  return m;
}

std::vector<BitVec> assemble_windows(const ModelShape& shape,
                                     const frontend::BooleanFeatureMap& fmap) {
  check_dims(shape, fmap);
  const int p_count = shape.windows();
  const int col_bits = shape.channels * shape.bins;
  const int l = shape.inputs();
  std::vector<BitVec> windows(static_cast<std::size_t>(p_count),
                              BitVec(static_cast<std::size_t>(l)));
  for (int p = 0; p < p_count; ++p) {
    BitVec& w = windows[static_cast<std::size_t>(p)];
    for (int dw = 0; dw < shape.window; ++dw) {
      const BitVec& col = fmap.column(p + dw);
      for (int b = 0; b < col_bits; b += 64) {
        const int n = std::min(64, col_bits - b);
        w.set_slice64(static_cast<std::size_t>(dw * col_bits + b), n,
                      col.slice64(static_cast<std::size_t>(b), n));
      }
    }
    if (shape.position_literals) {
      const int base = shape.window * col_bits;
      for (int q = 0; q < p; ++q)
        w.set(static_cast<std::size_t>(base + q));
    }
  }
  return windows;
}

bool eval_clause_window(const ClauseMasks& masks, const BitVec& window,
                        EvalMode mode) {
  if (masks.empty) return mode == EvalMode::kTraining;
  return masks.pos.subset_of(window) && !masks.neg.intersects(window);
}

ClauseEval eval_clause_conv(const Model& model, int clause,
                            const frontend::BooleanFeatureMap& fmap,
                            EvalMode mode) {
  const ClauseMasks masks = compile_clause(model, clause);
  const std::vector<BitVec> windows = assemble_windows(model.shape(), fmap);
  ClauseEval ev;
  ev.windows = BitVec(windows.size());
  for (std::size_t p = 0; p < windows.size(); ++p) {
    if (eval_clause_window(masks, windows[p], mode)) {
      ev.windows.set(p);
      ev.matched = true;
    }
  }
  return ev;
}

int class_sum(const Model& model, const frontend::BooleanFeatureMap& fmap,
              int cls) {
  return class_sums(model, fmap)[static_cast<std::size_t>(cls)];
}

std::vector<int> class_sums(const Model& model,
                            const frontend::BooleanFeatureMap& fmap) {
  return CompiledModel(model).class_sums(fmap);
}

int predict(const Model& model, const frontend::BooleanFeatureMap& fmap) {
  return argmax_class(class_sums(model, fmap));
}

int argmax_class(const std::vector<int>& sums) {
  int best = 0;
  for (std::size_t k = 1; k < sums.size(); ++k)
    if (sums[k] > sums[static_cast<std::size_t>(best)])
      best = static_cast<int>(k);
  return best;
}

CompiledModel::CompiledModel(const Model& model) : shape_(model.shape()) {
  const int n = shape_.clause_count();
  polarity_.resize(static_cast<std::size_t>(n));
  masks_.reserve(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) {
    polarity_[static_cast<std::size_t>(c)] = model.polarity(c);
    masks_.push_back(compile_clause(model, c));
  }
}

std::vector<int> CompiledModel::class_sums(
    const frontend::BooleanFeatureMap& fmap) const {
  const std::vector<BitVec> windows = assemble_windows(shape_, fmap);
  std::vector<int> sums(static_cast<std::size_t>(shape_.classes));
  for (int k = 0; k < shape_.classes; ++k)
    sums[static_cast<std::size_t>(k)] =
        sum_for_class(shape_, masks_, polarity_, windows, k);
  return sums;
}

int CompiledModel::predict(const frontend::BooleanFeatureMap& fmap) const {
  return argmax_class(class_sums(fmap));
}

}  // namespace tkws::ctm
