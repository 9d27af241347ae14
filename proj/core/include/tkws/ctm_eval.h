// tkws/ctm_eval.h
#pragma once

#include <vector>

#include "tkws/bitvec.h"
#include "tkws/ctm_model.h"
#include "tkws/feature_map.h"

namespace tkws::ctm {

// An empty clause (no includes) matches everything while training and
// nothing at inference, so dead clauses cannot vote on real inputs.
enum class EvalMode { kInference, kTraining };

// Include mask split by literal sign: pos bit j covers literal j (the input
// itself), neg bit j covers literal L + j (its negation). A window x of L
// input bits satisfies the clause iff pos is a subset of x and neg misses x.
struct ClauseMasks {
  BitVec pos;
  BitVec neg;
  bool empty = true;
};

ClauseMasks compile_clause(const Model& model, int clause);

// All P windows of the feature map as L-bit vectors. Window p concatenates
// frame columns p .. p+W-1 (input index dw*C*F + c*F + f), then the optional
// thermometer code of p.
std::vector<BitVec> assemble_windows(const ModelShape& shape,
                                     const frontend::BooleanFeatureMap& fmap);

bool eval_clause_window(const ClauseMasks& masks, const BitVec& window,
                        EvalMode mode);

struct ClauseEval {
  bool matched = false;
  BitVec windows;  // P bits, bit p = clause matched at position p
};

ClauseEval eval_clause_conv(const Model& model, int clause,
                            const frontend::BooleanFeatureMap& fmap,
                            EvalMode mode);

// Inference-mode clause votes for one class, clamped to [-T, T].
int class_sum(const Model& model, const frontend::BooleanFeatureMap& fmap,
              int cls);

std::vector<int> class_sums(const Model& model,
                            const frontend::BooleanFeatureMap& fmap);

// Argmax of clamped class sums, ties to the lowest index.
int predict(const Model& model, const frontend::BooleanFeatureMap& fmap);

int argmax_class(const std::vector<int>& sums);

// Precompiled clause masks for repeated inference with a fixed model.
class CompiledModel {
 public:
  explicit CompiledModel(const Model& model);

  const ModelShape& shape() const { return shape_; }
  const ClauseMasks& masks(int clause) const {
    return masks_[static_cast<std::size_t>(clause)];
  }

  std::vector<int> class_sums(const frontend::BooleanFeatureMap& fmap) const;
  int predict(const frontend::BooleanFeatureMap& fmap) const;

 private:
  ModelShape shape_;
  std::vector<int> polarity_;
  std::vector<ClauseMasks> masks_;
};

}  // namespace tkws::ctm
