// tkws/ctm_train.h
#pragma once

#include <vector>

#include "tkws/ctm_eval.h"
#include "tkws/ctm_model.h"
#include "tkws/feature_map.h"
#include "tkws/rng.h"

namespace tkws::ctm {

struct LabeledMap {
  frontend::BooleanFeatureMap fmap;
  int label = 0;
};

// Feedback driver. Keeps every clause's masks compiled and patches them
// when a TA state crosses the include boundary, so repeated steps avoid
// recompiling the whole model.
//
// One step consumes randomness in a fixed order (negative class, then one
// decision draw per clause of the target class followed by its feedback
// draws, then the same for the negative class), so a fixed seed gives a
// bit-identical model regardless of platform.
class Trainer {
 public:
  explicit Trainer(Model& model);

  void step(const frontend::BooleanFeatureMap& fmap, int label, Rng& rng);

  const ClauseMasks& masks(int clause) const {
    return masks_[static_cast<std::size_t>(clause)];
  }

 private:
  // Clause votes and matched windows for one class against fixed windows.
  struct ClassEval {
    int clamped_sum = 0;
    std::vector<BitVec> matched;  // training-mode matched windows per clause
  };

  ClassEval eval_class(const std::vector<BitVec>& windows, int cls) const;
  void type_i(int clause, const std::vector<BitVec>& windows,
              const BitVec& matched, Rng& rng);
  void type_ii(int clause, const std::vector<BitVec>& windows,
               const BitVec& matched, Rng& rng);
  void bump(int clause, int lit, bool up);

  Model& model_;
  std::vector<ClauseMasks> masks_;
};

// Single-step convenience wrapper around Trainer.
void train_step(Model& model, const frontend::BooleanFeatureMap& fmap,
                int label, Rng& rng);

struct TrainTrace {
  std::vector<double> train_accuracy;  // after each epoch
  std::vector<double> eval_accuracy;   // empty when no eval set given
};

// Runs `epochs` shuffled passes of train_step and scores accuracy after
// each. Throws DatasetError on an empty training set.
TrainTrace train(Model& model, const std::vector<LabeledMap>& train_set,
                 const std::vector<LabeledMap>& eval_set, int epochs,
                 Rng& rng);

// Fraction of samples the model classifies correctly (parallel over
// samples; reduction is order-independent).
double accuracy(const Model& model, const std::vector<LabeledMap>& samples);
double accuracy(const CompiledModel& compiled,
                const std::vector<LabeledMap>& samples);

}  // namespace tkws::ctm
