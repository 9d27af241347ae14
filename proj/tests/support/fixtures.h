// tests/support/fixtures.h
#pragma once

#include <cstdint>
#include <vector>

#include "tkws/ctm_model.h"
#include "tkws/ctm_train.h"
#include "tkws/feature_map.h"

namespace tkws::testsupport {

// Feature map with i.i.d. bits at the given density.
frontend::BooleanFeatureMap random_fmap(const ctm::ModelShape& shape,
                                        std::uint64_t seed,
                                        double density = 0.5);

// Model with random TA states; each literal is included with probability
// include_density, and state values stay uniform within the chosen side of
// the include boundary.
ctm::Model random_model(const ctm::ModelShape& shape, std::uint64_t seed,
                        double include_density = 0.1);

// Small geometry used across unit tests: 1x4 bins, 6 frames, width 2.
ctm::ModelShape tiny_shape();

// Two-class Boolean toy task: class 0 carries an all-ones band in the first
// feature rows, class 1 an all-zeros band, everything else is coin-flip
// noise. Linearly separable, so training must saturate quickly.
struct ToyTask {
  ctm::ModelShape shape;
  std::vector<ctm::LabeledMap> train;
  std::vector<ctm::LabeledMap> test;
};
ToyTask make_toy_task(std::uint64_t seed, int train_per_class = 20,
                      int test_per_class = 10);

}  // namespace tkws::testsupport
