// tests/support/fixtures.cc
#include "support/fixtures.h"

#include "tkws/rng.h"

namespace tkws::testsupport {

using ctm::LabeledMap;
using ctm::Model;
using ctm::ModelShape;
using frontend::BooleanFeatureMap;

BooleanFeatureMap random_fmap(const ModelShape& shape, std::uint64_t seed,
                              double density) {
  Rng rng(seed);
  BooleanFeatureMap fmap(shape.channels, shape.bins, shape.frames);
  for (int c = 0; c < shape.channels; ++c)
    for (int f = 0; f < shape.bins; ++f)
      for (int t = 0; t < shape.frames; ++t)
        if (rng.bernoulli(density)) fmap.set_bit(c, f, t);
  return fmap;
}

Model random_model(const ModelShape& shape, std::uint64_t seed,
                   double include_density) {
  Rng rng(seed);
  Model model(shape);
  const int n = shape.n_states;
  for (int c = 0; c < shape.clause_count(); ++c) {
    for (int i = 0; i < shape.literals(); ++i) {
      const int value =
          rng.bernoulli(include_density)
              ? n + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)))
              : 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      model.set_state_value(c, i, value);
    }
  }
  return model;
}

ModelShape tiny_shape() {
  ModelShape sh;
  sh.channels = 1;
  sh.bins = 4;
  sh.frames = 6;
  sh.window = 2;
  sh.classes = 3;
  sh.clauses_per_class = 4;
  sh.n_states = 128;
  sh.threshold = 4;
  sh.s = 3.0;
  return sh;
}

ToyTask make_toy_task(std::uint64_t seed, int train_per_class,
                      int test_per_class) {
  ToyTask task;
  ModelShape& sh = task.shape;
  sh.channels = 2;
  sh.bins = 4;
  sh.frames = 8;
  sh.window = 2;
  sh.classes = 2;
  sh.clauses_per_class = 10;
  sh.threshold = 4;
  sh.s = 3.0;

  Rng rng(seed);
  auto make = [&](int label) {
    BooleanFeatureMap fmap(sh.channels, sh.bins, sh.frames);
    for (int c = 0; c < sh.channels; ++c)
      for (int f = 0; f < sh.bins; ++f)
        for (int t = 0; t < sh.frames; ++t) {
          const bool band = c == 0 && f < 2;
          const bool bit = band ? label == 0 : rng.bernoulli(0.5);
          if (bit) fmap.set_bit(c, f, t);
        }
    return LabeledMap{std::move(fmap), label};
  };
  for (int label = 0; label < 2; ++label) {
    for (int i = 0; i < train_per_class; ++i) task.train.push_back(make(label));
    for (int i = 0; i < test_per_class; ++i) task.test.push_back(make(label));
  }
  return task;
}

}  // namespace tkws::testsupport
