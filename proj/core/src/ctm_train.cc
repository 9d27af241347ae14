// ctm_train.cc
#include "tkws/ctm_train.h"

#include <algorithm>
#include <future>
#include <numeric>
#include <thread>

#include "tkws/error.h"

namespace tkws::ctm {
namespace {

// Index of the k-th set bit (k counts from 0).
std::size_t nth_set_bit(const BitVec& v, std::size_t k) {
  std::size_t seen = 0, found = v.size();
  v.for_each_set([&](std::size_t i) {
    if (seen++ == k && found == v.size()) found = i;
  });
  return found;
}

}  // namespace

Trainer::Trainer(Model& model) : model_(model) {
  const int n = model_.shape().clause_count();
  masks_.reserve(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) masks_.push_back(compile_clause(model_, c));
}

Trainer::ClassEval Trainer::eval_class(const std::vector<BitVec>& windows,
                                       int cls) const {
  const ModelShape& sh = model_.shape();
  ClassEval ev;
  ev.matched.reserve(static_cast<std::size_t>(sh.clauses_per_class));
  int sum = 0;
  for (int j = 0; j < sh.clauses_per_class; ++j) {
    const int c = model_.clause_index(cls, j);
    const ClauseMasks& m = masks_[static_cast<std::size_t>(c)];
    BitVec hits(windows.size());
    bool any = false;
    if (m.empty) {
      // Training convention: an empty clause matches every window. It still
      // contributes no inference vote.
      for (std::size_t p = 0; p < windows.size(); ++p) hits.set(p);
    } else {
      for (std::size_t p = 0; p < windows.size(); ++p) {
        if (m.pos.subset_of(windows[p]) && !m.neg.intersects(windows[p])) {
          hits.set(p);
          any = true;
        }
      }
      if (any) sum += model_.polarity(c);
    }
    ev.matched.push_back(std::move(hits));
  }
  ev.clamped_sum = std::clamp(sum, -sh.threshold, sh.threshold);
  return ev;
}

void Trainer::bump(int clause, int lit, bool up) {
  const bool flipped = up ? model_.increment(clause, lit)
                          : model_.decrement(clause, lit);
  if (!flipped) return;
  const int l = model_.shape().inputs();
  ClauseMasks& m = masks_[static_cast<std::size_t>(clause)];
  BitVec& half = lit < l ? m.pos : m.neg;
  half.set(static_cast<std::size_t>(lit < l ? lit : lit - l), up);
  m.empty = m.pos.none() && m.neg.none();
}

void Trainer::type_i(int clause, const std::vector<BitVec>& windows,
                     const BitVec& matched, Rng& rng) {
  const ModelShape& sh = model_.shape();
  const int l = sh.inputs();
  const double inv_s = 1.0 / sh.s;
  const std::size_t hits = matched.popcount();
  if (hits == 0) {
    // Unmatched clause: erosion only.
    for (int i = 0; i < 2 * l; ++i)
      if (rng.unit() < inv_s) bump(clause, i, false);
    return;
  }
  const BitVec& w =
      windows[nth_set_bit(matched, static_cast<std::size_t>(rng.below(hits)))];
  // One draw per literal, in literal order: true literals are reinforced
  // with probability (s-1)/s, false ones eroded with probability 1/s.
  for (int i = 0; i < 2 * l; ++i) {
    const bool value = i < l ? w.get(static_cast<std::size_t>(i))
                             : !w.get(static_cast<std::size_t>(i - l));
    const double u = rng.unit();
    if (value) {
      if (u < 1.0 - inv_s) bump(clause, i, true);
    } else {
      if (u < inv_s) bump(clause, i, false);
    }
  }
}

void Trainer::type_ii(int clause, const std::vector<BitVec>& windows,
                      const BitVec& matched, Rng& rng) {
  const std::size_t hits = matched.popcount();
  if (hits == 0) return;
  const int l = model_.shape().inputs();
  const BitVec& w =
      windows[nth_set_bit(matched, static_cast<std::size_t>(rng.below(hits)))];
  // Push every excluded literal that is false in this window one step
  // toward inclusion; once included it falsifies the clause here.
  for (int i = 0; i < 2 * l; ++i) {
    const bool value = i < l ? w.get(static_cast<std::size_t>(i))
                             : !w.get(static_cast<std::size_t>(i - l));
    if (!value && !model_.include(clause, i)) bump(clause, i, true);
  }
}

void Trainer::step(const frontend::BooleanFeatureMap& fmap, int label,
                   Rng& rng) {
  const ModelShape& sh = model_.shape();
  if (label < 0 || label >= sh.classes)
    throw Error(cat("label ", label, " out of range [0, ", sh.classes, ")"));
  const std::vector<BitVec> windows = assemble_windows(sh, fmap);

  int negative = label;
  if (sh.classes > 1) {
    const int r = static_cast<int>(
        rng.below(static_cast<std::uint64_t>(sh.classes - 1)));
    negative = r >= label ? r + 1 : r;
  }

  const ClassEval target = eval_class(windows, label);
  const ClassEval other = eval_class(windows, negative);
  const double t = sh.threshold;

  // Target class: positive clauses learn the pattern, negative clauses get
  // suppressed.
  const double p_target = (t - target.clamped_sum) / (2.0 * t);
  for (int j = 0; j < sh.clauses_per_class; ++j) {
    const int c = model_.clause_index(label, j);
    if (rng.unit() >= p_target) continue;
    if (model_.polarity(c) > 0)
      type_i(c, windows, target.matched[static_cast<std::size_t>(j)], rng);
    else
      type_ii(c, windows, target.matched[static_cast<std::size_t>(j)], rng);
  }

  if (negative == label) return;  // single-class degenerate case
  const double p_other = (t + other.clamped_sum) / (2.0 * t);
  for (int j = 0; j < sh.clauses_per_class; ++j) {
    const int c = model_.clause_index(negative, j);
    if (rng.unit() >= p_other) continue;
    if (model_.polarity(c) > 0)
      type_ii(c, windows, other.matched[static_cast<std::size_t>(j)], rng);
    else
      type_i(c, windows, other.matched[static_cast<std::size_t>(j)], rng);
  }
}

void train_step(Model& model, const frontend::BooleanFeatureMap& fmap,
                int label, Rng& rng) {
  Trainer trainer(model);
  trainer.step(fmap, label, rng);
}

double accuracy(const CompiledModel& compiled,
                const std::vector<LabeledMap>& samples) {
  if (samples.empty()) return 0.0;
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()),
                            samples.size());
  std::vector<std::future<std::size_t>> parts;
  const std::size_t chunk = (samples.size() + workers - 1) / workers;
  for (std::size_t begin = 0; begin < samples.size(); begin += chunk) {
    const std::size_t end = std::min(begin + chunk, samples.size());
    parts.push_back(std::async(std::launch::async, [&, begin, end] {
      std::size_t ok = 0;
      for (std::size_t i = begin; i < end; ++i)
        if (compiled.predict(samples[i].fmap) == samples[i].label) ++ok;
      return ok;
    }));
  }
  std::size_t correct = 0;
  for (auto& p : parts) correct += p.get();
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

double accuracy(const Model& model, const std::vector<LabeledMap>& samples) {
  return accuracy(CompiledModel(model), samples);
}

TrainTrace train(Model& model, const std::vector<LabeledMap>& train_set,
                 const std::vector<LabeledMap>& eval_set, int epochs,
                 Rng& rng) {
  if (train_set.empty()) throw DatasetError("training set is empty");
  TrainTrace trace;
  Trainer trainer(model);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  for (int e = 0; e < epochs; ++e) {
    rng.shuffle(order);
    for (std::size_t i : order)
      trainer.step(train_set[i].fmap, train_set[i].label, rng);
    const CompiledModel compiled(model);
    trace.train_accuracy.push_back(accuracy(compiled, train_set));
    if (!eval_set.empty())
      trace.eval_accuracy.push_back(accuracy(compiled, eval_set));
  }
  return trace;
}

}  // namespace tkws::ctm
