// benchmarks/bench.cc
//
// Microbenchmarks for the hot paths: feature extraction, dense inference,
// compression, stream packing, PE scheduling and the sparse simulator.
// Self-contained seeded inputs so numbers are comparable across runs.

#include <benchmark/benchmark.h>

#include <cmath>

#include "tkws/accel.h"
#include "tkws/ctm_eval.h"
#include "tkws/ctm_model.h"
#include "tkws/frontend.h"
#include "tkws/ogbcsr.h"
#include "tkws/rng.h"
#include "tkws/sched.h"

namespace {

using namespace tkws;

ctm::ModelShape bench_shape() {
  ctm::ModelShape sh;
  sh.clauses_per_class = 64;
  return sh;
}

ctm::Model make_model(double include_density) {
  const ctm::ModelShape sh = bench_shape();
  ctm::Model model(sh);
  Rng rng(11);
  for (int c = 0; c < sh.clause_count(); ++c)
    for (int l = 0; l < sh.literals(); ++l)
      if (rng.unit() < include_density)
        model.set_state_value(c, l, 2 * sh.n_states);
  return model;
}

frontend::BooleanFeatureMap make_fmap() {
  const ctm::ModelShape sh = bench_shape();
  frontend::BooleanFeatureMap fmap(sh.channels, sh.bins, sh.frames);
  Rng rng(12);
  for (int t = 0; t < sh.frames; ++t)
    for (int c = 0; c < sh.channels; ++c)
      for (int f = 0; f < sh.bins; ++f)
        if (rng.unit() < 0.5) fmap.set_bit(c, f, t);
  return fmap;
}

frontend::AudioClip make_clip() {
  frontend::AudioClip clip;
  clip.samples.resize(frontend::kClipSamples);
  Rng rng(13);
  for (std::size_t i = 0; i < clip.samples.size(); ++i)
    clip.samples[i] =
        0.4 * std::sin(2.0 * M_PI * 440.0 * static_cast<double>(i) / 16000.0) +
        0.05 * (rng.unit() - 0.5);
  return clip;
}

void BM_ExtractFeatures(benchmark::State& state) {
  const frontend::AudioClip clip = make_clip();
  const frontend::FrameConfig fc;
  for (auto _ : state)
    benchmark::DoNotOptimize(frontend::extract_features(clip, fc, 0.0625));
}
BENCHMARK(BM_ExtractFeatures)->Unit(benchmark::kMillisecond);

void BM_DenseClassSums(benchmark::State& state) {
  const ctm::Model model = make_model(0.08);
  const frontend::BooleanFeatureMap fmap = make_fmap();
  for (auto _ : state)
    benchmark::DoNotOptimize(ctm::class_sums(model, fmap));
}
BENCHMARK(BM_DenseClassSums)->Unit(benchmark::kMillisecond);

void BM_CompiledClassSums(benchmark::State& state) {
  const ctm::Model model = make_model(0.08);
  const ctm::CompiledModel compiled(model);
  const frontend::BooleanFeatureMap fmap = make_fmap();
  for (auto _ : state)
    benchmark::DoNotOptimize(compiled.class_sums(fmap));
}
BENCHMARK(BM_CompiledClassSums)->Unit(benchmark::kMillisecond);

void BM_EncodeExact(benchmark::State& state) {
  const ctm::Model model = make_model(0.08);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        ogbcsr::encode(model, 16, ogbcsr::GroupingMode::kExact));
}
BENCHMARK(BM_EncodeExact)->Unit(benchmark::kMillisecond);

void BM_EncodeGreedy(benchmark::State& state) {
  const ctm::Model model = make_model(0.08);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        ogbcsr::encode(model, 16, ogbcsr::GroupingMode::kGreedy));
}
BENCHMARK(BM_EncodeGreedy)->Unit(benchmark::kMillisecond);

void BM_PackStream(benchmark::State& state) {
  const ogbcsr::OGBCSRModel compressed =
      ogbcsr::encode(make_model(0.08), 16, ogbcsr::GroupingMode::kExact);
  for (auto _ : state)
    benchmark::DoNotOptimize(ogbcsr::pack_stream(compressed));
}
BENCHMARK(BM_PackStream)->Unit(benchmark::kMicrosecond);

void BM_GreedyLpt(benchmark::State& state) {
  const ogbcsr::OGBCSRModel compressed =
      ogbcsr::encode(make_model(0.08), 16, ogbcsr::GroupingMode::kExact);
  const std::vector<sched::ClauseJob> jobs =
      sched::jobs_from(compressed, bench_shape().windows());
  for (auto _ : state)
    benchmark::DoNotOptimize(sched::greedy_lpt(jobs, 8));
}
BENCHMARK(BM_GreedyLpt)->Unit(benchmark::kMicrosecond);

void BM_Anneal(benchmark::State& state) {
  const ogbcsr::OGBCSRModel compressed =
      ogbcsr::encode(make_model(0.08), 16, ogbcsr::GroupingMode::kExact);
  const std::vector<sched::ClauseJob> jobs =
      sched::jobs_from(compressed, bench_shape().windows());
  sched::AnnealConfig cfg;
  cfg.seed = 14;
  for (auto _ : state)
    benchmark::DoNotOptimize(sched::anneal(jobs, 8, cfg));
}
BENCHMARK(BM_Anneal)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  const ctm::Model model = make_model(0.08);
  const ogbcsr::OGBCSRModel compressed =
      ogbcsr::encode(model, 16, ogbcsr::GroupingMode::kExact);
  const sched::Schedule schedule = sched::greedy_lpt(
      sched::jobs_from(compressed, model.shape().windows()), 8);
  const frontend::BooleanFeatureMap fmap = make_fmap();
  const accel::ModelMeta meta = accel::ModelMeta::from(model);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        accel::simulate(compressed, schedule, fmap, meta));
}
BENCHMARK(BM_Simulate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
