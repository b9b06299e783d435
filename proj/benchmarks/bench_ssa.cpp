#include <benchmark/benchmark.h>

#include "ssa/convex.hpp"
#include "ssa/gabor.hpp"
#include "ssa/greedy.hpp"
#include "ssa/random.hpp"
#include "ssa/synth.hpp"

using namespace ssa;

namespace {

VerificationSplit classification(Index features, Index tasks) {
  SynthSpec spec;
  spec.features = features;
  spec.tasks = tasks;
  spec.support = 40;
  spec.share_fraction = 0.75;
  spec.snr = 1.0;
  return synth_classification(spec, 5, 210, 1);
}

void BM_Somp(benchmark::State& state) {
  const auto split = classification(state.range(0), 158);
  GreedyConfig cfg;
  cfg.max_features = state.range(1);
  for (auto _ : state) benchmark::DoNotOptimize(somp(split.train_x, split.train_y, cfg));
}
BENCHMARK(BM_Somp)->Args({2000, 100})->Args({2000, 300})->Unit(benchmark::kMillisecond);

void BM_GroupSolver(benchmark::State& state) {
  const auto split = classification(state.range(0), 20);
  ConvexConfig cfg;
  cfg.lambda = 0.3 * group_lambda_max(split.train_x, split.train_y, RowNorm::LInf);
  cfg.rel_tol = 1e-8;
  for (auto _ : state) benchmark::DoNotOptimize(group_solver(split.train_x, split.train_y, cfg));
}
BENCHMARK(BM_GroupSolver)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_ProxRowLinf(benchmark::State& state) {
  Xoshiro256ss rng(1);
  Vector v(state.range(0));
  for (Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
  const double t = 0.3 * v.cwiseAbs().sum();
  for (auto _ : state) benchmark::DoNotOptimize(prox_row_linf(v, t));
}
BENCHMARK(BM_ProxRowLinf)->Arg(10)->Arg(158);

void BM_GaborExtract(benchmark::State& state) {
  const auto bank = build_filter_bank(5, 8);
  Xoshiro256ss rng(2);
  GrayImage img(64, 64);
  for (Index r = 0; r < 64; ++r)
    for (Index c = 0; c < 64; ++c) img(r, c) = rng.uniform();
  const AlignedFace face(img);
  for (auto _ : state) benchmark::DoNotOptimize(extract(face, bank));
}
BENCHMARK(BM_GaborExtract)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
