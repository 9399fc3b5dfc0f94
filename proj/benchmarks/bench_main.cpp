#include <benchmark/benchmark.h>

#include "stagedtrees/ceg.hpp"
#include "stagedtrees/datasets.hpp"
#include "stagedtrees/estimation.hpp"
#include "stagedtrees/learning.hpp"
#include "stagedtrees/query.hpp"

using namespace stagedtrees;

static void BM_FitFull(benchmark::State& state) {
  const auto ds = titanic();
  for (auto _ : state) benchmark::DoNotOptimize(full(ds));
}
BENCHMARK(BM_FitFull);

static void BM_HillClimb(benchmark::State& state) {
  const auto start = indep(titanic());
  for (auto _ : state) benchmark::DoNotOptimize(stages_hc(start));
}
BENCHMARK(BM_HillClimb);

static void BM_BackwardHillClimb(benchmark::State& state) {
  const auto start = full(titanic());
  for (auto _ : state) benchmark::DoNotOptimize(stages_bhc(start));
}
BENCHMARK(BM_BackwardHillClimb);

static void BM_BackwardJoin(benchmark::State& state) {
  const auto start = full(titanic());
  for (auto _ : state) benchmark::DoNotOptimize(stages_bj(start));
}
BENCHMARK(BM_BackwardJoin);

static void BM_Prob(benchmark::State& state) {
  const auto m = stages_hc(indep(titanic()));
  const Assignment event{{"Survived", "Yes"}, {"Age", "Child"}};
  for (auto _ : state) benchmark::DoNotOptimize(prob(m, event));
}
BENCHMARK(BM_Prob);

static void BM_Ceg(benchmark::State& state) {
  const auto m = stages_hc(indep(titanic()));
  for (auto _ : state) benchmark::DoNotOptimize(ceg(m));
}
BENCHMARK(BM_Ceg);

static void BM_Sample(benchmark::State& state) {
  const auto m = full(titanic());
  for (auto _ : state) benchmark::DoNotOptimize(sample_from(m, static_cast<std::size_t>(state.range(0)), 1));
}
BENCHMARK(BM_Sample)->Arg(1000)->Arg(100000);
BENCHMARK_MAIN();
