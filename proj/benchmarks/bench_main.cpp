#include <benchmark/benchmark.h>

#include "ntklab/datagen.hpp"
#include "ntklab/network.hpp"
#include "ntklab/ntk.hpp"
#include "ntklab/numerics.hpp"

using namespace ntklab;

static void BM_LimitingNtk(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix X = sample_sphere(n, 64, RngStream{1, 0});
  for (auto _ : state) {
    benchmark::DoNotOptimize(limiting_ntk(X, 3));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_LimitingNtk)->Arg(64)->Arg(256)->Complexity(benchmark::oNSquared);

static void BM_ForwardScores(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  const WeightSet w = init_weights(NetConfig{3, width, 64}, RngStream{2, 0});
  const Matrix X = sample_sphere(512, 64, RngStream{2, 1});
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward_scores(w, X));
  }
}
BENCHMARK(BM_ForwardScores)->Arg(256)->Arg(1024);

static void BM_GradientFactors(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  const WeightSet w = init_weights(NetConfig{3, width, 64}, RngStream{3, 0});
  const Vector x = sample_sphere(1, 64, RngStream{3, 1}).row(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gradient_factors(w, x));
  }
}
BENCHMARK(BM_GradientFactors)->Arg(256)->Arg(1024);

static void BM_MinEigenvalue(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix X = sample_sphere(n, 32, RngStream{4, 0});
  const KernelMatrix k = limiting_ntk(X, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sym_eig_min(k.gram));
  }
}
BENCHMARK(BM_MinEigenvalue)->Arg(128)->Arg(512);

static void BM_EmpiricalNtk(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  const WeightSet w = init_weights(NetConfig{2, width, 16}, RngStream{5, 0});
  const Matrix X = sample_sphere(32, 16, RngStream{5, 1});
  for (auto _ : state) {
    benchmark::DoNotOptimize(empirical_ntk(w, X));
  }
}
BENCHMARK(BM_EmpiricalNtk)->Arg(512)->Arg(2048);

BENCHMARK_MAIN();
