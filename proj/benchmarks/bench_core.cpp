#include <benchmark/benchmark.h>

#include "sse/dynamics.hpp"
#include "sse/reduction.hpp"
#include "sse/spectral.hpp"

namespace {

sse::SystemParams desk(std::size_t n, double omega_in_sse) {
  sse::SystemParams p;
  p.n_bath = n;
  p.delta_omega = 1.0 / static_cast<double>(n);
  p.g = sse::coupling_for_gamma(0.02, p.delta_omega);
  p.omega_big = omega_in_sse * p.omega_sse();
  return p;
}

void BM_Diagonalize(benchmark::State& state) {
  const auto h = sse::build_matrix(desk(static_cast<std::size_t>(state.range(0)), 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(sse::diagonalize(h));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Diagonalize)->RangeMultiplier(2)->Range(50, 800)->Complexity(benchmark::oNCubed)
    ->Unit(benchmark::kMillisecond);

void BM_HeadKernels(benchmark::State& state) {
  const auto p = desk(static_cast<std::size_t>(state.range(0)), 1.0);
  const auto b = sse::diagonalize(sse::build_matrix(p));
  const auto grid = sse::sampling_grid(p, 5.0 * p.t_return());
  for (auto _ : state) benchmark::DoNotOptimize(sse::head_kernels(b, grid));
  state.counters["samples"] = static_cast<double>(grid.count);
}
BENCHMARK(BM_HeadKernels)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_EnsembleRatio(benchmark::State& state) {
  const auto p = desk(static_cast<std::size_t>(state.range(0)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(sse::ensemble_ratio(p, 200, 25.0 * p.t_return(), 1));
}
BENCHMARK(BM_EnsembleRatio)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_SimulateNoisy(benchmark::State& state) {
  sse::NoiseSpec noise;
  noise.dt = 0.005;
  noise.n_realizations = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(sse::simulate_noisy({1.0, 0.7, 0.0}, noise, 100.0));
}
BENCHMARK(BM_SimulateNoisy)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
