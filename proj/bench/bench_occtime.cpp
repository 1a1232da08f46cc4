// Serial reference against the OpenMP kernels: path simulation and grid
// evaluation of V. Both kernels produce identical numbers, so only time differs.

#include "occtime/montecarlo.hpp"
#include "occtime/occupation.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

using namespace occtime;

ValidatedModel model_a() {
  RefractedModel m;
  m.base.mu = 0.1;
  m.base.sigma = 0.2;
  m.base.lambda_plus = 1.0;
  m.base.lambda_minus = 1.0;
  m.base.jumps_up = {JumpSide::positive, {{2.0, {1.0}}}};
  m.base.jumps_down = {JumpSide::negative, {{3.0, {1.0}}}};
  m.alpha = 0.05;
  return validated(m);
}

Execution execution(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void BM_SimulateOccupation(benchmark::State& state) {
  const auto m = model_a();
  SimConfig cfg;
  cfg.n_paths = static_cast<std::size_t>(state.range(1));
  cfg.execution = execution(state);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_occupation(m, 0.0, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(1));
  state.SetLabel(state.range(0) == 0 ? "serial" : "openmp");
}
BENCHMARK(BM_SimulateOccupation)->Args({0, 2000})->Args({1, 2000})->Unit(benchmark::kMillisecond);

void BM_EvaluateGrid(benchmark::State& state) {
  const auto v = occupation_laplace(model_a(), 0.05, 0.1);
  std::vector<double> xs(static_cast<std::size_t>(state.range(1)));
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = -5.0 + 10.0 * static_cast<double>(i) / static_cast<double>(xs.size());
  const auto exec = execution(state);
  for (auto _ : state) benchmark::DoNotOptimize(v.evaluate(xs, exec));
  state.SetItemsProcessed(state.iterations() * state.range(1));
  state.SetLabel(state.range(0) == 0 ? "serial" : "openmp");
}
BENCHMARK(BM_EvaluateGrid)->Args({0, 100000})->Args({1, 100000})->Unit(benchmark::kMicrosecond);

void BM_AssembleV(benchmark::State& state) {
  const auto m = model_a();
  for (auto _ : state) benchmark::DoNotOptimize(occupation_laplace(m, 0.05, 0.1));
}
BENCHMARK(BM_AssembleV)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
