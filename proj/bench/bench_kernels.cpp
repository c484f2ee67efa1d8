// Parallel kernels against their serial references on the oscillator
// scenario, which has the largest per-point cost.

#include <benchmark/benchmark.h>

#include "qfluct/fluctuation.hpp"
#include "qfluct/scenarios.hpp"

namespace {

qfluct::ScenarioSetup oscillator(int s) {
  auto config = qfluct::ScenarioConfig::defaults(qfluct::ScenarioKind::example3);
  config.params.s = s;
  return qfluct::setup_scenario(config);
}

void BM_propagate(benchmark::State& state) {
  const auto setup = oscillator(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(qfluct::propagate(setup.h, setup.psi0, setup.grid, setup.prop));
}

void BM_propagate_reference(benchmark::State& state) {
  const auto setup = oscillator(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(qfluct::reference::propagate(setup.h, setup.psi0, setup.grid, setup.prop));
  }
}

void BM_bound_series(benchmark::State& state) {
  const auto setup = oscillator(static_cast<int>(state.range(0)));
  const auto traj = qfluct::propagate(setup.h, setup.psi0, setup.grid, setup.prop);
  for (auto _ : state) benchmark::DoNotOptimize(qfluct::bound_series(setup.a, setup.h, traj, setup.rate));
}

void BM_bound_series_reference(benchmark::State& state) {
  const auto setup = oscillator(static_cast<int>(state.range(0)));
  const auto traj = qfluct::propagate(setup.h, setup.psi0, setup.grid, setup.prop);
  for (auto _ : state) benchmark::DoNotOptimize(qfluct::reference::bound_series(setup.a, setup.h, traj, setup.rate));
}

}  // namespace

BENCHMARK(BM_propagate)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_propagate_reference)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_bound_series)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_bound_series_reference)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
