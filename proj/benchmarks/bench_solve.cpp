#include <benchmark/benchmark.h>

#include "qhp/experiments.hpp"
#include "qhp/nonideal_fridge.hpp"
#include "qhp/steady_state.hpp"

namespace {

qhp::PumpConfig pump(int n_levels) {
  qhp::PumpConfig cfg;
  cfg.n_levels = n_levels;
  cfg.omega_h = 102.6;
  cfg.work = {qhp::Bath::work, 7.1e3, 3.5e-3};
  cfg.hot = {qhp::Bath::hot, 1.57e3, 5.1e-3};
  cfg.cold = {qhp::Bath::cold, 54.25, 8.8e-3};
  cfg.omega_c = qhp::effective_window_max(cfg) / 2;
  return cfg;
}

void BM_Solve(benchmark::State& state) {
  const qhp::PumpConfig cfg = pump(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(qhp::solve(cfg).q.cold);
}
BENCHMARK(BM_Solve)->DenseRange(3, 10)->Unit(benchmark::kMicrosecond);

void BM_PauliOracle(benchmark::State& state) {
  const qhp::PumpConfig cfg = pump(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(qhp::pauli_rate_oracle(cfg).q.cold);
}
BENCHMARK(BM_PauliOracle)->Arg(4)->Arg(10)->Unit(benchmark::kMicrosecond);

void BM_MaximizeCoolingPower(benchmark::State& state) {
  const qhp::PumpConfig cfg = pump(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(qhp::maximize_cooling_power(cfg).q_c_max);
}
BENCHMARK(BM_MaximizeCoolingPower)->Arg(3)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_ThreeQubit(benchmark::State& state) {
  qhp::ComparisonParams params;
  params.basis = state.range(0) ? qhp::DissipatorBasis::dressed : qhp::DissipatorBasis::local;
  const qhp::ThreeQubitConfig cfg = params.three_qubit(params.window_max() / 2);
  for (auto _ : state) benchmark::DoNotOptimize(qhp::solve_three_qubit(cfg).q.cold);
}
BENCHMARK(BM_ThreeQubit)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_HistogramSample(benchmark::State& state) {
  // A fresh seed per iteration, so the timing averages over random fridges.
  qhp::SampleRanges ranges;
  for (auto _ : state) {
    ++ranges.seed;
    benchmark::DoNotOptimize(qhp::cop_histogram(ranges, 1, 1).max_ratio);
  }
}
BENCHMARK(BM_HistogramSample)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
