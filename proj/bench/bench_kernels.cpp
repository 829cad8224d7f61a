#include <benchmark/benchmark.h>

#include "pvi/bsvi.hpp"
#include "pvi/reflected_sde.hpp"
#include "pvi/regression.hpp"

namespace {

const pvi::ProblemSpec& heat() {
  static const pvi::ProblemSpec p = pvi::presets::neumann_heat().time_reversed();
  return p;
}

const pvi::ProblemSpec& obstacle() {
  static const pvi::ProblemSpec p = pvi::presets::obstacle(1.0).time_reversed();
  return p;
}

pvi::PathBundle paths_for(const pvi::ProblemSpec& p, int n) {
  return pvi::simulate(p, pvi::make_point({0.25}), pvi::TimeGrid(0.0, p.horizon(), 100), n, 7);
}

void BM_SimulateSerial(benchmark::State& st) {
  for (auto _ : st)
    benchmark::DoNotOptimize(
        pvi::simulate_serial(heat(), pvi::make_point({0.25}), pvi::TimeGrid(0.0, 0.5, 100), static_cast<int>(st.range(0)), 7));
}

void BM_SimulateParallel(benchmark::State& st) {
  for (auto _ : st)
    benchmark::DoNotOptimize(
        pvi::simulate(heat(), pvi::make_point({0.25}), pvi::TimeGrid(0.0, 0.5, 100), static_cast<int>(st.range(0)), 7));
}

void BM_BackwardSerial(benchmark::State& st) {
  const auto paths = paths_for(obstacle(), static_cast<int>(st.range(0)));
  pvi::SolverConfig cfg;
  for (auto _ : st) benchmark::DoNotOptimize(pvi::solve_backward_serial(obstacle(), paths, cfg));
}

void BM_BackwardParallel(benchmark::State& st) {
  const auto paths = paths_for(obstacle(), static_cast<int>(st.range(0)));
  pvi::SolverConfig cfg;
  for (auto _ : st) benchmark::DoNotOptimize(pvi::solve_backward(obstacle(), paths, cfg));
}

void regression(benchmark::State& st, bool parallel) {
  const auto paths = paths_for(heat(), static_cast<int>(st.range(0)));
  Eigen::MatrixXd y(paths.n_paths, 2);
  for (int i = 0; i < paths.n_paths; ++i) {
    y(i, 0) = paths.X(100, i)[0];
    y(i, 1) = paths.A(100, i);
  }
  for (auto _ : st) {
    const pvi::Regressor r(heat().domain(), paths, 50, 3, parallel);
    benchmark::DoNotOptimize(r.fit(y));
  }
}

void BM_RegressionSerial(benchmark::State& st) { regression(st, false); }
void BM_RegressionParallel(benchmark::State& st) { regression(st, true); }

}  // namespace

BENCHMARK(BM_SimulateSerial)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateParallel)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BackwardSerial)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BackwardParallel)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RegressionSerial)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RegressionParallel)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
