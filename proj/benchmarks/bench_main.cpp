#include <memory>
#include <vector>

#include <benchmark/benchmark.h>

#include "steric/bvp.hpp"
#include "steric/chemistry.hpp"
#include "steric/experiment.hpp"
#include "steric/spectral_grid.hpp"

using namespace steric;

static void BM_ChargeDensityFinite(benchmark::State& state) {
  const IonSystem s = reference_system_b();
  const double lambda = static_cast<double>(state.range(0));
  double phi = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(charge_density(phi, s, FiniteLambda{lambda}));
    phi = phi > 3.0 ? -3.0 : phi + 0.01;
  }
}
BENCHMARK(BM_ChargeDensityFinite)->Arg(1)->Arg(1000)->Arg(100000);

static void BM_ChargeDensityLimit(benchmark::State& state) {
  const IonSystem s = reference_system_b();
  double phi = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(charge_density(phi, s, Limit{}));
    phi = phi > 3.0 ? -3.0 : phi + 0.01;
  }
}
BENCHMARK(BM_ChargeDensityLimit);

static void BM_BuildGrid(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_grid(static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_BuildGrid)->Arg(32)->Arg(64)->Arg(128);

static void BM_NewtonSolve(benchmark::State& state) {
  ExperimentConfig cfg = canonical_configs()[static_cast<std::size_t>(state.range(0))];
  auto grid = std::make_shared<const SpectralGrid>(build_grid(64));
  const BvpProblem p = build_problem(cfg, grid, FiniteLambda{1e3});
  SolverConfig solver;
  solver.compute_energy = false;
  for (auto _ : state) benchmark::DoNotOptimize(newton_solve(p, solver));
  state.SetLabel(cfg.name);
}
BENCHMARK(BM_NewtonSolve)->DenseRange(0, 5)->Unit(benchmark::kMillisecond);

static void BM_TableSweep(benchmark::State& state) {
  const ExperimentConfig cfg = canonical_configs()[0];
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(cfg));
}
BENCHMARK(BM_TableSweep)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
