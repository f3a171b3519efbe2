#include <benchmark/benchmark.h>

#include <memory>

#include "hplab/average.hpp"

using namespace hplab;

namespace {

FieldConfig model(int n_max, int N_max) {
  auto b = std::make_shared<const FockBasis>(make_modeset(1, 6.283185307179586, n_max, 1.0), N_max);
  return make_field_config(b, Mollifier(make_plateau_profile(1.0, 2.0), 1), Damper{}, 0.4);
}

void BM_assemble_parallel(benchmark::State& state) {
  const FieldConfig cfg = model(static_cast<int>(state.range(0)), 4);
  const QuadratureGrid grid = make_quadrature_grid(cfg.modes(), 3);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_h(cfg, {0.3, 3, false}, grid));
  state.counters["states"] = static_cast<double>(cfg.basis->size());
}

void BM_assemble_serial(benchmark::State& state) {
  const FieldConfig cfg = model(static_cast<int>(state.range(0)), 4);
  const QuadratureGrid grid = make_quadrature_grid(cfg.modes(), 3);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_h_serial(cfg, {0.3, 3, false}, grid));
  state.counters["states"] = static_cast<double>(cfg.basis->size());
}

// Rungs 0.8 and 0.4 sit off the plateau; the rest collapse onto one computation.
EpsilonLadder sweep_ladder() { return EpsilonLadder({0.8, 0.4, 0.2, 0.1, 0.05, 0.025}); }

void BM_sweep_parallel(benchmark::State& state) {
  const FieldConfig cfg = model(2, 4);
  const QuadratureGrid grid = make_quadrature_grid(cfg.modes(), 3);
  const FockVector v = vacuum(*cfg.basis);
  const EpsilonLadder ladder = sweep_ladder();
  for (auto _ : state) benchmark::DoNotOptimize(sweep_transition(cfg, {0.3, 3, false}, grid, 5.0, v, v, ladder));
}

void BM_sweep_serial(benchmark::State& state) {
  const FieldConfig cfg = model(2, 4);
  const QuadratureGrid grid = make_quadrature_grid(cfg.modes(), 3);
  const FockVector v = vacuum(*cfg.basis);
  const EpsilonLadder ladder = sweep_ladder();
  for (auto _ : state) benchmark::DoNotOptimize(sweep_transition_serial(cfg, {0.3, 3, false}, grid, 5.0, v, v, ladder));
}

}  // namespace

BENCHMARK(BM_assemble_parallel)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_assemble_serial)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sweep_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sweep_serial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
