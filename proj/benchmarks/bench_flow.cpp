// Kernel timings: density, tension and one full coupled step.
// Arguments are (n, res).

#include <benchmark/benchmark.h>

#include "nchf/fixtures.hpp"
#include "nchf/flow.hpp"
#include "nchf/operators.hpp"
#include "nchf/sphere.hpp"

namespace {

nchf::MapField sample(int n, int res) {
  nchf::FixtureSpec spec;
  spec.kind = nchf::FixtureKind::kRandomBandlimited;
  spec.max_freq = 2;
  return nchf::make_fixture(nchf::GridSpec(n, res), n + 1, spec);
}

void args(benchmark::internal::Benchmark* b) {
  b->Args({2, 64})->Args({2, 256})->Args({3, 32})->Args({3, 64})->Args({4, 16})->Args({4, 32});
  b->Unit(benchmark::kMillisecond);
}

void BM_Density(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const nchf::MapField f = sample(n, static_cast<int>(state.range(1)));
  nchf::detail::DensityBuffers d(f.grid());
  for (auto _ : state) {
    nchf::detail::compute_density(f, 0.1, n, d);
    benchmark::DoNotOptimize(d.q.values().data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * f.cell_count()));
}
BENCHMARK(BM_Density)->Apply(args);

void BM_Tension(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const nchf::MapField f = sample(n, static_cast<int>(state.range(1)));
  nchf::detail::DensityBuffers d(f.grid());
  nchf::detail::compute_density(f, 0.1, n, d);
  nchf::MapField tau(f.grid(), f.ambient_dim());
  for (auto _ : state) {
    nchf::detail::compute_tension(f, d, tau);
    benchmark::DoNotOptimize(tau.values().data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * f.cell_count()));
}
BENCHMARK(BM_Tension)->Apply(args);

// One coupled step through the driver at the CFL limit.
void BM_AdvanceStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const nchf::FlowState start = nchf::FlowState::initial(sample(n, static_cast<int>(state.range(1))));
  nchf::FlowConstants k;
  k.n = n;
  k.b = 8.0 / n;
  nchf::detail::DensityBuffers d(start.f.grid());
  nchf::detail::compute_density(start.f, k.eps, n, d);
  nchf::StepControl control;
  control.dt_max = 1.0;
  const double dt = nchf::cfl_bound(d.sigma, start.w, n, control.cfl_safety).dt;
  for (auto _ : state) {
    state.PauseTiming();
    nchf::FlowState s = start;
    state.ResumeTiming();
    nchf::advance(s, control, k, dt);
    benchmark::DoNotOptimize(s.f.values().data());
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * start.f.cell_count()));
}
BENCHMARK(BM_AdvanceStep)->Apply(args);

}  // namespace

BENCHMARK_MAIN();
