#include <benchmark/benchmark.h>

#include "fhn/integrator.hpp"
#include "fhn/reduced_flow.hpp"

namespace {

void BM_Rhs(benchmark::State& st) {
  const fhn::Params p{.b = 0.0, .c = -2.0, .k = 1.0, .epsilon = 0.01};
  fhn::State s{1.3, -1.7, 0.2, 0.4};
  for (auto _ : st) {
    benchmark::DoNotOptimize(fhn::rhs(p, s));
  }
}
BENCHMARK(BM_Rhs);

void BM_IntegrateStiff(benchmark::State& st) {
  const fhn::Params p{.b = 0.3, .c = 0.01, .k = 0.1, .epsilon = 0.01};
  const fhn::State s0{2.0, 1.5, fhn::phi(2.0), fhn::phi(1.5)};
  fhn::IntegratorConfig cfg;
  cfg.t_end = 20.0;
  for (auto _ : st) {
    auto traj = fhn::integrate(p, s0, cfg);
    benchmark::DoNotOptimize(traj.times.back());
  }
}
BENCHMARK(BM_IntegrateStiff)->Unit(benchmark::kMillisecond);

void BM_FoldedEquilibria(benchmark::State& st) {
  const fhn::Params p{.b = 0.0, .c = -0.5, .k = 1.0, .epsilon = 0.01};
  for (auto _ : st) {
    benchmark::DoNotOptimize(
        fhn::find_folded_equilibria(p, 1, fhn::FoldedVariable::Second).size());
  }
}
BENCHMARK(BM_FoldedEquilibria);

}  // namespace

BENCHMARK_MAIN();
