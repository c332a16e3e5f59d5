#include <benchmark/benchmark.h>

#include "optbal/balance.hpp"
#include "optbal/diagnostics.hpp"
#include "optbal/integrate.hpp"
#include "optbal/slow_field.hpp"

using namespace optbal;

namespace {

const Vec kQ{1.0, 0.5};

BalanceProblem problem(double eps) {
  BalanceProblem p;
  p.q_star = kQ;
  p.eps = eps;
  p.ramp = RampSpec::exponential();
  p.slow_horizon = 2.0;
  return p;
}

}  // namespace

static void BM_Step(benchmark::State& state) {
  const auto scheme = static_cast<Scheme>(state.range(0));
  const System sys =
      System::ramped(Potential::quartic_aniso(), SmallParam(1e-2), RampSpec::exponential(), 200.0);
  State s(kQ, {0.01, -0.02});
  double t = 0.0;
  for (auto _ : state) {
    s = step(s, t, t + 1e-2, scheme, sys);
    t += 1e-2;
    if (t > 190.0) t = 0.0;
    benchmark::DoNotOptimize(s);
  }
  state.SetLabel(scheme == Scheme::rk4 ? "rk4" : "splitting");
}
BENCHMARK(BM_Step)->Arg(static_cast<int>(Scheme::splitting))->Arg(static_cast<int>(Scheme::rk4));

static void BM_IntegrateRamp(benchmark::State& state) {
  const double eps = 1.0 / static_cast<double>(state.range(0));
  const System sys =
      System::ramped(Potential::quartic_aniso(), SmallParam(eps), RampSpec::exponential(), 2 / eps);
  const IntegratorConfig cfg{Scheme::rk4, 0.05};
  for (auto _ : state) {
    benchmark::DoNotOptimize(propagate(State(kQ, {0.0, 0.0}), 0.0, 2 / eps, cfg, sys));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 / eps / cfg.dt));
}
BENCHMARK(BM_IntegrateRamp)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_SlowFieldG(benchmark::State& state) {
  const SlowField field(Potential::quartic_aniso());
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(field.G(order, kQ, SmallParam(1e-2)));
}
BENCHMARK(BM_SlowFieldG)->DenseRange(0, 3);

static void BM_Shoot(benchmark::State& state) {
  const BalanceProblem p = problem(1.0 / static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(shoot(p));
}
BENCHMARK(BM_Shoot)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_Nudge(benchmark::State& state) {
  BalanceProblem p = problem(1e-2);
  p.solver = Solver::nudging;
  for (auto _ : state) benchmark::DoNotOptimize(nudge(p));
}
BENCHMARK(BM_Nudge)->Unit(benchmark::kMillisecond);

static void BM_DiagnosedImbalance(benchmark::State& state) {
  const BalanceProblem p = problem(1.0 / static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(diagnosed_imbalance(kQ, p, 0.5));
}
BENCHMARK(BM_DiagnosedImbalance)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
