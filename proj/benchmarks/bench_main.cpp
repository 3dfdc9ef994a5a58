#include <benchmark/benchmark.h>

#include <cmath>

#include "tdeuler/euler.hpp"
#include "tdeuler/linear.hpp"

using namespace tdeuler;

// one propagator column pair out to t = range(0), r = 0.5
static void ModePropagatorAdvance(benchmark::State& state) {
  const DampingLaw d{0.5, 1.0};
  const double T = static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto s = fundamental_pair(T, 0.5, d);
    benchmark::DoNotOptimize(s.phi1);
  }
}
BENCHMARK(ModePropagatorAdvance)->Arg(10)->Arg(100)->Arg(1000);

static void EulerRhs1d(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const Grid g(1, N / 4.0, N);
  EulerSolver solver(g, DampingLaw{0.5, 1.0}, GasLaw{2.0}, SolverConfig{});
  InitialDataSpec spec;
  const EulerState s = initial_bump(spec, g, GasLaw{2.0}, 2);
  for (auto _ : state) {
    auto r = solver.rhs(s);
    benchmark::DoNotOptimize(r.v.data());
  }
  state.SetComplexityN(N);
}
BENCHMARK(EulerRhs1d)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

static void EulerRhs2d(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const Grid g(2, N / 4.0, N);
  EulerSolver solver(g, DampingLaw{0.5, 1.0}, GasLaw{2.0}, SolverConfig{});
  InitialDataSpec spec;
  spec.velocity = VelocityKind::Rotational;
  const EulerState s = initial_bump(spec, g, GasLaw{2.0}, 2);
  for (auto _ : state) {
    auto r = solver.rhs(s);
    benchmark::DoNotOptimize(r.v.data());
  }
}
BENCHMARK(EulerRhs2d)->Arg(64)->Arg(128)->Arg(256);

static void ZoneIntegralL1(benchmark::State& state) {
  const DampingLaw d{0.5, 2.0};
  const double t = static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto z = zone_integral(t, 0, Zone::Z1, 1, d, 1);
    benchmark::DoNotOptimize(z.value);
  }
}
BENCHMARK(ZoneIntegralL1)->Arg(10)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
