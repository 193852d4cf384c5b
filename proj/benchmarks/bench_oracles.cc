#include <benchmark/benchmark.h>

#include "specinv/oracles.hpp"
#include "specinv/potentials.hpp"

using namespace specinv;

static void BM_PhaseSpaceIntegral(benchmark::State& state) {
    auto pot = AnalyticPotential::harmonic(2, 1.0);
    QuadParams qp;
    qp.cells = int(state.range(0));
    PhaseSpaceQuadrature quad(pot, qp);
    for (auto _ : state) {
        QuadResult r = quad.integrate(0.8, PhaseWeight::One);
        benchmark::DoNotOptimize(r.value);
    }
}
BENCHMARK(BM_PhaseSpaceIntegral)->Arg(128)->Arg(512);

static void BM_LevelSetInvariants(benchmark::State& state) {
    auto pot = AnalyticPotential::harmonic(2, 1.0);
    QuadParams qp;
    qp.cells = int(state.range(0));
    LevelSetScan2D scan(pot, qp);
    for (auto _ : state) {
        SurfaceInvariants inv = scan.invariants(0.5);
        benchmark::DoNotOptimize(inv.i1);
    }
}
BENCHMARK(BM_LevelSetInvariants)->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
