#include <benchmark/benchmark.h>

#include "specinv/potentials.hpp"
#include "specinv/spectra.hpp"

using namespace specinv;

static void BM_RadialFdSpectrum(benchmark::State& state) {
    auto pot = AnalyticPotential::from_profile(
        RadialProfile::power_law(2, 1.0, 1.0, 2.0));
    SolverParams params;
    params.r_max = 3.0;
    params.grid_points = int(state.range(0));
    for (auto _ : state) {
        Spectrum spec = radial_fd_spectrum(pot, 0.1, 1.0, params);
        benchmark::DoNotOptimize(spec.entries.data());
    }
}
BENCHMARK(BM_RadialFdSpectrum)->Arg(1000)->Arg(4000);

static void BM_ExactHarmonic(benchmark::State& state) {
    for (auto _ : state) {
        Spectrum spec = exact_harmonic_spectrum(2, 0.001, 1.0);
        benchmark::DoNotOptimize(spec.entries.data());
    }
}
BENCHMARK(BM_ExactHarmonic);

BENCHMARK_MAIN();
