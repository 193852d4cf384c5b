#include <benchmark/benchmark.h>

#include <cmath>

#include "specinv/abel.hpp"

using namespace specinv;

static Curve monomial_curve(std::size_t n, double p) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = double(i) / double(n - 1);
        v[i] = std::pow(s, p);
    }
    return Curve(0.0, 1.0, std::move(v), "bench");
}

static void BM_FracIntegral(benchmark::State& state) {
    Curve g = monomial_curve(std::size_t(state.range(0)), 2.0);
    for (auto _ : state) {
        Curve out = frac_integral(g, FracOrder(1.5));
        benchmark::DoNotOptimize(out.values().data());
    }
}
BENCHMARK(BM_FracIntegral)->Arg(1000)->Arg(4000)->Arg(10000);

static void BM_VolterraSolve(benchmark::State& state) {
    Curve v = monomial_curve(std::size_t(state.range(0)), 1.5);
    Curve a = frac_integral(v, FracOrder(1.5));
    for (double& x : a.values())
        x *= std::tgamma(2.5);
    InversionConfig cfg;
    for (auto _ : state) {
        Curve out = recover_volume(a, 3, cfg);
        benchmark::DoNotOptimize(out.values().data());
    }
}
BENCHMARK(BM_VolterraSolve)->Arg(200)->Arg(400);

BENCHMARK_MAIN();
