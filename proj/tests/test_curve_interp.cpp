#include <doctest.h>

#include <cmath>
#include <vector>

#include "specinv/curve.hpp"
#include "specinv/errors.hpp"
#include "specinv/interp.hpp"

using namespace specinv;

TEST_CASE("curve grid accessors") {
    Curve c(0.0, 1.0, {0.0, 0.25, 0.5, 0.75, 1.0}, "test");
    CHECK(c.size() == 5);
    CHECK(c.dx() == doctest::Approx(0.25));
    CHECK(c.x(2) == doctest::Approx(0.5));
    CHECK(c.interp(0.375) == doctest::Approx(0.375));
    CHECK(c.interp(-1.0) == doctest::Approx(0.0));
    CHECK(c.interp(2.0) == doctest::Approx(1.0));
}

TEST_CASE("curve rejects degenerate grids") {
    CHECK_THROWS_AS(Curve(0.0, 1.0, {1.0}), config_error);
    CHECK_THROWS_AS(Curve(1.0, 0.0, {1.0, 2.0}), config_error);
}

TEST_CASE("pchip reproduces monotone data and stays monotone") {
    std::vector<double> x, y;
    for (int i = 0; i <= 20; ++i) {
        double t = i / 20.0;
        x.push_back(t);
        y.push_back(t * t);
    }
    PchipInterpolant p(x, y);
    for (double t = 0.0; t <= 1.0; t += 0.01) {
        CHECK(p.value(t) == doctest::Approx(t * t).epsilon(5e-3));
    }
    double prev = p.value(0.0);
    for (double t = 0.002; t <= 1.0; t += 0.002) {
        double v = p.value(t);
        CHECK(v >= prev - 1e-14);
        prev = v;
    }
    CHECK(p.derivative(0.5) == doctest::Approx(1.0).epsilon(2e-2));
}

TEST_CASE("pchip rejects unsorted knots") {
    CHECK_THROWS_AS(PchipInterpolant({0.0, 0.5, 0.4}, {0.0, 1.0, 2.0}), config_error);
}

TEST_CASE("isotonic projection pools violators") {
    std::vector<double> y{1.0, 3.0, 2.0, 4.0};
    auto z = isotonic_nondecreasing(y);
    CHECK(z[0] == doctest::Approx(1.0));
    CHECK(z[1] == doctest::Approx(2.5));
    CHECK(z[2] == doctest::Approx(2.5));
    CHECK(z[3] == doctest::Approx(4.0));
    for (std::size_t i = 1; i < z.size(); ++i)
        CHECK(z[i] >= z[i - 1]);
    // Already monotone input passes through untouched.
    std::vector<double> mono{0.0, 1.0, 2.0};
    CHECK(isotonic_nondecreasing(mono) == mono);
}

TEST_CASE("smoothed derivative is exact on quadratics") {
    double dx = 0.01;
    std::vector<double> y;
    for (int i = 0; i < 200; ++i) {
        double t = i * dx;
        y.push_back(3.0 * t * t - 2.0 * t + 1.0);
    }
    auto d = smoothed_derivative5(y, dx);
    for (std::size_t i = 2; i + 2 < y.size(); ++i) {
        double t = double(i) * dx;
        CHECK(d[i] == doctest::Approx(6.0 * t - 2.0).epsilon(1e-9));
    }
}

TEST_CASE("moving average annihilates matched-period oscillations") {
    // Window of half-width h kills any zero-mean component of period 2h
    // when h is a grid multiple, up to aliasing that lands at DC.
    double dx = 0.005, h = 0.04;
    std::size_t n = 401;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double t = double(i) * dx;
        y[i] = 2.0 * t + 0.5 * std::sin(2.0 * M_PI * t / (2.0 * h));
    }
    auto f = moving_average(y, dx, h);
    for (std::size_t i = 20; i + 20 < n; ++i) {
        double t = double(i) * dx;
        CHECK(f[i] == doctest::Approx(2.0 * t).epsilon(1e-10));
    }
}

TEST_CASE("cumulative trapezoid integrates linear functions exactly") {
    double dx = 0.1;
    std::vector<double> y;
    for (int i = 0; i <= 10; ++i)
        y.push_back(2.0 * i * dx);
    auto c = cumulative_trapezoid(y, dx);
    for (int i = 0; i <= 10; ++i) {
        double t = i * dx;
        CHECK(c[std::size_t(i)] == doctest::Approx(t * t).epsilon(1e-12));
    }
}
