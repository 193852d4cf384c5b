#ifndef SPECINV_ABEL_HPP
#define SPECINV_ABEL_HPP

#include <string>
#include <utility>

#include "specinv/curve.hpp"

namespace specinv {

/// Order of a Riemann-Liouville fractional integral. Zero is accepted and
/// means the identity map (J^0 = id); practical orders stay within (0, 12].
struct FracOrder {
    double alpha = 1.0;
    explicit FracOrder(double a);
};

struct InversionConfig {
    double tikhonov_weight = 1e-6; // relative curvature penalty
    bool monotone_projection = true;
    std::string derivative_scheme = "sg5";
};

/// Normalized fractional integral J^a g(x) = (1/Gamma(a)) int_0^x
/// (x-s)^{a-1} g(s) ds, discretized by product integration that is exact on
/// piecewise-linear g (the kernel is singular for a < 1, so naive quadrature
/// would lose an order). The grid must start at 0.
Curve frac_integral(const Curve& g, FracOrder alpha);

/// Max-norm relative difference between J^a(J^b g) and J^{a+b} g.
double semigroup_defect(const Curve& g, FracOrder alpha, FracOrder beta);

/// Recovers the sublevel-volume curve v from A(lambda) = (n/2) int_0^lambda
/// (lambda-s)^{n/2-1} v(s) ds. For n = 2 this is A' by smoothed
/// differentiation; for n >= 3 a first-kind Volterra solve with a Tikhonov
/// curvature penalty and optional isotonic projection.
Curve recover_volume(const Curve& A, int n, const InversionConfig& cfg);

/// I1 = v' with v from recover_volume; I2 solves B(lambda) = int_0^lambda
/// (lambda-s)^{n/2} I2(s) ds by the same regularized Volterra machinery with
/// one more power of the kernel.
std::pair<Curve, Curve> recover_surface_invariants(const Curve& A, const Curve& B,
                                                   int n, const InversionConfig& cfg);

/// Solves K m = rhs where K is the product-integration matrix of
/// c * int_0^x (x-s)^{alpha-1} m(s) ds, with Tikhonov second-difference
/// penalty. m(0) is pinned to zero_start if requested.
Curve solve_volterra_first_kind(const Curve& rhs, double alpha, double prefactor,
                                const InversionConfig& cfg, bool pin_zero_start);

} // namespace specinv

#endif
