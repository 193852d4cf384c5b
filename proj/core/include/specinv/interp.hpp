#ifndef SPECINV_INTERP_HPP
#define SPECINV_INTERP_HPP

#include <vector>

#include "specinv/curve.hpp"

namespace specinv {

/// Monotone cubic (Fritsch-Carlson) interpolant through strictly increasing
/// knots. Preserves monotonicity of the data; C1 everywhere.
class PchipInterpolant {
  public:
    PchipInterpolant() = default;
    PchipInterpolant(std::vector<double> x, std::vector<double> y);

    double value(double x) const;
    double derivative(double x) const;

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

  private:
    std::size_t interval(double x) const;
    std::vector<double> x_, y_, d_; // knots, values, knot derivatives
};

/// Least-squares nondecreasing fit (pool adjacent violators).
std::vector<double> isotonic_nondecreasing(const std::vector<double>& y);

/// Smoothed first derivative of a uniformly sampled curve: least-squares
/// linear fit over a centered 5-point stencil, one-sided 3-point fits at the
/// ends.
std::vector<double> smoothed_derivative5(const std::vector<double>& y, double dx);

/// Plain central second difference, one-sided copies at the ends.
std::vector<double> second_difference(const std::vector<double>& y, double dx);

/// Centered moving average of the piecewise-linear interpolant over windows
/// [x_i - half_width, x_i + half_width]. Windows are clamped to the grid.
/// When half_width/dx is an integer the window average annihilates any
/// component periodic with period 2*half_width.
std::vector<double> moving_average(const std::vector<double>& y, double dx,
                                   double half_width);

/// Cumulative trapezoid integral, zero at the first node.
std::vector<double> cumulative_trapezoid(const std::vector<double>& y, double dx);

} // namespace specinv

#endif
