#include "specinv/curve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "specinv/errors.hpp"

namespace specinv {

Curve::Curve(double grid_min, double grid_max, std::vector<double> values,
             std::string label)
    : grid_min_(grid_min), grid_max_(grid_max), values_(std::move(values)),
      label_(std::move(label)) {
    if (values_.size() < 2)
        throw config_error("Curve '" + label_ + "': grid needs at least 2 points");
    if (!(grid_max_ > grid_min_))
        throw config_error("Curve '" + label_ + "': grid_max must exceed grid_min");
}

Curve Curve::zeros(double grid_min, double grid_max, std::size_t count,
                   std::string label) {
    return Curve(grid_min, grid_max, std::vector<double>(count, 0.0),
                 std::move(label));
}

double Curve::dx() const {
    return (grid_max_ - grid_min_) / double(values_.size() - 1);
}

double Curve::x(std::size_t i) const { return grid_min_ + double(i) * dx(); }

double Curve::interp(double xq) const {
    if (xq <= grid_min_)
        return values_.front();
    if (xq >= grid_max_)
        return values_.back();
    double t = (xq - grid_min_) / dx();
    std::size_t i = std::min<std::size_t>(std::size_t(t), values_.size() - 2);
    double f = t - double(i);
    return values_[i] * (1.0 - f) + values_[i + 1] * f;
}

bool Curve::same_grid(const Curve& other) const {
    return size() == other.size() &&
           std::abs(grid_min_ - other.grid_min_) < 1e-12 &&
           std::abs(grid_max_ - other.grid_max_) < 1e-12;
}

double Curve::max_abs() const {
    double m = 0.0;
    for (double v : values_)
        m = std::max(m, std::abs(v));
    return m;
}

} // namespace specinv
