#ifndef SPECINV_CURVE_HPP
#define SPECINV_CURVE_HPP

#include <string>
#include <vector>

namespace specinv {

/// A real function sampled on a uniform grid [grid_min, grid_max] with
/// samples at the nodes (both endpoints included). Carrier for all
/// energy-indexed invariants: A(lambda), B(lambda), v(s), I1, I2, F.
class Curve {
  public:
    Curve() = default;
    Curve(double grid_min, double grid_max, std::vector<double> values,
          std::string label = {});

    /// Uniform grid with `count` nodes, all values zero.
    static Curve zeros(double grid_min, double grid_max, std::size_t count,
                       std::string label = {});

    double grid_min() const { return grid_min_; }
    double grid_max() const { return grid_max_; }
    std::size_t size() const { return values_.size(); }
    double dx() const;
    double x(std::size_t i) const;

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    const std::string& label() const { return label_; }
    void set_label(std::string label) { label_ = std::move(label); }

    /// Linear interpolation; clamps to the end values outside the grid.
    double interp(double x) const;

    /// True if the grids coincide within an absolute slack of 1e-12.
    bool same_grid(const Curve& other) const;

    double max_abs() const;

  private:
    double grid_min_ = 0.0;
    double grid_max_ = 1.0;
    std::vector<double> values_;
    std::string label_;
};

} // namespace specinv

#endif
