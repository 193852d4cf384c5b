#ifndef SPECINV_POTENTIALS_HPP
#define SPECINV_POTENTIALS_HPP

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "specinv/interp.hpp"

namespace specinv {

/// Monotone radial profile R on [0, R0]: R(0) = 0, R' > 0 on (0, R0),
/// R(R0) = lambda0. Either a power law c*r^p or a strictly increasing
/// table interpolated by monotone cubics.
class RadialProfile {
  public:
    static RadialProfile power_law(int dimension, double r0, double c, double p);

    /// Table must start at (0, 0) and be strictly increasing in both columns.
    static RadialProfile table(int dimension, std::vector<double> r,
                               std::vector<double> values);

    int dimension() const { return dimension_; }
    double r0() const { return r0_; }
    double lambda0() const { return lambda0_; }
    bool is_power_law() const { return power_; }
    double power_exponent() const { return p_; }
    double power_coefficient() const { return c_; }

    /// R(r) for r in [0, R0].
    double value(double r) const;
    /// R'(r); for tables this is the monotone-cubic derivative.
    double derivative(double r) const;

    /// Inverse map rho(s) = R^{-1}(s) on [0, lambda0].
    double inverse(double s) const;

    const std::vector<double>& table_r() const { return table_r_; }
    const std::vector<double>& table_values() const { return table_v_; }

  private:
    RadialProfile() = default;
    int dimension_ = 2;
    double r0_ = 1.0;
    double lambda0_ = 1.0;
    bool power_ = true;
    double c_ = 1.0, p_ = 2.0;
    std::vector<double> table_r_, table_v_;
    PchipInterpolant interp_;
    PchipInterpolant inverse_interp_;
};

/// Axis-aligned evaluation box.
struct Box {
    std::vector<double> lo, hi;
    int dim() const { return int(lo.size()); }
    bool contains(std::span<const double> x, double slack = 0.0) const;
};

/// A smooth scalar field with a gradient, defined on a declared box. The
/// quadrature oracles only see this interface, so tests may supply fields
/// outside the analytic families below.
class ScalarField {
  public:
    virtual ~ScalarField() = default;
    virtual int dimension() const = 0;
    virtual double lambda0() const = 0;
    virtual Box box() const = 0;
    virtual double eval(std::span<const double> x) const = 0;
    virtual void gradient(std::span<const double> x, std::span<double> g) const = 0;
    double grad_norm(std::span<const double> x) const;
};

enum class PotentialFamily {
    Harmonic,             // V(x) = |x - c|^2
    RadialFromProfile,    // V(x) = R(|x - c|), extended beyond R0
    AnisotropicQuadratic, // V(x) = sum w_i (x_i - c_i)^2
    RadialAngular,        // n = 2 only: V = R(r) (1 + a cos(m theta))
};

/// Concrete test potential. Gradients are closed-form for all families
/// except tabulated profiles, which fall back to central differences with
/// step 1e-5 of the box width (reported by gradient_method()).
class AnalyticPotential final : public ScalarField {
  public:
    static AnalyticPotential harmonic(int n, double lambda0,
                                      std::vector<double> center = {});
    static AnalyticPotential from_profile(RadialProfile profile,
                                          std::vector<double> center = {});
    static AnalyticPotential anisotropic(std::vector<double> axis_weights,
                                         double lambda0,
                                         std::vector<double> center = {});
    static AnalyticPotential radial_angular(RadialProfile profile,
                                            double amplitude, int mode,
                                            std::vector<double> center = {});

    int dimension() const override { return n_; }
    double lambda0() const override { return lambda0_; }
    Box box() const override { return box_; }
    double eval(std::span<const double> x) const override;
    void gradient(std::span<const double> x, std::span<double> g) const override;

    PotentialFamily family() const { return family_; }
    const std::vector<double>& center() const { return center_; }
    const RadialProfile* profile() const { return profile_ ? &*profile_ : nullptr; }
    std::string gradient_method() const;

    /// Profile value including the quadratic confining extension past R0.
    double extended_profile(double r) const;
    double extended_profile_derivative(double r) const;

  private:
    AnalyticPotential() = default;
    void check_point(std::span<const double> x) const;
    double eval_unchecked(std::span<const double> x) const;

    PotentialFamily family_ = PotentialFamily::Harmonic;
    int n_ = 2;
    double lambda0_ = 1.0;
    std::vector<double> center_;
    std::vector<double> weights_;
    double amplitude_ = 0.0;
    int mode_ = 0;
    std::shared_ptr<const RadialProfile> profile_;
    Box box_;
};

} // namespace specinv

#endif
