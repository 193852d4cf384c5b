#include "specinv/potentials.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "specinv/errors.hpp"

namespace specinv {

namespace {

constexpr int kMaxDim = 8;

void require_dimension(int n) {
    if (n < 2 || n > kMaxDim)
        throw config_error("potential dimension must be in [2, 8], got " +
                           std::to_string(n));
}

std::vector<double> resolve_center(std::vector<double> center, int n) {
    if (center.empty())
        return std::vector<double>(n, 0.0);
    if (int(center.size()) != n)
        throw config_error("potential center has wrong dimension");
    return center;
}

} // namespace

RadialProfile RadialProfile::power_law(int dimension, double r0, double c, double p) {
    require_dimension(dimension);
    if (!(r0 > 0.0) || !(c > 0.0) || !(p >= 1.0))
        throw config_error("power-law profile needs R0 > 0, c > 0, p >= 1");
    RadialProfile out;
    out.dimension_ = dimension;
    out.r0_ = r0;
    out.power_ = true;
    out.c_ = c;
    out.p_ = p;
    out.lambda0_ = c * std::pow(r0, p);
    return out;
}

RadialProfile RadialProfile::table(int dimension, std::vector<double> r,
                                   std::vector<double> values) {
    require_dimension(dimension);
    if (r.size() < 3 || r.size() != values.size())
        throw config_error("table profile needs >= 3 matching samples");
    if (std::abs(r.front()) > 1e-14 || std::abs(values.front()) > 1e-14)
        throw config_error("table profile must start at (0, 0)");
    for (std::size_t i = 0; i + 1 < r.size(); ++i)
        if (!(r[i + 1] > r[i]) || !(values[i + 1] > values[i]))
            throw config_error("table profile must be strictly increasing");
    RadialProfile out;
    out.dimension_ = dimension;
    out.power_ = false;
    out.r0_ = r.back();
    out.lambda0_ = values.back();
    out.interp_ = PchipInterpolant(r, values);
    out.inverse_interp_ = PchipInterpolant(values, r);
    out.table_r_ = std::move(r);
    out.table_v_ = std::move(values);
    return out;
}

double RadialProfile::value(double r) const {
    if (power_)
        return c_ * std::pow(r, p_);
    return interp_.value(r);
}

double RadialProfile::derivative(double r) const {
    if (power_)
        return c_ * p_ * std::pow(r, p_ - 1.0);
    return interp_.derivative(r);
}

double RadialProfile::inverse(double s) const {
    if (power_)
        return std::pow(s / c_, 1.0 / p_);
    return inverse_interp_.value(s);
}

bool Box::contains(std::span<const double> x, double slack) const {
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (x[i] < lo[i] - slack || x[i] > hi[i] + slack)
            return false;
    return true;
}

double ScalarField::grad_norm(std::span<const double> x) const {
    std::array<double, kMaxDim> g{};
    gradient(x, std::span<double>(g.data(), dimension()));
    double s = 0.0;
    for (int i = 0; i < dimension(); ++i)
        s += g[i] * g[i];
    return std::sqrt(s);
}

namespace {

Box centered_box(const std::vector<double>& center, const std::vector<double>& half) {
    Box b;
    b.lo.resize(center.size());
    b.hi.resize(center.size());
    for (std::size_t i = 0; i < center.size(); ++i) {
        b.lo[i] = center[i] - half[i];
        b.hi[i] = center[i] + half[i];
    }
    return b;
}

} // namespace

AnalyticPotential AnalyticPotential::harmonic(int n, double lambda0,
                                              std::vector<double> center) {
    require_dimension(n);
    if (!(lambda0 > 0.0))
        throw config_error("harmonic potential needs lambda0 > 0");
    AnalyticPotential p;
    p.family_ = PotentialFamily::Harmonic;
    p.n_ = n;
    p.lambda0_ = lambda0;
    p.center_ = resolve_center(std::move(center), n);
    p.box_ = centered_box(p.center_,
                          std::vector<double>(n, 1.2 * std::sqrt(lambda0)));
    return p;
}

AnalyticPotential AnalyticPotential::from_profile(RadialProfile profile,
                                                  std::vector<double> center) {
    AnalyticPotential p;
    p.family_ = PotentialFamily::RadialFromProfile;
    p.n_ = profile.dimension();
    p.lambda0_ = profile.lambda0();
    p.center_ = resolve_center(std::move(center), p.n_);
    p.box_ = centered_box(p.center_, std::vector<double>(p.n_, 1.25 * profile.r0()));
    p.profile_ = std::make_shared<RadialProfile>(std::move(profile));
    return p;
}

AnalyticPotential AnalyticPotential::anisotropic(std::vector<double> axis_weights,
                                                 double lambda0,
                                                 std::vector<double> center) {
    int n = int(axis_weights.size());
    require_dimension(n);
    if (!(lambda0 > 0.0))
        throw config_error("anisotropic potential needs lambda0 > 0");
    for (double w : axis_weights)
        if (!(w > 0.0))
            throw config_error("anisotropic axis weights must be positive");
    AnalyticPotential p;
    p.family_ = PotentialFamily::AnisotropicQuadratic;
    p.n_ = n;
    p.lambda0_ = lambda0;
    p.weights_ = std::move(axis_weights);
    p.center_ = resolve_center(std::move(center), n);
    std::vector<double> half(n);
    for (int i = 0; i < n; ++i)
        half[i] = 1.2 * std::sqrt(lambda0 / p.weights_[i]);
    p.box_ = centered_box(p.center_, half);
    return p;
}

AnalyticPotential AnalyticPotential::radial_angular(RadialProfile profile,
                                                    double amplitude, int mode,
                                                    std::vector<double> center) {
    if (profile.dimension() != 2)
        throw config_error("radial-angular perturbation is defined for n = 2 only");
    if (!(std::abs(amplitude) < 0.5) || mode < 1)
        throw config_error("radial-angular needs |amplitude| < 0.5 and mode >= 1");
    AnalyticPotential p;
    p.family_ = PotentialFamily::RadialAngular;
    p.n_ = 2;
    p.lambda0_ = profile.lambda0();
    p.amplitude_ = amplitude;
    p.mode_ = mode;
    p.center_ = resolve_center(std::move(center), 2);
    double reach = 1.25 * profile.r0() / std::sqrt(1.0 - std::abs(amplitude));
    p.box_ = centered_box(p.center_, std::vector<double>(2, reach));
    p.profile_ = std::make_shared<RadialProfile>(std::move(profile));
    return p;
}

void AnalyticPotential::check_point(std::span<const double> x) const {
    if (int(x.size()) != n_)
        throw domain_error("evaluation point has wrong dimension");
    if (!box_.contains(x, 1e-9))
        throw domain_error("evaluation point outside the declared box");
}

double AnalyticPotential::extended_profile(double r) const {
    const RadialProfile& prof = *profile_;
    if (r <= prof.r0())
        return prof.value(r);
    // Confining C1 extension: keeps V > lambda0 past R0 and grows
    // quadratically, so low eigenvalues are insensitive to it.
    double dr = r - prof.r0();
    return prof.lambda0() + prof.derivative(prof.r0()) * dr + dr * dr;
}

double AnalyticPotential::extended_profile_derivative(double r) const {
    const RadialProfile& prof = *profile_;
    if (r <= prof.r0())
        return prof.derivative(r);
    return prof.derivative(prof.r0()) + 2.0 * (r - prof.r0());
}

double AnalyticPotential::eval_unchecked(std::span<const double> x) const {
    std::array<double, kMaxDim> dx{};
    for (int i = 0; i < n_; ++i)
        dx[i] = x[i] - center_[i];
    switch (family_) {
    case PotentialFamily::Harmonic: {
        double s = 0.0;
        for (int i = 0; i < n_; ++i)
            s += dx[i] * dx[i];
        return s;
    }
    case PotentialFamily::AnisotropicQuadratic: {
        double s = 0.0;
        for (int i = 0; i < n_; ++i)
            s += weights_[i] * dx[i] * dx[i];
        return s;
    }
    case PotentialFamily::RadialFromProfile: {
        double r2 = 0.0;
        for (int i = 0; i < n_; ++i)
            r2 += dx[i] * dx[i];
        return extended_profile(std::sqrt(r2));
    }
    case PotentialFamily::RadialAngular: {
        double r = std::hypot(dx[0], dx[1]);
        double theta = std::atan2(dx[1], dx[0]);
        return extended_profile(r) * (1.0 + amplitude_ * std::cos(mode_ * theta));
    }
    }
    return 0.0;
}

double AnalyticPotential::eval(std::span<const double> x) const {
    check_point(x);
    return eval_unchecked(x);
}

void AnalyticPotential::gradient(std::span<const double> x, std::span<double> g) const {
    check_point(x);
    std::array<double, kMaxDim> dx{};
    for (int i = 0; i < n_; ++i)
        dx[i] = x[i] - center_[i];
    switch (family_) {
    case PotentialFamily::Harmonic:
        for (int i = 0; i < n_; ++i)
            g[i] = 2.0 * dx[i];
        return;
    case PotentialFamily::AnisotropicQuadratic:
        for (int i = 0; i < n_; ++i)
            g[i] = 2.0 * weights_[i] * dx[i];
        return;
    case PotentialFamily::RadialFromProfile: {
        double r2 = 0.0;
        for (int i = 0; i < n_; ++i)
            r2 += dx[i] * dx[i];
        double r = std::sqrt(r2);
        if (profile_->is_power_law() || r > profile_->r0()) {
            if (r < 1e-300) {
                std::fill(g.begin(), g.end(), 0.0);
                return;
            }
            double dVdr = extended_profile_derivative(r);
            for (int i = 0; i < n_; ++i)
                g[i] = dVdr * dx[i] / r;
            return;
        }
        // Tabulated profile: central differences, step 1e-5 of box width.
        double width = box_.hi[0] - box_.lo[0];
        double step = 1e-5 * width;
        std::array<double, kMaxDim> xp{}, xm{};
        for (int i = 0; i < n_; ++i) {
            xp[i] = x[i];
            xm[i] = x[i];
        }
        for (int i = 0; i < n_; ++i) {
            xp[i] = x[i] + step;
            xm[i] = x[i] - step;
            g[i] = (eval_unchecked(std::span<const double>(xp.data(), n_)) -
                    eval_unchecked(std::span<const double>(xm.data(), n_))) /
                   (2.0 * step);
            xp[i] = x[i];
            xm[i] = x[i];
        }
        return;
    }
    case PotentialFamily::RadialAngular: {
        double r = std::hypot(dx[0], dx[1]);
        if (r < 1e-300) {
            g[0] = g[1] = 0.0;
            return;
        }
        double theta = std::atan2(dx[1], dx[0]);
        double ang = 1.0 + amplitude_ * std::cos(mode_ * theta);
        double dang = -amplitude_ * mode_ * std::sin(mode_ * theta);
        double Rr = extended_profile(r);
        double dR = extended_profile_derivative(r);
        // grad = dV/dr * rhat + (1/r) dV/dtheta * thetahat
        double ur0 = dx[0] / r, ur1 = dx[1] / r;
        double dVdr = dR * ang;
        double dVdt = Rr * dang / r;
        g[0] = dVdr * ur0 - dVdt * ur1;
        g[1] = dVdr * ur1 + dVdt * ur0;
        return;
    }
    }
}

std::string AnalyticPotential::gradient_method() const {
    if (family_ == PotentialFamily::RadialFromProfile && profile_ &&
        !profile_->is_power_law())
        return "central-differences";
    return "closed-form";
}

} // namespace specinv
