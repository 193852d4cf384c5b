#ifndef SPECINV_RECONSTRUCT_HPP
#define SPECINV_RECONSTRUCT_HPP

#include <optional>
#include <string>
#include <vector>

#include "specinv/abel.hpp"
#include "specinv/curve.hpp"
#include "specinv/potentials.hpp"

namespace specinv {

struct ErrorMetrics {
    double max_rel = 0.0;
    double rms_rel = 0.0;
    double r_lo = 0.0;
    double r_hi = 0.0;
};

struct ReconstructionReport {
    RadialProfile profile;
    Curve defect;          // D(s) = I1 I2 - S_iso^2
    Curve gradient_profile; // F(s) = I2 / I1
    std::optional<ErrorMetrics> metrics; // present when a reference was given
    double defect_noise_estimate = 0.0;  // propagated noise scale for D
    bool radial_certificate = false;     // max relative defect < 3x noise
    std::vector<std::string> provenance; // which inputs were oracle vs spectral
    InversionConfig inversion;
};

/// Radius-of-ball map rho(s) = (v(s)/omega_n)^{1/n} followed by monotone
/// inversion of s -> rho(s) onto a uniform r grid. v must be nondecreasing
/// up to noise; violations beyond 5% of the range are an inversion error.
RadialProfile radial_profile_from_volume(const Curve& v, int n);

/// D(s) = I1(s) I2(s) - S_iso(s)^2 with S_iso the surface area of the ball
/// of volume v(s). Nonnegative up to noise; zero exactly when the level
/// sets are spheres with constant gradient modulus.
Curve isoperimetric_defect(const Curve& i1, const Curve& i2, const Curve& v, int n);

/// F(s) = I2(s)/I1(s). On radial data this equals R'(R^{-1}(s))^2; the
/// identity |grad V|^2 = F(V) holds only where the defect vanishes.
Curve gradient_modulus_profile(const Curve& i1, const Curve& i2);

struct ReportInputs {
    Curve volume;
    Curve i1;
    Curve i2;
    int n = 2;
    std::vector<std::string> provenance;
    InversionConfig inversion;
};

/// Assembles profile, defect, and gradient-profile curves plus error
/// metrics against an optional reference profile on r in [0.1, 0.9] of the
/// recovered radius range (the inversion is ill-conditioned at both ends).
ReconstructionReport build_report(const ReportInputs& inputs,
                                  const RadialProfile* reference);

/// Max/RMS relative error of the recovered profile against a reference on
/// [r_lo_frac, r_hi_frac] times the recovered radius range.
ErrorMetrics profile_error_metrics(const RadialProfile& recovered,
                                   const RadialProfile& reference,
                                   double r_lo_frac, double r_hi_frac);

} // namespace specinv

#endif
