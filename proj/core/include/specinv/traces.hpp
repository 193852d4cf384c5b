#ifndef SPECINV_TRACES_HPP
#define SPECINV_TRACES_HPP

#include <string>
#include <utility>
#include <vector>

#include "specinv/curve.hpp"
#include "specinv/oracles.hpp"
#include "specinv/spectra.hpp"

namespace specinv {

/// C^3 smoothed step: 1 below lambda - eps, 0 above lambda + eps, with a
/// degree-7 polynomial transition matching value and three derivatives at
/// both ends (the minimal degree with a continuous third derivative, which
/// is what the h^2 trace coefficient samples).
class Mollifier {
  public:
    Mollifier(double lambda, double eps);

    double center() const { return lambda_; }
    double eps() const { return eps_; }
    double support_lo() const { return lambda_ - eps_; }
    double support_hi() const { return lambda_ + eps_; }

    double value(double s) const;
    double d1(double s) const;
    double d2(double s) const;
    double d3(double s) const;

    /// C with max |f'''| = C / eps^3 (computable from the fixed shape).
    static double shape_constant() { return 52.5 / 8.0; }

  private:
    double lambda_, eps_;
};

/// Coefficients of the model (2 pi h)^n T(h) = a0 + a2 h^2.
struct HFit {
    std::vector<double> h_values;
    double a0 = 0.0;
    double a2 = 0.0;
    bool a2_valid = true;     // false when too few rows to separate a2
    double residual_rms = 0.0;
    double condition = 0.0;   // condition estimate of the 2-column design
    bool ill_conditioned = false;
};

/// Sum of multiplicity * f(E) over the spectrum. The mollifier support must
/// stay below the spectrum cutoff or the sum would silently miss states.
double smoothed_trace(const Spectrum& spec, const Mollifier& f);

/// Least-squares fit of a0, a2 in (2 pi h)^n T = a0 + a2 h^2. Needs at
/// least 3 distinct h values spanning a factor of 2.
HFit fit_h_expansion(const std::vector<std::pair<double, double>>& traces, int n);

struct LambdaGrid {
    double min = 0.0;
    double max = 1.0;
    std::size_t points = 2;
    double dx() const { return (max - min) / double(points - 1); }
};

struct ExtractionParams {
    /// A spectrum at h joins the fit at lambda only when lambda >= kappa * h;
    /// coarser rows are outside the semiclassical regime near the well
    /// bottom and would poison the fit. The two finest rows always remain.
    double kappa = 6.0;
    /// Smooth each rescaled trace curve in lambda with a moving average of
    /// half-width h plus a curvature correction. The window matches the
    /// level-spacing staircase period, which a pointwise fit cannot see past;
    /// without it the extracted curves are neither monotone nor within
    /// tolerance of the quadrature oracles.
    bool phase_filter = true;
};

struct InvariantCurves {
    Curve a_est;    // estimate of the (lambda - V)^{n/2} sublevel integral
    Curve a2;       // fitted h^2 coefficient per lambda
    Curve b_est;    // estimate of the |grad V|^2-weighted counterpart
    Curve residual; // per-lambda fit residual RMS
    std::vector<std::string> flags;
};

/// Rescaled smoothed-trace curve (2 pi h)^n T(lambda) sampled on a grid.
Curve rescaled_trace_curve(const Spectrum& spec, const LambdaGrid& grid, double eps);

/// One phase-filtered row value: the rescaled trace curve around lambda,
/// passed twice through the h-window with the curvature correction. This is
/// what the per-lambda fits consume; exposed so residual-order checks can
/// reconstruct individual fit rows.
double filtered_rescaled_trace(const Spectrum& spec, double lambda, double eps,
                               double dlambda);

/// Full extraction: per-h trace curves, phase filtering, per-lambda fits,
/// and the triple antiderivative for the second invariant.
InvariantCurves extract_invariants(const std::vector<Spectrum>& spectra,
                                   const LambdaGrid& grid, double eps,
                                   const ExtractionParams& params = {});

Curve extract_first_invariant(const std::vector<Spectrum>& spectra,
                              const LambdaGrid& grid, double eps,
                              const ExtractionParams& params = {});

Curve extract_second_invariant(const std::vector<Spectrum>& spectra,
                               const LambdaGrid& grid, double eps,
                               const ExtractionParams& params = {});

/// Quadrature of the two trace-formula sides for cross-checks: the full
/// phase-space integral of f(|xi|^2 + V) (deriv_order 0) or of
/// |grad V|^2 f'''(|xi|^2 + V) (deriv_order 3).
double mollified_phase_space_integral(const ScalarField& field, const Mollifier& f,
                                      int deriv_order, QuadParams params = {});

} // namespace specinv

#endif
