#include "specinv/traces.hpp"

#include <algorithm>
#include <cmath>

#include "specinv/errors.hpp"
#include "specinv/interp.hpp"
#include "specinv/numeric.hpp"
#include "specinv/parallel.hpp"

namespace specinv {

namespace {

double smoothstep7(double t) {
    double t2 = t * t;
    return t2 * t2 * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)));
}
double smoothstep7_d1(double t) {
    double a = t * t * t;
    double b = (1.0 - t);
    return 140.0 * a * b * b * b;
}
double smoothstep7_d2(double t) {
    double b = 1.0 - t;
    return 420.0 * t * t * b * b * (1.0 - 2.0 * t);
}
double smoothstep7_d3(double t) {
    double b = 1.0 - t;
    double c = 1.0 - 2.0 * t;
    return 840.0 * t * b * (c * c - t * b);
}

} // namespace

Mollifier::Mollifier(double lambda, double eps) : lambda_(lambda), eps_(eps) {
    if (!(eps > 0.0))
        throw config_error("mollifier half-width must be positive");
}

double Mollifier::value(double s) const {
    if (s <= lambda_ - eps_)
        return 1.0;
    if (s >= lambda_ + eps_)
        return 0.0;
    return 1.0 - smoothstep7((s - lambda_ + eps_) / (2.0 * eps_));
}

double Mollifier::d1(double s) const {
    if (s <= lambda_ - eps_ || s >= lambda_ + eps_)
        return 0.0;
    double t = (s - lambda_ + eps_) / (2.0 * eps_);
    return -smoothstep7_d1(t) / (2.0 * eps_);
}

double Mollifier::d2(double s) const {
    if (s <= lambda_ - eps_ || s >= lambda_ + eps_)
        return 0.0;
    double t = (s - lambda_ + eps_) / (2.0 * eps_);
    return -smoothstep7_d2(t) / (4.0 * eps_ * eps_);
}

double Mollifier::d3(double s) const {
    if (s <= lambda_ - eps_ || s >= lambda_ + eps_)
        return 0.0;
    double t = (s - lambda_ + eps_) / (2.0 * eps_);
    return -smoothstep7_d3(t) / (8.0 * eps_ * eps_ * eps_);
}

double smoothed_trace(const Spectrum& spec, const Mollifier& f) {
    if (f.support_hi() > spec.lambda_max * (1.0 + 1e-12))
        throw truncation_error(
            "mollifier support exceeds the spectrum cutoff; the spectrum is "
            "incomplete above lambda_max");
    double acc = 0.0;
    for (const auto& e : spec.entries)
        acc += double(e.multiplicity) * f.value(e.energy);
    return acc;
}

namespace {

struct FitCore {
    double a0 = 0.0, a2 = 0.0, residual_rms = 0.0, condition = 0.0;
};

FitCore fit_core(const std::vector<double>& hs, const std::vector<double>& ys) {
    std::size_t m = hs.size();
    double s0 = double(m), s2 = 0.0, s4 = 0.0, sy = 0.0, sy2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double h2 = hs[i] * hs[i];
        s2 += h2;
        s4 += h2 * h2;
        sy += ys[i];
        sy2 += ys[i] * h2;
    }
    double det = s0 * s4 - s2 * s2;
    FitCore out;
    out.a0 = (s4 * sy - s2 * sy2) / det;
    out.a2 = (s0 * sy2 - s2 * sy) / det;
    double ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double r = ys[i] - out.a0 - out.a2 * hs[i] * hs[i];
        ss += r * r;
    }
    out.residual_rms = std::sqrt(ss / double(m));
    // Condition of the 2-column design from the normal-matrix eigenvalues.
    double tr = s0 + s4;
    double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    double emax = 0.5 * tr + disc, emin = 0.5 * tr - disc;
    out.condition = emin > 0.0 ? std::sqrt(emax / emin) : 1e300;
    return out;
}

} // namespace

HFit fit_h_expansion(const std::vector<std::pair<double, double>>& traces, int n) {
    std::vector<double> hs, ys;
    for (const auto& [h, t] : traces) {
        if (!(h > 0.0))
            throw config_error("fit_h_expansion: h values must be positive");
        hs.push_back(h);
        ys.push_back(std::pow(2.0 * M_PI * h, n) * t);
    }
    std::vector<double> sorted = hs;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.size() < 3)
        throw insufficient_data_error("fit_h_expansion: need >= 3 distinct h values");
    if (sorted.back() < 2.0 * sorted.front() * (1.0 - 1e-12))
        throw insufficient_data_error(
            "fit_h_expansion: h values must span at least a factor of 2");

    FitCore core = fit_core(hs, ys);
    HFit fit;
    fit.h_values = hs;
    fit.a0 = core.a0;
    fit.a2 = core.a2;
    fit.residual_rms = core.residual_rms;
    fit.condition = core.condition;
    fit.ill_conditioned = core.condition > 1e8;
    return fit;
}

Curve rescaled_trace_curve(const Spectrum& spec, const LambdaGrid& grid, double eps) {
    // Prefix multiplicity sums make each trace evaluation O(log + band).
    std::vector<double> energy;
    std::vector<double> prefix; // total multiplicity of entries [0, i)
    energy.reserve(spec.entries.size());
    prefix.reserve(spec.entries.size() + 1);
    prefix.push_back(0.0);
    for (const auto& e : spec.entries) {
        energy.push_back(e.energy);
        prefix.push_back(prefix.back() + double(e.multiplicity));
    }
    double scale = std::pow(2.0 * M_PI * spec.h, spec.n);
    std::vector<double> values(grid.points, 0.0);
    for (std::size_t i = 0; i < grid.points; ++i) {
        double lam = grid.min + double(i) * grid.dx();
        Mollifier f(lam, eps);
        auto lo = std::lower_bound(energy.begin(), energy.end(), f.support_lo());
        auto hi = std::lower_bound(energy.begin(), energy.end(), f.support_hi());
        double acc = prefix[std::size_t(lo - energy.begin())];
        for (auto it = lo; it != hi; ++it) {
            std::size_t k = std::size_t(it - energy.begin());
            acc += (prefix[k + 1] - prefix[k]) * f.value(*it);
        }
        values[i] = scale * acc;
    }
    return Curve(grid.min, grid.max, std::move(values), "trace");
}

namespace {

struct RowCurves {
    double h = 0.0;
    std::vector<double> filtered; // on the extended grid
};

std::vector<double> phase_filter_row(const std::vector<double>& raw, double dl,
                                     double h) {
    // Two window passes: one kills the level-spacing staircase, the second
    // its linear amplitude growth (the window first moment of a periodic
    // component is again periodic with zero mean).
    std::vector<double> smooth =
        moving_average(moving_average(raw, dl, h), dl, h);
    // Window bias on the smooth part is 2 (h^2/6) C''; subtract it so the
    // filtered curve keeps its own h^2 coefficient intact.
    std::vector<double> curv = second_difference(smooth, dl);
    std::vector<double> out(smooth.size());
    for (std::size_t i = 0; i < smooth.size(); ++i)
        out[i] = smooth[i] - (h * h / 3.0) * curv[i];
    return out;
}

} // namespace

double filtered_rescaled_trace(const Spectrum& spec, double lambda, double eps,
                               double dlambda) {
    double reach = 2.0 * spec.h + 4.0 * dlambda;
    std::size_t half = std::size_t(std::ceil(reach / dlambda));
    LambdaGrid local{lambda - double(half) * dlambda,
                     lambda + double(half) * dlambda, 2 * half + 1};
    Curve raw = rescaled_trace_curve(spec, local, eps);
    std::vector<double> filtered = phase_filter_row(raw.values(), dlambda, spec.h);
    return filtered[half];
}

InvariantCurves extract_invariants(const std::vector<Spectrum>& spectra,
                                   const LambdaGrid& grid, double eps,
                                   const ExtractionParams& params) {
    if (spectra.empty())
        throw insufficient_data_error("extraction needs at least one spectrum");
    if (grid.points < 8)
        throw config_error("extraction lambda grid needs >= 8 points");
    const int n = spectra.front().n;
    const double lambda_max = spectra.front().lambda_max;
    for (const auto& s : spectra) {
        if (s.n != n)
            throw config_error("extraction: spectra must share the dimension");
        if (std::abs(s.lambda_max - lambda_max) > 1e-12 * std::max(1.0, lambda_max))
            throw config_error("extraction: spectra must share lambda_max");
    }
    std::vector<double> hs;
    for (const auto& s : spectra)
        hs.push_back(s.h);
    double h_max = *std::max_element(hs.begin(), hs.end());

    const double dl = grid.dx();
    const double margin = params.phase_filter ? 2.0 * h_max + 2.0 * dl : 0.0;
    if (grid.max + margin + eps > lambda_max * (1.0 + 1e-12))
        throw truncation_error(
            "extraction needs lambda_max >= grid max + filter margin + eps");

    // Extended grid: traces vanish identically below the ground states, so
    // extending past zero costs nothing and keeps the filter windows full.
    std::size_t extra_lo = std::size_t(std::ceil(margin / dl)) + 1;
    std::size_t extra_hi = extra_lo;
    LambdaGrid ext{grid.min - double(extra_lo) * dl,
                   grid.max + double(extra_hi) * dl,
                   grid.points + extra_lo + extra_hi};

    std::vector<RowCurves> rows(spectra.size());
    parallel_for(spectra.size(), [&](std::size_t si) {
        const Spectrum& spec = spectra[si];
        Curve raw = rescaled_trace_curve(spec, ext, eps);
        RowCurves row;
        row.h = spec.h;
        if (params.phase_filter)
            row.filtered = phase_filter_row(raw.values(), dl, spec.h);
        else
            row.filtered = raw.values();
        rows[si] = std::move(row);
    });

    // Order rows by h so the "finest two" fallback is well defined.
    std::vector<std::size_t> order(rows.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return rows[a].h < rows[b].h;
    });

    InvariantCurves out;
    out.a_est = Curve::zeros(grid.min, grid.max, grid.points, "A_est");
    out.a2 = Curve::zeros(grid.min, grid.max, grid.points, "a2");
    out.b_est = Curve::zeros(grid.min, grid.max, grid.points, "B_est");
    out.residual = Curve::zeros(grid.min, grid.max, grid.points, "residual");
    out.flags.assign(grid.points, "");
    const double omega = unit_ball_volume(n);

    std::vector<double> fit_h, fit_y;
    for (std::size_t i = 0; i < grid.points; ++i) {
        double lam = grid.min + double(i) * dl;
        std::size_t ei = i + extra_lo; // index on the extended grid
        fit_h.clear();
        fit_y.clear();
        for (std::size_t oi : order) {
            const RowCurves& row = rows[oi];
            if (lam >= params.kappa * row.h) {
                fit_h.push_back(row.h);
                fit_y.push_back(row.filtered[ei]);
            }
        }
        if (fit_h.size() < 2) {
            // Below the eligibility window: the finest rows are the only
            // semiclassically meaningful data there.
            fit_h.clear();
            fit_y.clear();
            for (std::size_t k = 0; k < order.size() && k < 2; ++k) {
                const RowCurves& row = rows[order[k]];
                fit_h.push_back(row.h);
                fit_y.push_back(row.filtered[ei]);
            }
            out.flags[i] = fit_h.size() < 2 ? "single-h" : "coarse-extrapolation";
        }
        double a0, a2, rms = 0.0;
        if (fit_h.size() == 1) {
            a0 = fit_y[0];
            a2 = 0.0;
        } else if (fit_h.size() == 2) {
            double h1 = fit_h[0] * fit_h[0], h2 = fit_h[1] * fit_h[1];
            a0 = (fit_y[0] * h2 - fit_y[1] * h1) / (h2 - h1);
            a2 = (fit_y[1] - fit_y[0]) / (h2 - h1);
            if (out.flags[i].empty())
                out.flags[i] = "minimal-rows";
        } else {
            FitCore core = fit_core(fit_h, fit_y);
            a0 = core.a0;
            a2 = core.a2;
            rms = core.residual_rms;
            if (core.condition > 1e8)
                out.flags[i] = "ill-conditioned";
        }
        out.a_est[i] = a0 / omega;
        out.a2[i] = a2;
        out.residual[i] = rms;
    }

    // Noise screen on the h^2 coefficient: residual against the size of the
    // a2 h^2 term it was fitted from.
    for (std::size_t i = 0; i < grid.points; ++i) {
        double scale = std::abs(out.a2[i]) * h_max * h_max;
        if (scale > 0.0 && out.residual[i] > 0.1 * scale) {
            if (!out.flags[i].empty())
                out.flags[i] += "|";
            out.flags[i] += "a2-noisy";
        }
    }

    // Second invariant: the fitted h^2 coefficient of a downward mollified
    // step equals -(1/12) G''' with G the gradient-weighted phase-space
    // volume, so G is recovered as -12 times the triple antiderivative.
    std::vector<double> g3 = out.a2.values();
    std::vector<double> g2 = cumulative_trapezoid(g3, dl);
    std::vector<double> g1 = cumulative_trapezoid(g2, dl);
    std::vector<double> g0 = cumulative_trapezoid(g1, dl);
    for (std::size_t i = 0; i < grid.points; ++i)
        out.b_est[i] = -12.0 * g0[i] / omega;
    return out;
}

Curve extract_first_invariant(const std::vector<Spectrum>& spectra,
                              const LambdaGrid& grid, double eps,
                              const ExtractionParams& params) {
    return extract_invariants(spectra, grid, eps, params).a_est;
}

Curve extract_second_invariant(const std::vector<Spectrum>& spectra,
                               const LambdaGrid& grid, double eps,
                               const ExtractionParams& params) {
    return extract_invariants(spectra, grid, eps, params).b_est;
}

double mollified_phase_space_integral(const ScalarField& field, const Mollifier& f,
                                      int deriv_order, QuadParams params) {
    TestFunction1D g;
    g.support_lo = f.support_lo();
    g.support_hi = f.support_hi();
    if (deriv_order == 0) {
        g.g = [f](double s) { return f.value(s); };
        g.flat_below = true;
        return phase_space_test_integral(field, g, PhaseWeight::One, params);
    }
    if (deriv_order == 3) {
        g.g = [f](double s) { return f.d3(s); };
        g.flat_below = false;
        return phase_space_test_integral(field, g, PhaseWeight::GradSquared, params);
    }
    throw config_error("mollified_phase_space_integral: deriv_order must be 0 or 3");
}

} // namespace specinv
