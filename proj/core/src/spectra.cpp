#include "specinv/spectra.hpp"

#include <algorithm>
#include <cmath>

#include "specinv/errors.hpp"
#include "specinv/numeric.hpp"
#include "specinv/parallel.hpp"

namespace specinv {

std::int64_t Spectrum::total_multiplicity() const {
    std::int64_t t = 0;
    for (const auto& e : entries)
        t += e.multiplicity;
    return t;
}

void Spectrum::validate() const {
    if (!(h > 0.0))
        throw config_error("spectrum: h must be positive");
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!(entries[i].energy > 0.0) ||
            entries[i].energy > lambda_max * (1.0 + 2e-6))
            throw config_error("spectrum: energies must lie in (0, lambda_max]");
        if (entries[i].multiplicity < 1)
            throw config_error("spectrum: multiplicities must be >= 1");
        if (i > 0 && !(entries[i].energy > entries[i - 1].energy))
            throw config_error("spectrum: energies must be strictly increasing");
    }
}

std::int64_t spherical_harmonic_dim(int l, int n) {
    if (l < 0 || n < 2)
        throw config_error("spherical_harmonic_dim: need l >= 0, n >= 2");
    if (l == 0)
        return 1;
    if (n == 2)
        return 2;
    double d = binomial(l + n - 1, n - 1) - binomial(l + n - 3, n - 1);
    return std::int64_t(d);
}

Spectrum exact_harmonic_spectrum(int n, double h, double lambda_max) {
    if (!(h > 0.0))
        throw config_error("exact_harmonic_spectrum: h must be positive");
    if (n < 2)
        throw config_error("exact_harmonic_spectrum: n must be >= 2");
    Spectrum spec;
    spec.h = h;
    spec.n = n;
    spec.lambda_max = lambda_max;
    spec.provenance = SpectrumProvenance::ExactHarmonic;
    for (std::int64_t m = 0;; ++m) {
        double energy = h * double(2 * m + n);
        if (energy > lambda_max)
            break;
        spec.entries.push_back({energy, std::int64_t(binomial(m + n - 1, n - 1))});
    }
    return spec;
}

namespace {

// Eigenvalue count strictly below x via the Sturm/LDL sign recurrence.
int sturm_count(const std::vector<double>& d, double e2, double x) {
    int cnt = 0;
    double q = 1.0;
    for (std::size_t j = 0; j < d.size(); ++j) {
        q = (j == 0) ? d[0] - x : d[j] - x - e2 / q;
        if (q == 0.0)
            q = -1e-300;
        if (q < 0.0)
            ++cnt;
    }
    return cnt;
}

} // namespace

std::vector<double> tridiag_eigenvalues_below(const std::vector<double>& diag,
                                              double e, double x_max, double tol) {
    if (diag.empty())
        return {};
    double e2 = e * e;
    double glo = diag[0];
    for (double dj : diag)
        glo = std::min(glo, dj);
    glo -= 2.0 * std::abs(e) + 1.0;

    int k = sturm_count(diag, e2, x_max);
    std::vector<double> eigs(static_cast<std::size_t>(std::max(0, k)));
    for (int i = 0; i < k; ++i) {
        double lo = glo, hi = x_max;
        for (int it = 0; it < 200 && hi - lo > tol; ++it) {
            double mid = 0.5 * (lo + hi);
            if (sturm_count(diag, e2, mid) > i)
                hi = mid;
            else
                lo = mid;
        }
        if (hi - lo > 16.0 * tol)
            throw numerical_error("tridiagonal bisection failed to converge");
        eigs[std::size_t(i)] = 0.5 * (lo + hi);
    }
    return eigs;
}

namespace {

// Centrifugal coefficients fitted so the stencil annihilates the channel's
// boundary solution r^{nu+1/2} exactly at every node (with the Dirichlet
// ghost at r = -dr/2). The pointwise value (nu^2 - 1/4)/r^2 loses an order
// near the origin for small nu; the 2-D s wave (nu = 0) does not even
// converge at second order without this. Computed through log-ratios so
// large nu cannot overflow.
std::vector<double> centrifugal_coefficients(double nu, double dr, int points) {
    double s = nu + 0.5;
    std::vector<double> c(static_cast<std::size_t>(points));
    double inv_dr2 = 1.0 / (dr * dr);
    for (int j = 0; j < points; ++j) {
        double up = std::exp(s * std::log((j + 1.5) / (j + 0.5)));
        double down = j == 0 ? 0.0 : std::exp(s * std::log((j - 0.5) / (j + 0.5)));
        double val = (up + down - 2.0) * inv_dr2;
        c[std::size_t(j)] = std::min(val, 1e12 * inv_dr2);
    }
    return c;
}

} // namespace

Spectrum radial_fd_spectrum(const AnalyticPotential& potential, double h,
                            double lambda_max, const SolverParams& params) {
    if (potential.family() != PotentialFamily::RadialFromProfile &&
        potential.family() != PotentialFamily::Harmonic)
        throw config_error("forward solver requires a radial potential");
    if (!(h > 0.0))
        throw config_error("radial_fd_spectrum: h must be positive");
    if (params.grid_points < 100)
        throw config_error("radial_fd_spectrum: need >= 100 grid points");
    const int n = potential.dimension();
    const RadialProfile* prof = potential.profile();
    if (prof && !(params.r_max > prof->r0()))
        throw config_error("radial_fd_spectrum: r_max must exceed R0");
    if (prof && !(lambda_max <= prof->lambda0() * (1.0 + 1e-12)))
        throw config_error("radial_fd_spectrum: lambda_max must not exceed lambda0");

    auto radial_value = [&](double r) {
        if (prof)
            return potential.extended_profile(r);
        return r * r; // harmonic family
    };

    const int M = params.grid_points;
    const double dr = params.r_max / double(M);
    const double kin = h * h / (dr * dr);

    std::vector<double> base_diag(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j)
        base_diag[std::size_t(j)] = 2.0 * kin + radial_value((j + 0.5) * dr);

    // l cutoff: stop at the first l whose effective potential floor clears
    // lambda_max; no bound states below the cutoff can exist past it.
    std::vector<int> l_values;
    for (int l = 0;; ++l) {
        double nu = l + 0.5 * (n - 2);
        double coeff = h * h * (nu * nu - 0.25);
        double floor_val = 1e300;
        for (int j = 0; j < M; ++j) {
            double r = (j + 0.5) * dr;
            floor_val = std::min(floor_val, radial_value(r) + coeff / (r * r));
        }
        if (floor_val > lambda_max)
            break;
        l_values.push_back(l);
        if (l > 100000)
            throw config_error("centrifugal barrier never exceeded lambda_max");
    }

    std::vector<std::vector<double>> per_l(l_values.size());
    std::vector<std::string> failures(l_values.size());
    parallel_for(l_values.size(), [&](std::size_t li) {
        int l = l_values[li];
        double nu = l + 0.5 * (n - 2);
        std::vector<double> diag = base_diag;
        std::vector<double> cf = centrifugal_coefficients(nu, dr, M);
        for (int j = 0; j < M; ++j)
            diag[std::size_t(j)] += h * h * cf[std::size_t(j)];
        try {
            // The interval is closed at the top; a slight search slack keeps
            // states whose true energy sits at lambda_max from being lost to
            // discretization error of the opposite sign.
            per_l[li] = tridiag_eigenvalues_below(
                diag, -kin, lambda_max * (1.0 + 1e-6), params.eig_tol);
        } catch (const numerical_error& err) {
            failures[li] = "l = " + std::to_string(l) + ": " + err.what();
        }
    });
    for (std::size_t li = 0; li < l_values.size(); ++li)
        if (!failures[li].empty())
            throw numerical_error("eigensolver failed at " + failures[li]);

    // Weight by spherical-harmonic dimensions and merge across l; energies
    // closer than the merge tolerance become one entry.
    std::vector<SpectrumEntry> all;
    for (std::size_t li = 0; li < l_values.size(); ++li) {
        std::int64_t mult = spherical_harmonic_dim(l_values[li], n);
        for (double energy : per_l[li])
            if (energy > 0.0)
                all.push_back({energy, mult});
    }
    std::sort(all.begin(), all.end(), [](const SpectrumEntry& a, const SpectrumEntry& b) {
        return a.energy < b.energy;
    });
    const double merge_tol = 1e-9 * lambda_max;
    Spectrum spec;
    spec.h = h;
    spec.n = n;
    spec.lambda_max = lambda_max;
    spec.provenance = SpectrumProvenance::FiniteDifference;
    spec.meta = {M, params.r_max, l_values.empty() ? -1 : l_values.back(),
                 params.eig_tol};
    for (const auto& entry : all) {
        if (!spec.entries.empty() &&
            entry.energy - spec.entries.back().energy <= merge_tol)
            spec.entries.back().multiplicity += entry.multiplicity;
        else
            spec.entries.push_back(entry);
    }
    return spec;
}

double count_below(const Spectrum& spec, double lambda) {
    if (lambda > spec.lambda_max * (1.0 + 1e-12))
        throw config_error("count_below: lambda exceeds the spectrum cutoff");
    double count = 0.0;
    for (const auto& e : spec.entries) {
        if (e.energy < lambda)
            count += double(e.multiplicity);
        else
            break;
    }
    return count;
}

Spectrum perturb_alternating(const Spectrum& spec, double delta) {
    Spectrum out = spec;
    int sign = 1;
    for (auto& e : out.entries) {
        e.energy += sign * delta;
        sign = -sign;
    }
    std::sort(out.entries.begin(), out.entries.end(),
              [](const SpectrumEntry& a, const SpectrumEntry& b) {
                  return a.energy < b.energy;
              });
    return out;
}

} // namespace specinv
