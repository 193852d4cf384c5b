#ifndef SPECINV_SPECTRA_HPP
#define SPECINV_SPECTRA_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "specinv/potentials.hpp"

namespace specinv {

enum class SpectrumProvenance { ExactHarmonic, FiniteDifference };

struct SpectrumEntry {
    double energy = 0.0;
    std::int64_t multiplicity = 1;
};

struct SolverMeta {
    int grid_points = 0;
    double r_max = 0.0;
    int l_max_used = -1;
    double eig_tol = 0.0;
};

/// Eigenvalues (with multiplicities) of -h^2 Lap + V below a cutoff at a
/// fixed h. Energies are strictly increasing and lie in (0, lambda_max].
struct Spectrum {
    double h = 0.0;
    int n = 2;
    double lambda_max = 0.0;
    SpectrumProvenance provenance = SpectrumProvenance::ExactHarmonic;
    std::vector<SpectrumEntry> entries;
    SolverMeta meta;

    std::int64_t total_multiplicity() const;
    void validate() const;
};

struct SolverParams {
    double r_max = 3.0;
    int grid_points = 2000;
    double eig_tol = 1e-12;
};

/// Dimension of the space of degree-l spherical harmonics on S^{n-1}.
std::int64_t spherical_harmonic_dim(int l, int n);

/// Spectrum of -h^2 Lap + |x|^2: E_m = h(2m + n), multiplicity
/// binomial(m + n - 1, n - 1).
Spectrum exact_harmonic_spectrum(int n, double h, double lambda_max);

/// Per-angular-momentum reduction to tridiagonal eigenproblems on an offset
/// grid r_j = (j + 1/2) dr with Dirichlet values at both ends of the
/// extended grid. All eigenvalues below lambda_max are found by Sturm
/// bisection and weighted by the spherical-harmonic dimensions.
Spectrum radial_fd_spectrum(const AnalyticPotential& potential, double h,
                            double lambda_max, const SolverParams& params);

/// Sharp counting function: sum of multiplicities over energies < lambda.
double count_below(const Spectrum& spec, double lambda);

/// Deterministic alternating-sign energy perturbation E_j -> E_j + (-1)^j d,
/// used to probe robustness of downstream stages to o(h^2) spectral errors.
Spectrum perturb_alternating(const Spectrum& spec, double delta);

/// All eigenvalues of the symmetric tridiagonal matrix with constant
/// off-diagonal `e` strictly below `x_max`, by Sturm-sequence bisection.
std::vector<double> tridiag_eigenvalues_below(const std::vector<double>& diag,
                                              double e, double x_max, double tol);

} // namespace specinv

#endif
