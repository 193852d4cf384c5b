#ifndef SPECINV_CONFIG_HPP
#define SPECINV_CONFIG_HPP

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "specinv/abel.hpp"
#include "specinv/potentials.hpp"
#include "specinv/spectra.hpp"
#include "specinv/traces.hpp"

namespace specinv {

struct OracleConfig {
    int cells = 0;          // 0 = dimension default
    int s_points = 25;
    double s_min_frac = 0.1; // fractions of lambda0 for the s grid
    double s_max_frac = 0.9;
    int bins = 100;          // pushforward histogram bins
};

struct FlowlineConfig {
    int count = 8;
    double s0_frac = 0.25; // fraction of lambda0
    double t_end = 1.0;
    double dt = 1e-3;
    double line_tol = 1e-6;
    double spread_tol = 1e-5;
};

struct RunConfig {
    std::shared_ptr<AnalyticPotential> potential;
    std::optional<RadialProfile> reference_profile; // set for radial families

    SolverParams solver;
    std::string forward_method = "auto"; // auto | exact-harmonic | finite-difference
    double spectra_lambda_max = 0.0;     // 0 = lambda0

    std::vector<double> h_grid;
    LambdaGrid lambda_grid;
    double mollifier_eps = 0.0; // 0 = 0.01 * lambda0
    ExtractionParams extraction;
    InversionConfig inversion;
    std::string pipeline_source = "spectral"; // spectral | oracle

    OracleConfig oracle;
    FlowlineConfig flowlines;

    unsigned threads = 0;
    std::uint64_t seed = 0; // reserved, unused

    double eps() const;
    double spectra_cutoff() const;
};

/// Parses and validates the single JSON run configuration.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text);

} // namespace specinv

#endif
