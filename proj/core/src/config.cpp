#include "specinv/config.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "specinv/errors.hpp"

namespace specinv {

using nlohmann::json;

double RunConfig::eps() const {
    return mollifier_eps > 0.0 ? mollifier_eps : 0.01 * potential->lambda0();
}

double RunConfig::spectra_cutoff() const {
    return spectra_lambda_max > 0.0 ? spectra_lambda_max : potential->lambda0();
}

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key))
        return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw config_error(std::string("config field '") + key + "': " + e.what());
    }
}

RadialProfile parse_profile(const json& j, int n) {
    std::string form = get_or<std::string>(j, "form", "power");
    if (form == "power") {
        double r0 = get_or<double>(j, "r0", 1.0);
        double c = get_or<double>(j, "c", 1.0);
        double p = get_or<double>(j, "p", 2.0);
        return RadialProfile::power_law(n, r0, c, p);
    }
    if (form == "table") {
        auto r = get_or<std::vector<double>>(j, "r", {});
        auto values = get_or<std::vector<double>>(j, "values", {});
        return RadialProfile::table(n, std::move(r), std::move(values));
    }
    throw config_error("profile form must be 'power' or 'table'");
}

} // namespace

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig cfg;

    if (!j.contains("potential"))
        throw config_error("config needs a 'potential' section");
    const json& jp = j.at("potential");
    std::string family = get_or<std::string>(jp, "family", "harmonic");
    int n = get_or<int>(jp, "n", 2);
    auto center = get_or<std::vector<double>>(jp, "center", {});

    if (family == "harmonic") {
        double lambda0 = get_or<double>(jp, "lambda0", 1.0);
        if (!(lambda0 > 0.0))
            throw config_error("lambda0 must be positive");
        cfg.potential = std::make_shared<AnalyticPotential>(
            AnalyticPotential::harmonic(n, lambda0, center));
        cfg.reference_profile = RadialProfile::power_law(n, std::sqrt(lambda0), 1.0, 2.0);
    } else if (family == "radial-profile") {
        if (!jp.contains("profile"))
            throw config_error("radial-profile potential needs a 'profile' section");
        RadialProfile prof = parse_profile(jp.at("profile"), n);
        cfg.reference_profile = prof;
        cfg.potential = std::make_shared<AnalyticPotential>(
            AnalyticPotential::from_profile(std::move(prof), center));
    } else if (family == "anisotropic") {
        auto weights = get_or<std::vector<double>>(jp, "weights", {});
        double lambda0 = get_or<double>(jp, "lambda0", 1.0);
        cfg.potential = std::make_shared<AnalyticPotential>(
            AnalyticPotential::anisotropic(std::move(weights), lambda0, center));
    } else if (family == "radial-angular") {
        if (!jp.contains("profile"))
            throw config_error("radial-angular potential needs a 'profile' section");
        RadialProfile prof = parse_profile(jp.at("profile"), n);
        double amplitude = get_or<double>(jp, "amplitude", 0.1);
        int mode = get_or<int>(jp, "mode", 3);
        cfg.potential = std::make_shared<AnalyticPotential>(
            AnalyticPotential::radial_angular(std::move(prof), amplitude, mode,
                                              center));
    } else {
        throw config_error("unknown potential family: " + family);
    }
    double lambda0 = cfg.potential->lambda0();

    if (j.contains("solver")) {
        const json& js = j.at("solver");
        cfg.solver.r_max = get_or<double>(js, "r_max", cfg.solver.r_max);
        cfg.solver.grid_points = get_or<int>(js, "grid_points", cfg.solver.grid_points);
        cfg.solver.eig_tol = get_or<double>(js, "eig_tol", cfg.solver.eig_tol);
        cfg.forward_method = get_or<std::string>(js, "method", cfg.forward_method);
        cfg.spectra_lambda_max =
            get_or<double>(js, "lambda_max", cfg.spectra_lambda_max);
        if (cfg.forward_method != "auto" && cfg.forward_method != "exact-harmonic" &&
            cfg.forward_method != "finite-difference")
            throw config_error("solver method must be auto, exact-harmonic, or "
                               "finite-difference");
    }

    if (j.contains("h_grid")) {
        const json& jh = j.at("h_grid");
        if (jh.is_array()) {
            cfg.h_grid = jh.get<std::vector<double>>();
        } else {
            double h0 = get_or<double>(jh, "h0", 0.05 * lambda0);
            int count = get_or<int>(jh, "count", 6);
            double ratio = get_or<double>(jh, "ratio", 0.5);
            if (!(h0 > 0.0) || count < 1 || !(ratio > 0.0) || !(ratio < 1.0))
                throw config_error("h_grid needs h0 > 0, count >= 1, ratio in (0,1)");
            double h = h0;
            for (int i = 0; i < count; ++i, h *= ratio)
                cfg.h_grid.push_back(h);
        }
    } else {
        double h = 0.05 * lambda0;
        for (int i = 0; i < 6; ++i, h *= 0.5)
            cfg.h_grid.push_back(h);
    }
    if (cfg.h_grid.empty())
        throw config_error("h_grid must not be empty");
    for (double h : cfg.h_grid)
        if (!(h > 0.0))
            throw config_error("h values must be positive");

    if (j.contains("lambda_grid")) {
        const json& jl = j.at("lambda_grid");
        cfg.lambda_grid.min = get_or<double>(jl, "min", 0.0);
        cfg.lambda_grid.max = get_or<double>(jl, "max", 0.85 * lambda0);
        cfg.lambda_grid.points = get_or<std::size_t>(jl, "points", 681);
    } else {
        cfg.lambda_grid = {0.0, 0.85 * lambda0, 681};
    }
    if (!(cfg.lambda_grid.max > cfg.lambda_grid.min) || cfg.lambda_grid.points < 8)
        throw config_error("lambda_grid needs max > min and >= 8 points");

    cfg.mollifier_eps = get_or<double>(j, "mollifier_eps", 0.0);
    if (cfg.mollifier_eps < 0.0)
        throw config_error("mollifier_eps must be nonnegative");

    if (j.contains("extraction")) {
        const json& je = j.at("extraction");
        cfg.extraction.kappa = get_or<double>(je, "kappa", cfg.extraction.kappa);
        cfg.extraction.phase_filter =
            get_or<bool>(je, "phase_filter", cfg.extraction.phase_filter);
    }
    if (j.contains("inversion")) {
        const json& ji = j.at("inversion");
        cfg.inversion.tikhonov_weight =
            get_or<double>(ji, "tikhonov_weight", cfg.inversion.tikhonov_weight);
        cfg.inversion.monotone_projection =
            get_or<bool>(ji, "monotone", cfg.inversion.monotone_projection);
        cfg.inversion.derivative_scheme =
            get_or<std::string>(ji, "derivative", cfg.inversion.derivative_scheme);
        if (cfg.inversion.tikhonov_weight < 0.0 ||
            !std::isfinite(cfg.inversion.tikhonov_weight))
            throw config_error("tikhonov_weight must be finite and nonnegative");
    }
    cfg.pipeline_source = get_or<std::string>(j, "pipeline_source", "spectral");
    if (cfg.pipeline_source != "spectral" && cfg.pipeline_source != "oracle")
        throw config_error("pipeline_source must be 'spectral' or 'oracle'");

    if (j.contains("oracle")) {
        const json& jo = j.at("oracle");
        cfg.oracle.cells = get_or<int>(jo, "cells", cfg.oracle.cells);
        cfg.oracle.s_points = get_or<int>(jo, "s_points", cfg.oracle.s_points);
        cfg.oracle.s_min_frac = get_or<double>(jo, "s_min_frac", cfg.oracle.s_min_frac);
        cfg.oracle.s_max_frac = get_or<double>(jo, "s_max_frac", cfg.oracle.s_max_frac);
        cfg.oracle.bins = get_or<int>(jo, "bins", cfg.oracle.bins);
        if (cfg.oracle.s_points < 2 || !(cfg.oracle.s_min_frac > 0.0) ||
            !(cfg.oracle.s_max_frac < 1.0) ||
            !(cfg.oracle.s_min_frac < cfg.oracle.s_max_frac))
            throw config_error("oracle s grid fractions must satisfy "
                               "0 < min < max < 1 with >= 2 points");
    }
    if (j.contains("flowlines")) {
        const json& jf = j.at("flowlines");
        cfg.flowlines.count = get_or<int>(jf, "count", cfg.flowlines.count);
        cfg.flowlines.s0_frac = get_or<double>(jf, "s0_frac", cfg.flowlines.s0_frac);
        cfg.flowlines.t_end = get_or<double>(jf, "t_end", cfg.flowlines.t_end);
        cfg.flowlines.dt = get_or<double>(jf, "dt", cfg.flowlines.dt);
        cfg.flowlines.line_tol = get_or<double>(jf, "line_tol", cfg.flowlines.line_tol);
        cfg.flowlines.spread_tol =
            get_or<double>(jf, "spread_tol", cfg.flowlines.spread_tol);
        if (cfg.flowlines.count < 0 || !(cfg.flowlines.dt > 0.0) ||
            !(cfg.flowlines.s0_frac > 0.0) || !(cfg.flowlines.s0_frac < 1.0))
            throw config_error("flowlines need count >= 0, dt > 0, s0_frac in (0,1)");
    }

    cfg.threads = get_or<unsigned>(j, "threads", 0);
    cfg.seed = get_or<std::uint64_t>(j, "seed", 0);

    double cutoff = cfg.spectra_cutoff();
    for (double h : cfg.h_grid)
        if (h > cutoff)
            throw config_error("h values must not exceed the spectra cutoff");
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open config: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return parse_config(text);
}

} // namespace specinv
