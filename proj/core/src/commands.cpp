#include "specinv/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "specinv/errors.hpp"
#include "specinv/io.hpp"
#include "specinv/numeric.hpp"
#include "specinv/oracles.hpp"
#include "specinv/parallel.hpp"
#include "specinv/reconstruct.hpp"

namespace specinv {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Spectrum forward_spectrum(const RunConfig& cfg, double h) {
    const AnalyticPotential& pot = *cfg.potential;
    bool exact = cfg.forward_method == "exact-harmonic" ||
                 (cfg.forward_method == "auto" &&
                  pot.family() == PotentialFamily::Harmonic);
    if (exact) {
        if (pot.family() != PotentialFamily::Harmonic)
            throw config_error("exact-harmonic spectra need the harmonic family");
        return exact_harmonic_spectrum(pot.dimension(), h, cfg.spectra_cutoff());
    }
    return radial_fd_spectrum(pot, h, cfg.spectra_cutoff(), cfg.solver);
}

std::vector<double> oracle_s_grid(const RunConfig& cfg) {
    double lambda0 = cfg.potential->lambda0();
    std::vector<double> s(std::size_t(cfg.oracle.s_points));
    double lo = cfg.oracle.s_min_frac * lambda0;
    double hi = cfg.oracle.s_max_frac * lambda0;
    for (int i = 0; i < cfg.oracle.s_points; ++i)
        s[std::size_t(i)] = lo + (hi - lo) * double(i) / double(cfg.oracle.s_points - 1);
    return s;
}

struct OracleScan {
    std::vector<SurfaceInvariants> inv;
    std::vector<double> s;
};

OracleScan scan_surface_invariants(const RunConfig& cfg) {
    OracleScan out;
    out.s = oracle_s_grid(cfg);
    out.inv.resize(out.s.size());
    QuadParams qp;
    qp.cells = cfg.oracle.cells;
    const ScalarField& field = *cfg.potential;
    if (field.dimension() == 2) {
        LevelSetScan2D scan(field, qp);
        parallel_for(out.s.size(), [&](std::size_t i) {
            out.inv[i] = scan.invariants(out.s[i]);
        }, cfg.threads);
    } else {
        StarShapedScan scan(field, qp);
        for (std::size_t i = 0; i < out.s.size(); ++i)
            out.inv[i] = scan.invariants(out.s[i]);
    }
    return out;
}

Curve curve_from_samples(const std::vector<double>& s,
                         const std::vector<double>& v, const std::string& label) {
    return Curve(s.front(), s.back(), v, label);
}

} // namespace

int cmd_forward(const RunConfig& cfg, const fs::path& out) {
    fs::path dir = out / "spectra";
    SpectraManifest manifest;
    manifest.n = cfg.potential->dimension();
    manifest.lambda_max = cfg.spectra_cutoff();

    std::vector<Spectrum> spectra(cfg.h_grid.size());
    parallel_for(cfg.h_grid.size(), [&](std::size_t i) {
        spectra[i] = forward_spectrum(cfg, cfg.h_grid[i]);
    }, cfg.threads);

    for (std::size_t i = 0; i < spectra.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "spectrum_%03zu.csv", i);
        write_spectrum_csv(dir / name, spectra[i]);
        manifest.files.emplace_back(cfg.h_grid[i], name);
    }
    manifest.provenance = spectra.empty() || spectra.front().provenance ==
                                                  SpectrumProvenance::ExactHarmonic
                              ? "exact-harmonic"
                              : "finite-difference";
    if (!spectra.empty())
        manifest.solver = spectra.front().meta;
    write_manifest(dir / "manifest.json", manifest);
    std::cout << "forward: wrote " << spectra.size() << " spectra to "
              << dir.string() << "\n";
    return 0;
}

int cmd_oracle(const RunConfig& cfg, const fs::path& out) {
    fs::path dir = out / "oracle";
    const ScalarField& field = *cfg.potential;
    const LambdaGrid& grid = cfg.lambda_grid;

    QuadParams qp;
    qp.cells = cfg.oracle.cells;
    PhaseSpaceQuadrature quad(field, qp);
    std::vector<double> a_vals(grid.points, 0.0), a_err(grid.points, 0.0);
    std::vector<double> b_vals(grid.points, 0.0), b_err(grid.points, 0.0);
    parallel_for(grid.points, [&](std::size_t i) {
        double lam = grid.min + double(i) * grid.dx();
        if (lam <= 0.0)
            return;
        QuadResult a = quad.integrate(lam, PhaseWeight::One);
        QuadResult b = quad.integrate(lam, PhaseWeight::GradSquared);
        a_vals[i] = a.value;
        a_err[i] = a.err_est;
        b_vals[i] = b.value;
        b_err[i] = b.err_est;
    }, cfg.threads);
    Curve a_curve(grid.min, grid.max, std::move(a_vals), "A_oracle");
    Curve b_curve(grid.min, grid.max, std::move(b_vals), "B_oracle");
    write_curve_csv(dir / "A.csv", a_curve, &a_err);
    write_curve_csv(dir / "B.csv", b_curve, &b_err);

    OracleScan scan = scan_surface_invariants(cfg);
    std::vector<double> i1(scan.s.size()), i2(scan.s.size()), vol(scan.s.size()),
        area(scan.s.size()), errs(scan.s.size());
    for (std::size_t i = 0; i < scan.s.size(); ++i) {
        i1[i] = scan.inv[i].i1;
        i2[i] = scan.inv[i].i2;
        vol[i] = scan.inv[i].volume;
        area[i] = scan.inv[i].area;
        errs[i] = scan.inv[i].err_est;
    }
    write_curve_csv(dir / "I1.csv", curve_from_samples(scan.s, i1, "I1_oracle"), &errs);
    write_curve_csv(dir / "I2.csv", curve_from_samples(scan.s, i2, "I2_oracle"), &errs);
    write_curve_csv(dir / "volume.csv", curve_from_samples(scan.s, vol, "volume_oracle"));
    write_curve_csv(dir / "area.csv", curve_from_samples(scan.s, area, "area_oracle"));
    std::cout << "oracle: wrote phase-space and level-set curves to "
              << dir.string() << "\n";
    return 0;
}

int cmd_extract(const RunConfig& cfg, const fs::path& spectra_dir,
                const fs::path& out) {
    fs::path manifest = spectra_dir / "manifest.json";
    if (!fs::exists(manifest))
        throw io_error("no manifest.json under " + spectra_dir.string());
    std::vector<Spectrum> spectra = load_spectra(manifest);
    InvariantCurves curves =
        extract_invariants(spectra, cfg.lambda_grid, cfg.eps(), cfg.extraction);
    write_invariants_csv(out / "curves" / "invariants.csv", curves);
    std::cout << "extract: wrote invariant curves for " << spectra.size()
              << " spectra\n";
    return 0;
}

int cmd_invert(const RunConfig& cfg, const fs::path& out) {
    Curve a_curve, b_curve;
    if (cfg.pipeline_source == "oracle") {
        a_curve = read_curve_csv(out / "oracle" / "A.csv");
        b_curve = read_curve_csv(out / "oracle" / "B.csv");
    } else {
        fs::path curves_file = out / "curves" / "invariants.csv";
        if (!fs::exists(curves_file))
            throw io_error("no extracted curves at " + curves_file.string() +
                           "; run extract first");
        InvariantCurves curves = read_invariants_csv(curves_file);
        a_curve = curves.a_est;
        b_curve = curves.b_est;
    }
    int n = cfg.potential->dimension();
    Curve volume = recover_volume(a_curve, n, cfg.inversion);
    auto [i1, i2] = recover_surface_invariants(a_curve, b_curve, n, cfg.inversion);
    fs::path dir = out / "inversion";
    write_curve_csv(dir / "volume.csv", volume);
    write_curve_csv(dir / "I1.csv", i1);
    write_curve_csv(dir / "I2.csv", i2);
    std::cout << "invert: recovered volume and surface invariants ("
              << cfg.pipeline_source << " source)\n";
    return 0;
}

int cmd_reconstruct(const RunConfig& cfg, const fs::path& out) {
    fs::path dir = out / "inversion";
    if (!fs::exists(dir / "volume.csv"))
        throw io_error("no inversion outputs under " + dir.string() +
                       "; run invert first");
    ReportInputs inputs;
    inputs.volume = read_curve_csv(dir / "volume.csv");
    inputs.i1 = read_curve_csv(dir / "I1.csv");
    inputs.i2 = read_curve_csv(dir / "I2.csv");
    inputs.n = cfg.potential->dimension();
    inputs.inversion = cfg.inversion;
    inputs.provenance = {"curves: " + cfg.pipeline_source,
                         "inversion: tikhonov+" + cfg.inversion.derivative_scheme};

    const RadialProfile* reference =
        cfg.reference_profile ? &*cfg.reference_profile : nullptr;
    ReconstructionReport report = build_report(inputs, reference);

    fs::path rdir = out / "reconstruction";
    write_report_json(rdir / "report.json", report);

    // Profile CSV on its own r grid.
    {
        auto out_csv = rdir / "profile.csv";
        const auto& r = report.profile.table_r();
        const auto& v = report.profile.table_values();
        Curve profile_curve(r.front(), r.back(),
                            std::vector<double>(v.begin(), v.end()), "profile");
        write_curve_csv(out_csv, profile_curve);
    }

    // Plots: recovered profile (vs reference), defect, gradient profile.
    {
        SvgSeries recovered;
        recovered.x = report.profile.table_r();
        recovered.y = report.profile.table_values();
        recovered.label = "recovered";
        std::vector<SvgSeries> series{recovered};
        if (reference) {
            SvgSeries ref;
            for (double r : report.profile.table_r()) {
                if (r > reference->r0())
                    break;
                ref.x.push_back(r);
                ref.y.push_back(reference->value(r));
            }
            ref.label = "reference";
            ref.color = "#c23b22";
            series.push_back(std::move(ref));
        }
        write_svg_plot(rdir / "profile.svg", "Recovered radial profile", "r",
                       "R(r)", series);
        SvgSeries defect;
        for (std::size_t i = 0; i < report.defect.size(); ++i) {
            defect.x.push_back(report.defect.x(i));
            defect.y.push_back(report.defect[i]);
        }
        defect.label = "D(s)";
        write_svg_plot(rdir / "defect.svg", "Isoperimetric defect", "s", "D(s)",
                       {defect});
        SvgSeries fprof;
        for (std::size_t i = 0; i < report.gradient_profile.size(); ++i) {
            fprof.x.push_back(report.gradient_profile.x(i));
            fprof.y.push_back(report.gradient_profile[i]);
        }
        fprof.label = "F(s)";
        write_svg_plot(rdir / "gradient_profile.svg", "Gradient modulus profile",
                       "s", "F(s)", {fprof});
    }
    std::cout << "reconstruct: report written";
    if (report.metrics)
        std::cout << " (max rel error " << format_double(report.metrics->max_rel)
                  << ")";
    std::cout << "\n";
    return 0;
}

int cmd_diagnose(const RunConfig& cfg, const fs::path& out) {
    fs::path dir = out / "diagnostics";
    OracleScan scan = scan_surface_invariants(cfg);
    int n = cfg.potential->dimension();
    double omega = unit_ball_volume(n);

    std::vector<double> defect(scan.s.size()), rel_defect(scan.s.size()),
        f_ratio(scan.s.size()), noise(scan.s.size());
    bool radial = true;
    double max_rel_defect = 0.0;
    for (std::size_t i = 0; i < scan.s.size(); ++i) {
        const SurfaceInvariants& inv = scan.inv[i];
        double s_iso = double(n) * std::pow(omega, 1.0 / double(n)) *
                       std::pow(inv.volume, double(n - 1) / double(n));
        defect[i] = inv.i1 * inv.i2 - s_iso * s_iso;
        rel_defect[i] = defect[i] / (inv.i1 * inv.i2);
        f_ratio[i] = inv.i2 / inv.i1;
        // Noise-aware threshold: three times the propagated quadrature
        // estimate, floored at 0.1%.
        noise[i] = std::max(3.0 * 2.0 * inv.err_est, 1e-3);
        max_rel_defect = std::max(max_rel_defect, std::abs(rel_defect[i]));
        if (std::abs(rel_defect[i]) >= noise[i])
            radial = false;
    }
    write_curve_csv(dir / "defect.csv",
                    curve_from_samples(scan.s, defect, "defect"), &noise);
    write_curve_csv(dir / "relative_defect.csv",
                    curve_from_samples(scan.s, rel_defect, "relative_defect"));
    write_curve_csv(dir / "F.csv", curve_from_samples(scan.s, f_ratio, "F"));

    QuadParams qp;
    qp.cells = cfg.oracle.cells;
    PushforwardDensity push =
        pushforward_density(*cfg.potential, cfg.potential->box(), cfg.oracle.bins, qp);
    write_curve_csv(dir / "pushforward.csv", push.density);

    json verdict;
    verdict["radial"] = radial;
    verdict["max_relative_defect"] = max_rel_defect;
    verdict["atom_bins"] = push.atom_bins;
    verdict["pushforward_total_mass"] = push.total_mass;
    std::ofstream vout(dir / "diagnosis.json");
    if (!vout)
        throw io_error("cannot write diagnosis.json");
    vout << verdict.dump(2) << '\n';
    std::cout << "diagnose: " << (radial ? "radial within tolerance" : "not radial")
              << " (max relative defect " << format_double(max_rel_defect) << ")\n";
    return 0;
}

int cmd_flowlines(const RunConfig& cfg, const fs::path& out) {
    fs::path dir = out / "flowlines";
    if (cfg.flowlines.count == 0) {
        std::cout << "flowlines: nothing to do (count = 0)\n";
        return 0;
    }
    const ScalarField& field = *cfg.potential;
    double lambda0 = field.lambda0();
    double s0 = cfg.flowlines.s0_frac * lambda0;

    // Transport law F(s): closed form from the profile when the potential is
    // radial, otherwise the (generally invalid) oracle ratio I2/I1.
    Curve f_curve;
    if (cfg.reference_profile) {
        const RadialProfile& prof = *cfg.reference_profile;
        std::size_t m = 512;
        std::vector<double> vals(m);
        double lo = 0.5 * s0, hi = 0.98 * lambda0;
        for (std::size_t i = 0; i < m; ++i) {
            double s = lo + (hi - lo) * double(i) / double(m - 1);
            double rp = prof.derivative(prof.inverse(s));
            vals[i] = rp * rp;
        }
        f_curve = Curve(lo, hi, std::move(vals), "F_profile");
    } else {
        OracleScan scan = scan_surface_invariants(cfg);
        std::vector<double> ratio(scan.s.size());
        for (std::size_t i = 0; i < scan.s.size(); ++i)
            ratio[i] = scan.inv[i].i2 / scan.inv[i].i1;
        f_curve = curve_from_samples(scan.s, ratio, "F_oracle");
    }

    FlowCertificate cert = flowline_certificate(
        field, s0, cfg.flowlines.count, cfg.flowlines.t_end, cfg.flowlines.dt,
        &f_curve, cfg.flowlines.line_tol, cfg.flowlines.spread_tol);

    auto starts = level_set_starts(field, s0, cfg.flowlines.count);
    for (std::size_t i = 0; i < starts.size(); ++i) {
        Trajectory traj = integrate_flowline(field, starts[i], cfg.flowlines.t_end,
                                             cfg.flowlines.dt);
        char name[32];
        std::snprintf(name, sizeof(name), "trajectory_%03zu.csv", i);
        write_trajectory_csv(dir / name, traj);
    }
    write_certificate_json(dir / "certificate.json", cert);
    std::cout << "flowlines: certificate "
              << (cert.accepts ? "accepts" : "rejects") << " (line deviation "
              << format_double(cert.max_line_deviation) << ", spread "
              << format_double(cert.spread) << ")\n";
    return 0;
}

} // namespace specinv
