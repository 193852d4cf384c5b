#ifndef SPECINV_IO_HPP
#define SPECINV_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "specinv/curve.hpp"
#include "specinv/flowlines.hpp"
#include "specinv/reconstruct.hpp"
#include "specinv/spectra.hpp"
#include "specinv/traces.hpp"

namespace specinv {

/// Shortest decimal that round-trips a double exactly (17 significant digits).
std::string format_double(double v);

/// Oracle/pipeline curve CSV: header `s,value,err_est`.
void write_curve_csv(const std::filesystem::path& path, const Curve& curve,
                     const std::vector<double>* err = nullptr);
Curve read_curve_csv(const std::filesystem::path& path);

/// Spectrum CSV: header `h,n,energy,multiplicity`, one file per h.
void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& spec);
Spectrum read_spectrum_csv(const std::filesystem::path& path);

struct SpectraManifest {
    int n = 2;
    double lambda_max = 0.0;
    std::string provenance;
    SolverMeta solver;
    std::vector<std::pair<double, std::string>> files; // (h, relative path)
};

void write_manifest(const std::filesystem::path& path, const SpectraManifest& m);
SpectraManifest read_manifest(const std::filesystem::path& path);

/// Loads every spectrum listed in a manifest (paths relative to it).
std::vector<Spectrum> load_spectra(const std::filesystem::path& manifest_path);

/// Invariant curves CSV: `lambda,A_est,a2,B_est,residual,flags`.
void write_invariants_csv(const std::filesystem::path& path,
                          const InvariantCurves& curves);
InvariantCurves read_invariants_csv(const std::filesystem::path& path);

/// Report JSON: profile/defect/F arrays plus metrics and provenance.
void write_report_json(const std::filesystem::path& path,
                       const ReconstructionReport& report);

/// Trajectory CSV: `t,x_1..x_n,V`.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

/// Flowline certificate JSON: center, spread, deviation maxima.
void write_certificate_json(const std::filesystem::path& path,
                            const FlowCertificate& cert);

struct SvgSeries {
    std::vector<double> x, y;
    std::string label;
    std::string color = "#1f6fb2";
};

/// Minimal deterministic polyline chart with axes and tick labels.
void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<SvgSeries>& series);

} // namespace specinv

#endif
