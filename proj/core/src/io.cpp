#include "specinv/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "specinv/errors.hpp"

namespace specinv {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw io_error("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open for reading: " + path.string());
    return in;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ','))
        fields.push_back(field);
    return fields;
}

double parse_double(const std::string& s, const std::filesystem::path& path) {
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw io_error("malformed number '" + s + "' in " + path.string());
    }
}

} // namespace

void write_curve_csv(const std::filesystem::path& path, const Curve& curve,
                     const std::vector<double>* err) {
    auto out = open_out(path);
    out << "s,value,err_est\n";
    for (std::size_t i = 0; i < curve.size(); ++i) {
        double e = err && i < err->size() ? (*err)[i] : 0.0;
        out << format_double(curve.x(i)) << ',' << format_double(curve[i]) << ','
            << format_double(e) << '\n';
    }
}

Curve read_curve_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    std::getline(in, line); // header
    std::vector<double> xs, vs;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        auto fields = split_csv_line(line);
        if (fields.size() < 2)
            throw io_error("malformed curve row in " + path.string());
        xs.push_back(parse_double(fields[0], path));
        vs.push_back(parse_double(fields[1], path));
    }
    if (xs.size() < 2)
        throw io_error("curve file too short: " + path.string());
    return Curve(xs.front(), xs.back(), std::move(vs), path.stem().string());
}

void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& spec) {
    auto out = open_out(path);
    out << "h,n,energy,multiplicity\n";
    for (const auto& e : spec.entries)
        out << format_double(spec.h) << ',' << spec.n << ','
            << format_double(e.energy) << ',' << e.multiplicity << '\n';
}

Spectrum read_spectrum_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    std::getline(in, line);
    Spectrum spec;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 4)
            throw io_error("malformed spectrum row in " + path.string());
        double h = parse_double(fields[0], path);
        int n = int(parse_double(fields[1], path));
        if (first) {
            spec.h = h;
            spec.n = n;
            first = false;
        } else if (h != spec.h || n != spec.n) {
            throw io_error("inconsistent h or n within " + path.string());
        }
        SpectrumEntry entry;
        entry.energy = parse_double(fields[2], path);
        entry.multiplicity = std::int64_t(parse_double(fields[3], path));
        spec.entries.push_back(entry);
    }
    if (first)
        throw io_error("empty spectrum file: " + path.string());
    return spec;
}

void write_manifest(const std::filesystem::path& path, const SpectraManifest& m) {
    json j;
    j["n"] = m.n;
    j["lambda_max"] = m.lambda_max;
    j["provenance"] = m.provenance;
    j["solver"] = {{"grid_points", m.solver.grid_points},
                   {"r_max", m.solver.r_max},
                   {"l_max_used", m.solver.l_max_used},
                   {"eig_tol", m.solver.eig_tol}};
    json files = json::array();
    for (const auto& [h, file] : m.files)
        files.push_back({{"h", h}, {"path", file}});
    j["files"] = files;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

SpectraManifest read_manifest(const std::filesystem::path& path) {
    auto in = open_in(path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw io_error("malformed manifest " + path.string() + ": " + e.what());
    }
    SpectraManifest m;
    try {
        m.n = j.at("n").get<int>();
        m.lambda_max = j.at("lambda_max").get<double>();
        m.provenance = j.at("provenance").get<std::string>();
        m.solver.grid_points = j.at("solver").at("grid_points").get<int>();
        m.solver.r_max = j.at("solver").at("r_max").get<double>();
        m.solver.l_max_used = j.at("solver").at("l_max_used").get<int>();
        m.solver.eig_tol = j.at("solver").at("eig_tol").get<double>();
        for (const auto& f : j.at("files"))
            m.files.emplace_back(f.at("h").get<double>(),
                                 f.at("path").get<std::string>());
    } catch (const json::exception& e) {
        throw io_error("manifest missing fields in " + path.string() + ": " +
                       e.what());
    }
    return m;
}

std::vector<Spectrum> load_spectra(const std::filesystem::path& manifest_path) {
    SpectraManifest m = read_manifest(manifest_path);
    auto dir = manifest_path.parent_path();
    std::vector<Spectrum> spectra;
    for (const auto& [h, file] : m.files) {
        auto path = dir / file;
        if (!std::filesystem::exists(path))
            throw io_error("manifest lists missing file: " + path.string());
        Spectrum spec = read_spectrum_csv(path);
        spec.lambda_max = m.lambda_max;
        spec.provenance = m.provenance == "exact-harmonic"
                              ? SpectrumProvenance::ExactHarmonic
                              : SpectrumProvenance::FiniteDifference;
        spec.meta = m.solver;
        spec.validate();
        spectra.push_back(std::move(spec));
    }
    return spectra;
}

void write_invariants_csv(const std::filesystem::path& path,
                          const InvariantCurves& curves) {
    auto out = open_out(path);
    out << "lambda,A_est,a2,B_est,residual,flags\n";
    for (std::size_t i = 0; i < curves.a_est.size(); ++i) {
        out << format_double(curves.a_est.x(i)) << ','
            << format_double(curves.a_est[i]) << ','
            << format_double(curves.a2[i]) << ','
            << format_double(curves.b_est[i]) << ','
            << format_double(curves.residual[i]) << ',' << curves.flags[i] << '\n';
    }
}

InvariantCurves read_invariants_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    std::getline(in, line);
    std::vector<double> lam, a, a2, b, res;
    std::vector<std::string> flags;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        auto fields = split_csv_line(line);
        if (fields.size() < 5)
            throw io_error("malformed invariants row in " + path.string());
        lam.push_back(parse_double(fields[0], path));
        a.push_back(parse_double(fields[1], path));
        a2.push_back(parse_double(fields[2], path));
        b.push_back(parse_double(fields[3], path));
        res.push_back(parse_double(fields[4], path));
        flags.push_back(fields.size() > 5 ? fields[5] : "");
    }
    if (lam.size() < 2)
        throw io_error("invariants file too short: " + path.string());
    InvariantCurves out;
    out.a_est = Curve(lam.front(), lam.back(), std::move(a), "A_est");
    out.a2 = Curve(lam.front(), lam.back(), std::move(a2), "a2");
    out.b_est = Curve(lam.front(), lam.back(), std::move(b), "B_est");
    out.residual = Curve(lam.front(), lam.back(), std::move(res), "residual");
    out.flags = std::move(flags);
    return out;
}

namespace {

json curve_pairs(const Curve& c) {
    json arr = json::array();
    for (std::size_t i = 0; i < c.size(); ++i)
        arr.push_back({c.x(i), c[i]});
    return arr;
}

} // namespace

void write_report_json(const std::filesystem::path& path,
                       const ReconstructionReport& report) {
    json j;
    json profile = json::array();
    const auto& r = report.profile.table_r();
    const auto& v = report.profile.table_values();
    for (std::size_t i = 0; i < r.size(); ++i)
        profile.push_back({r[i], v[i]});
    j["profile"] = profile;
    j["defect"] = curve_pairs(report.defect);
    j["F"] = curve_pairs(report.gradient_profile);
    json metrics;
    if (report.metrics) {
        metrics["max_rel_error"] = report.metrics->max_rel;
        metrics["rms_rel_error"] = report.metrics->rms_rel;
        metrics["r_range"] = {report.metrics->r_lo, report.metrics->r_hi};
    }
    j["metrics"] = metrics;
    j["provenance"] = report.provenance;
    j["radial_certificate"] = report.radial_certificate;
    j["defect_noise_estimate"] = report.defect_noise_estimate;
    j["tolerances"] = {{"tikhonov_weight", report.inversion.tikhonov_weight},
                       {"monotone_projection", report.inversion.monotone_projection},
                       {"derivative_scheme", report.inversion.derivative_scheme}};
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    auto out = open_out(path);
    std::size_t n = traj.points.empty() ? 0 : traj.points.front().size();
    out << 't';
    for (std::size_t d = 0; d < n; ++d)
        out << ",x_" << (d + 1);
    out << ",V\n";
    for (std::size_t i = 0; i < traj.points.size(); ++i) {
        out << format_double(traj.times[i]);
        for (std::size_t d = 0; d < n; ++d)
            out << ',' << format_double(traj.points[i][d]);
        out << ',' << format_double(traj.levels[i]) << '\n';
    }
}

void write_certificate_json(const std::filesystem::path& path,
                            const FlowCertificate& cert) {
    json j;
    j["center"] = cert.center;
    j["spread"] = cert.spread;
    j["max_line_deviation"] = cert.max_line_deviation;
    j["max_transport_deviation"] = cert.max_transport_deviation;
    j["accepts"] = cert.accepts;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

namespace {

std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

} // namespace

void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<SvgSeries>& series) {
    const double width = 820, height = 520;
    const double ml = 80, mr = 30, mt = 50, mb = 60;
    double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
    for (const auto& s : series) {
        for (double x : s.x) {
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
        }
        for (double y : s.y) {
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        }
    }
    if (!(x_max > x_min)) {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if (!(y_max > y_min)) {
        y_min -= 0.5;
        y_max += 0.5;
    }
    double y_pad = 0.05 * (y_max - y_min);
    y_min -= y_pad;
    y_max += y_pad;
    auto sx = [&](double x) {
        return ml + (x - x_min) / (x_max - x_min) * (width - ml - mr);
    };
    auto sy = [&](double y) {
        return height - mb - (y - y_min) / (y_max - y_min) * (height - mt - mb);
    };

    auto out = open_out(path);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
        << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
    // Axes.
    out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\""
        << width - mr << "\" y2=\"" << height - mb
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
        << "\" y2=\"" << height - mb << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    const int ticks = 5;
    for (int i = 0; i <= ticks; ++i) {
        double fx = x_min + (x_max - x_min) * i / ticks;
        double fy = y_min + (y_max - y_min) * i / ticks;
        double px = sx(fx), py = sy(fy);
        out << "<line x1=\"" << svg_num(px) << "\" y1=\"" << height - mb
            << "\" x2=\"" << svg_num(px) << "\" y2=\"" << height - mb + 5
            << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << svg_num(px) << "\" y=\"" << height - mb + 20
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"11\">" << tick_label(fx) << "</text>\n";
        out << "<line x1=\"" << ml - 5 << "\" y1=\"" << svg_num(py) << "\" x2=\""
            << ml << "\" y2=\"" << svg_num(py) << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << ml - 8 << "\" y=\"" << svg_num(py + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
               "font-size=\"11\">" << tick_label(fy) << "</text>\n";
    }
    out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 15
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << x_label << "</text>\n";
    out << "<text x=\"20\" y=\"" << (mt + height - mb) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 20 " << (mt + height - mb) / 2 << ")\">"
        << y_label << "</text>\n";
    // Series.
    double legend_y = mt + 8;
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (i)
                out << ' ';
            out << svg_num(sx(s.x[i])) << ',' << svg_num(sy(s.y[i]));
        }
        out << "\"/>\n";
        if (!s.label.empty()) {
            out << "<line x1=\"" << width - mr - 150 << "\" y1=\"" << legend_y
                << "\" x2=\"" << width - mr - 120 << "\" y2=\"" << legend_y
                << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n"
                << "<text x=\"" << width - mr - 112 << "\" y=\"" << legend_y + 4
                << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label
                << "</text>\n";
            legend_y += 18;
        }
    }
    out << "</svg>\n";
}

} // namespace specinv
