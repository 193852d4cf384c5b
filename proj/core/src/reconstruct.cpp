#include "specinv/reconstruct.hpp"

#include <algorithm>
#include <cmath>

#include "specinv/errors.hpp"
#include "specinv/interp.hpp"
#include "specinv/numeric.hpp"

namespace specinv {

RadialProfile radial_profile_from_volume(const Curve& v, int n) {
    if (n < 2)
        throw config_error("radial_profile_from_volume: n must be >= 2");
    const double omega = unit_ball_volume(n);
    const std::size_t m = v.size();

    // Screen the monotonicity violation before projecting it away.
    double worst_drop = 0.0, scale = v.max_abs();
    for (std::size_t i = 1; i < m; ++i)
        worst_drop = std::max(worst_drop, v[i - 1] - v[i]);
    if (scale > 0.0 && worst_drop > 0.05 * scale)
        throw inversion_error("volume curve decreases by more than 5% of its "
                              "range; not invertible");
    std::vector<double> vv = isotonic_nondecreasing(v.values());

    // rho(s) knots; skip the uninformative zero-volume head and deduplicate
    // ties left by the projection.
    std::vector<double> rho_knots, s_knots;
    rho_knots.push_back(0.0);
    s_knots.push_back(0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (vv[i] <= 0.0)
            continue;
        double rho = std::pow(vv[i] / omega, 1.0 / double(n));
        double s = v.x(i);
        if (rho <= rho_knots.back() + 1e-14 || s <= s_knots.back() + 1e-14)
            continue;
        rho_knots.push_back(rho);
        s_knots.push_back(s);
    }
    if (rho_knots.size() < 3)
        throw inversion_error("volume curve carries no invertible information");

    PchipInterpolant inverse(rho_knots, s_knots);

    // Uniform r grid over the recovered radius range.
    const std::size_t out_points = std::max<std::size_t>(m, 64);
    double r_max = rho_knots.back();
    std::vector<double> r(out_points), values(out_points);
    for (std::size_t i = 0; i < out_points; ++i) {
        r[i] = r_max * double(i) / double(out_points - 1);
        values[i] = std::max(0.0, inverse.value(r[i]));
    }
    values[0] = 0.0;
    // Enforce strict increase so the table satisfies the profile contract.
    for (std::size_t i = 1; i < out_points; ++i)
        if (values[i] <= values[i - 1])
            values[i] = values[i - 1] + 1e-14 * std::max(1.0, s_knots.back());
    return RadialProfile::table(n, std::move(r), std::move(values));
}

Curve isoperimetric_defect(const Curve& i1, const Curve& i2, const Curve& v, int n) {
    if (!i1.same_grid(i2) || !i1.same_grid(v))
        throw config_error("isoperimetric_defect: curves must share a grid");
    const double omega = unit_ball_volume(n);
    Curve d = i1;
    d.set_label("defect");
    for (std::size_t i = 0; i < i1.size(); ++i) {
        double s_iso = double(n) * std::pow(omega, 1.0 / double(n)) *
                       std::pow(std::max(v[i], 0.0), double(n - 1) / double(n));
        d[i] = i1[i] * i2[i] - s_iso * s_iso;
    }
    return d;
}

Curve gradient_modulus_profile(const Curve& i1, const Curve& i2) {
    if (!i1.same_grid(i2))
        throw config_error("gradient_modulus_profile: curves must share a grid");
    Curve f = i1;
    f.set_label("F");
    for (std::size_t i = 0; i < i1.size(); ++i) {
        if (!(i1[i] > 0.0))
            throw numerical_error("gradient_modulus_profile: I1 <= 0 at s = " +
                                  std::to_string(i1.x(i)));
        f[i] = i2[i] / i1[i];
    }
    return f;
}

ErrorMetrics profile_error_metrics(const RadialProfile& recovered,
                                   const RadialProfile& reference,
                                   double r_lo_frac, double r_hi_frac) {
    double r_max = recovered.r0();
    ErrorMetrics metrics;
    metrics.r_lo = r_lo_frac * r_max;
    metrics.r_hi = r_hi_frac * r_max;
    const int samples = 256;
    double ss = 0.0;
    int count = 0;
    for (int i = 0; i < samples; ++i) {
        double r = metrics.r_lo +
                   (metrics.r_hi - metrics.r_lo) * double(i) / double(samples - 1);
        if (r > reference.r0())
            break;
        double ref = reference.value(r);
        if (std::abs(ref) < 1e-300)
            continue;
        double rel = std::abs(recovered.value(r) - ref) / std::abs(ref);
        metrics.max_rel = std::max(metrics.max_rel, rel);
        ss += rel * rel;
        ++count;
    }
    metrics.rms_rel = count > 0 ? std::sqrt(ss / count) : 0.0;
    return metrics;
}

ReconstructionReport build_report(const ReportInputs& inputs,
                                  const RadialProfile* reference) {
    if (inputs.volume.size() < 8 || inputs.i1.size() < 8 || inputs.i2.size() < 8)
        throw numerical_error("build_report: missing or degenerate stage outputs");
    if (!inputs.i1.same_grid(inputs.i2) || !inputs.i1.same_grid(inputs.volume))
        throw numerical_error("build_report: stage outputs on mismatched grids");

    ReconstructionReport report{
        radial_profile_from_volume(inputs.volume, inputs.n),
        isoperimetric_defect(inputs.i1, inputs.i2, inputs.volume, inputs.n),
        gradient_modulus_profile(inputs.i1, inputs.i2),
        std::nullopt,
        0.0,
        false,
        inputs.provenance,
        inputs.inversion};

    // Propagated noise scale for the defect: roughness of D against a
    // 5-point smooth of itself, floored by the products' rounding scale.
    const Curve& d = report.defect;
    std::vector<double> smooth = moving_average(d.values(), d.dx(), 2.5 * d.dx());
    double noise = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        noise = std::max(noise, std::abs(d[i] - smooth[i]));
    double prod_scale = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        prod_scale = std::max(prod_scale, std::abs(inputs.i1[i] * inputs.i2[i]));
    noise = std::max(noise, 1e-9 * prod_scale);
    report.defect_noise_estimate = noise;

    // Noise-aware radiality decision: the exact dichotomy (zero defect iff
    // spheres) is unusable on sampled data.
    double max_defect = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        max_defect = std::max(max_defect, std::abs(d[i]));
    report.radial_certificate = max_defect < 3.0 * noise;

    if (reference)
        report.metrics = profile_error_metrics(report.profile, *reference, 0.1, 0.9);
    return report;
}

} // namespace specinv
