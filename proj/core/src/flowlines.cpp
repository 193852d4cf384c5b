#include "specinv/flowlines.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "specinv/errors.hpp"
#include "specinv/interp.hpp"

namespace specinv {

namespace {

constexpr double kGradFloor = 1e-10;

void grad_at(const ScalarField& field, const std::vector<double>& x,
             std::vector<double>& g) {
    field.gradient(std::span<const double>(x.data(), x.size()),
                   std::span<double>(g.data(), g.size()));
}

double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return std::sqrt(s);
}

} // namespace

Trajectory integrate_flowline(const ScalarField& field,
                              std::vector<double> x0, double t_end, double dt) {
    const int n = field.dimension();
    if (int(x0.size()) != n)
        throw config_error("integrate_flowline: start point has wrong dimension");
    if (!(dt > 0.0) || !(t_end > dt))
        throw config_error("integrate_flowline: need 0 < dt < t_end");

    std::vector<double> g(n);
    grad_at(field, x0, g);
    if (norm(g) <= 1e-8)
        throw near_critical_error("flowline start too close to a critical point");

    Trajectory traj;
    traj.s0 = field.eval(std::span<const double>(x0.data(), n));

    std::vector<double> x = std::move(x0);
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    double v_prev = traj.s0;
    std::size_t steps = std::size_t(std::ceil(t_end / dt));
    for (std::size_t step = 0;; ++step) {
        grad_at(field, x, k1);
        double speed = norm(k1);
        if (speed < kGradFloor)
            throw near_critical_error("flowline stagnated: |grad V| below 1e-10");
        double v_here = field.eval(std::span<const double>(x.data(), n));
        if (step > 0 && !(v_here > v_prev))
            throw numerical_error("flowline: V failed to increase along the flow");
        v_prev = v_here;
        traj.times.push_back(double(step) * dt);
        traj.points.push_back(x);
        traj.speeds.push_back(speed);
        traj.levels.push_back(v_here);
        if (step >= steps || v_here >= field.lambda0())
            break;

        for (int i = 0; i < n; ++i)
            tmp[i] = x[i] + 0.5 * dt * k1[i];
        grad_at(field, tmp, k2);
        for (int i = 0; i < n; ++i)
            tmp[i] = x[i] + 0.5 * dt * k2[i];
        grad_at(field, tmp, k3);
        for (int i = 0; i < n; ++i)
            tmp[i] = x[i] + dt * k3[i];
        grad_at(field, tmp, k4);
        for (int i = 0; i < n; ++i)
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return traj;
}

namespace {

struct FittedLine {
    Eigen::VectorXd point;
    Eigen::VectorXd direction; // unit
};

FittedLine fit_line(const Trajectory& traj) {
    const std::size_t m = traj.points.size();
    const int n = int(traj.points.front().size());
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
    for (const auto& p : traj.points)
        for (int d = 0; d < n; ++d)
            mean[d] += p[d];
    mean /= double(m);
    // Principal direction of the centered cloud; symmetric in time.
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
    for (const auto& p : traj.points) {
        Eigen::VectorXd c(n);
        for (int d = 0; d < n; ++d)
            c[d] = p[d] - mean[d];
        cov += c * c.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    FittedLine line;
    line.point = mean;
    line.direction = eig.eigenvectors().col(n - 1);
    return line;
}

double point_line_distance(const Eigen::VectorXd& p, const FittedLine& line) {
    Eigen::VectorXd d = p - line.point;
    Eigen::VectorXd proj = d - line.direction * (line.direction.dot(d));
    return proj.norm();
}

} // namespace

double line_deviation(const Trajectory& traj) {
    const std::size_t m = traj.points.size();
    if (m < 3)
        return 0.0; // a line fits two points exactly
    const int n = int(traj.points.front().size());
    double arc = 0.0;
    for (std::size_t i = 1; i < m; ++i) {
        double seg = 0.0;
        for (int d = 0; d < n; ++d) {
            double dd = traj.points[i][d] - traj.points[i - 1][d];
            seg += dd * dd;
        }
        arc += std::sqrt(seg);
    }
    if (arc <= 0.0)
        throw numerical_error("line_deviation: degenerate trajectory "
                              "(all points coincide)");
    FittedLine line = fit_line(traj);
    double worst = 0.0;
    Eigen::VectorXd p(n);
    for (const auto& pt : traj.points) {
        for (int d = 0; d < n; ++d)
            p[d] = pt[d];
        worst = std::max(worst, point_line_distance(p, line));
    }
    return worst / arc;
}

double level_transport_check(const Trajectory& traj, const Curve& F, double s0) {
    // Cumulative integral of 1/F from s0 gives the arrival-time law
    // t = I(V); invert it on a table to predict V at the sample times.
    const std::size_t grid_n = F.size();
    std::vector<double> levels, times;
    levels.reserve(grid_n + 1);
    times.reserve(grid_n + 1);
    double t_acc = 0.0;
    double prev_level = s0;
    double f_prev = F.interp(s0);
    if (!(f_prev > 0.0))
        throw numerical_error("level_transport_check: F must be positive at s0");
    levels.push_back(s0);
    times.push_back(0.0);
    double ds = F.dx() * 0.25; // finer than the curve grid for the inversion
    double s_max = F.grid_max();
    for (double s = s0 + ds; s <= s_max + 1e-15; s += ds) {
        double f_here = F.interp(s);
        if (!(f_here > 0.0))
            throw numerical_error("level_transport_check: F <= 0 on the range");
        t_acc += 0.5 * (1.0 / f_prev + 1.0 / f_here) * (s - prev_level);
        levels.push_back(s);
        times.push_back(t_acc);
        prev_level = s;
        f_prev = f_here;
    }
    PchipInterpolant inverse(times, levels);

    double worst = 0.0;
    for (std::size_t i = 0; i < traj.points.size(); ++i) {
        double t = traj.times[i];
        if (t > times.back())
            break; // flow left the tabulated range
        double predicted = inverse.value(t);
        worst = std::max(worst, std::abs(predicted - traj.levels[i]));
    }
    return worst;
}

std::pair<std::vector<double>, double>
common_center_estimate(const std::vector<Trajectory>& trajectories,
                       double deviation_threshold) {
    if (trajectories.empty())
        throw insufficient_data_error("common_center_estimate: no trajectories");
    const int n = int(trajectories.front().points.front().size());
    std::vector<FittedLine> lines;
    for (const auto& traj : trajectories) {
        if (line_deviation(traj) <= deviation_threshold)
            lines.push_back(fit_line(traj));
    }
    if (int(lines.size()) < n)
        throw insufficient_data_error(
            "common_center_estimate: need at least n straight trajectories");

    // Minimize sum of squared point-to-line distances: closed-form normal
    // equations with projectors I - d d^T.
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (const auto& line : lines) {
        Eigen::MatrixXd P =
            Eigen::MatrixXd::Identity(n, n) - line.direction * line.direction.transpose();
        M += P;
        rhs += P * line.point;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M);
    if (eig.eigenvalues()[0] < 1e-8 * eig.eigenvalues()[n - 1])
        throw numerical_error("common_center_estimate: near-parallel line bundle");
    Eigen::VectorXd center = M.ldlt().solve(rhs);

    double ss = 0.0;
    for (const auto& line : lines)
        ss += std::pow(point_line_distance(center, line), 2);
    double spread = std::sqrt(ss / double(lines.size()));
    std::vector<double> c(n);
    for (int d = 0; d < n; ++d)
        c[d] = center[d];
    return {c, spread};
}

std::vector<std::vector<double>> level_set_starts(const ScalarField& field,
                                                  double s0, int count) {
    if (field.dimension() != 2)
        throw geometry_error("level_set_starts: 2-D potentials only");
    if (!(s0 > 0.0) || s0 >= field.lambda0())
        throw config_error("level_set_starts: need 0 < s0 < lambda0");
    Box box = field.box();
    // Coarse centroid of the sublevel set.
    const int cells = 96;
    double cx = 0.0, cy = 0.0;
    int inside = 0;
    double hx = (box.hi[0] - box.lo[0]) / cells;
    double hy = (box.hi[1] - box.lo[1]) / cells;
    for (int j = 0; j < cells; ++j) {
        for (int i = 0; i < cells; ++i) {
            double x[2] = {box.lo[0] + hx * (i + 0.5), box.lo[1] + hy * (j + 0.5)};
            if (field.eval(std::span<const double>(x, 2)) < s0) {
                cx += x[0];
                cy += x[1];
                ++inside;
            }
        }
    }
    if (inside == 0)
        throw config_error("level_set_starts: sublevel set empty at s0");
    cx /= inside;
    cy /= inside;

    std::vector<std::vector<double>> starts;
    for (int k = 0; k < count; ++k) {
        double phi = 2.0 * M_PI * k / count;
        double u[2] = {std::cos(phi), std::sin(phi)};
        double t_max = 1e300;
        if (u[0] > 1e-14)
            t_max = std::min(t_max, (box.hi[0] - cx) / u[0]);
        else if (u[0] < -1e-14)
            t_max = std::min(t_max, (box.lo[0] - cx) / u[0]);
        if (u[1] > 1e-14)
            t_max = std::min(t_max, (box.hi[1] - cy) / u[1]);
        else if (u[1] < -1e-14)
            t_max = std::min(t_max, (box.lo[1] - cy) / u[1]);
        auto value_at = [&](double t) {
            double x[2] = {cx + t * u[0], cy + t * u[1]};
            return field.eval(std::span<const double>(x, 2)) - s0;
        };
        double lo = 0.0, hi = t_max;
        double f_lo = value_at(lo);
        if (f_lo >= 0)
            throw geometry_error("level_set_starts: centroid outside the level set");
        const int march = 128;
        double t_prev = 0.0;
        double t_hit = -1.0;
        for (int i = 1; i <= march; ++i) {
            double t = t_max * i / march;
            if (value_at(t) >= 0) {
                lo = t_prev;
                hi = t;
                t_hit = t;
                break;
            }
            t_prev = t;
        }
        if (t_hit < 0)
            throw coverage_error("level_set_starts: level set exceeds the box");
        for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (lo + hi);
            if (value_at(mid) < 0)
                lo = mid;
            else
                hi = mid;
        }
        double t_root = 0.5 * (lo + hi);
        starts.push_back({cx + t_root * u[0], cy + t_root * u[1]});
    }
    return starts;
}

FlowCertificate flowline_certificate(const ScalarField& field, double s0,
                                     int count, double t_end, double dt,
                                     const Curve* F, double line_tol,
                                     double spread_tol) {
    auto starts = level_set_starts(field, s0, count);
    std::vector<Trajectory> trajectories;
    trajectories.reserve(starts.size());
    for (auto& x0 : starts)
        trajectories.push_back(integrate_flowline(field, std::move(x0), t_end, dt));

    FlowCertificate cert;
    for (const auto& traj : trajectories)
        cert.max_line_deviation = std::max(cert.max_line_deviation,
                                           line_deviation(traj));
    if (F) {
        for (const auto& traj : trajectories)
            cert.max_transport_deviation =
                std::max(cert.max_transport_deviation,
                         level_transport_check(traj, *F, s0));
    }
    bool straight = cert.max_line_deviation < line_tol;
    if (straight) {
        auto [center, spread] = common_center_estimate(trajectories, line_tol);
        cert.center = center;
        cert.spread = spread;
        cert.accepts = spread < spread_tol;
    } else {
        cert.center.assign(std::size_t(field.dimension()), 0.0);
        cert.spread = 1e300;
        cert.accepts = false;
    }
    return cert;
}

} // namespace specinv
