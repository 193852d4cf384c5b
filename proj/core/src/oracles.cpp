#include "specinv/oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include "specinv/errors.hpp"
#include "specinv/numeric.hpp"
#include "specinv/parallel.hpp"

namespace specinv {

namespace {

constexpr int kMaxDim = 8;
constexpr double kGradFloor = 1e-10;

int default_cells(int n, bool marching) {
    switch (n) {
    case 2:
        return marching ? 1024 : 512;
    case 3:
        return 96;
    default:
        return 24;
    }
}

std::int64_t ipow(std::int64_t b, int e) {
    std::int64_t r = 1;
    for (int i = 0; i < e; ++i)
        r *= b;
    return r;
}

} // namespace

// ---------------------------------------------------------------------------
// Phase-space integrals

struct PhaseSpaceQuadrature::Grid {
    int n = 2;
    int cells = 0;
    Box box;
    std::vector<double> step;        // per-dimension cell size
    std::vector<double> corner_v;    // (cells+1)^n corner values
    std::vector<double> center_v;    // cells^n midpoint values
    std::vector<double> center_w;    // |grad V|^2 at midpoints
    double cell_volume = 0.0;

    void build(const ScalarField& field, int cells_per_dim) {
        n = field.dimension();
        cells = cells_per_dim;
        box = field.box();
        step.resize(n);
        cell_volume = 1.0;
        for (int d = 0; d < n; ++d) {
            step[d] = (box.hi[d] - box.lo[d]) / cells;
            cell_volume *= step[d];
        }
        std::int64_t n_corners = ipow(cells + 1, n);
        std::int64_t n_centers = ipow(cells, n);
        if (n_corners > (std::int64_t(1) << 28))
            throw config_error("phase-space quadrature grid too large");
        corner_v.resize(std::size_t(n_corners));
        center_v.resize(std::size_t(n_centers));
        center_w.resize(std::size_t(n_centers));

        parallel_for(std::size_t(n_corners), [&](std::size_t idx) {
            std::array<double, kMaxDim> x{};
            std::int64_t rem = std::int64_t(idx);
            for (int d = 0; d < n; ++d) {
                std::int64_t q = rem % (cells + 1);
                rem /= (cells + 1);
                x[d] = box.lo[d] + step[d] * double(q);
            }
            corner_v[idx] = field.eval(std::span<const double>(x.data(), n));
        });
        parallel_for(std::size_t(n_centers), [&](std::size_t idx) {
            std::array<double, kMaxDim> x{};
            std::array<double, kMaxDim> g{};
            std::int64_t rem = std::int64_t(idx);
            for (int d = 0; d < n; ++d) {
                std::int64_t q = rem % cells;
                rem /= cells;
                x[d] = box.lo[d] + step[d] * (double(q) + 0.5);
            }
            auto xs = std::span<const double>(x.data(), n);
            center_v[idx] = field.eval(xs);
            field.gradient(xs, std::span<double>(g.data(), n));
            double s = 0.0;
            for (int d = 0; d < n; ++d)
                s += g[d] * g[d];
            center_w[idx] = s;
        });
    }

    // Min/max over the 2^n corners of cell `ci` (multi-index decoded inline).
    void corner_range(std::int64_t ci, double& lo, double& hi) const {
        std::array<int, kMaxDim> c{};
        std::int64_t rem = ci;
        for (int d = 0; d < n; ++d) {
            c[d] = int(rem % cells);
            rem /= cells;
        }
        lo = 1e300;
        hi = -1e300;
        for (int mask = 0; mask < (1 << n); ++mask) {
            std::int64_t idx = 0;
            std::int64_t stride = 1;
            for (int d = 0; d < n; ++d) {
                idx += (c[d] + ((mask >> d) & 1)) * stride;
                stride *= (cells + 1);
            }
            double v = corner_v[std::size_t(idx)];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }

    bool cell_on_boundary(std::int64_t ci) const {
        std::int64_t rem = ci;
        for (int d = 0; d < n; ++d) {
            int q = int(rem % cells);
            rem /= cells;
            if (q == 0 || q == cells - 1)
                return true;
        }
        return false;
    }

    void cell_center(std::int64_t ci, double* x) const {
        std::int64_t rem = ci;
        for (int d = 0; d < n; ++d) {
            int q = int(rem % cells);
            rem /= cells;
            x[d] = box.lo[d] + step[d] * (q + 0.5);
        }
    }
};

PhaseSpaceQuadrature::PhaseSpaceQuadrature(const ScalarField& field, QuadParams params)
    : field_(field), params_(params) {
    int cells = params.cells > 0 ? params.cells : default_cells(field.dimension(), false);
    if (cells < 8)
        throw config_error("phase-space quadrature needs >= 8 cells per dimension");
    fine_ = std::make_shared<Grid>();
    fine_->build(field, cells);
    coarse_ = std::make_shared<Grid>();
    coarse_->build(field, std::max(8, cells / 2));
}

double PhaseSpaceQuadrature::integrate_on(const Grid& g, double lambda,
                                          PhaseWeight weight) const {
    const int n = g.n;
    const double expo = 0.5 * n;
    std::int64_t n_cells = std::int64_t(g.center_v.size());

    unsigned nt = std::max(1u, std::thread::hardware_concurrency());
    std::vector<double> partial(nt, 0.0);
    std::vector<char> coverage_flag(nt, 0);

    parallel_for(std::size_t(nt), [&](std::size_t t) {
        double acc = 0.0;
        std::array<double, kMaxDim> x{};
        std::array<double, kMaxDim> grad{};
        for (std::int64_t ci = std::int64_t(t); ci < n_cells; ci += std::int64_t(nt)) {
            double lo, hi;
            g.corner_range(ci, lo, hi);
            if (lo >= lambda)
                continue; // cell fully outside the sublevel set
            if (g.cell_on_boundary(ci)) {
                coverage_flag[t] = 1;
                continue;
            }
            if (hi <= lambda || !params_.refine) {
                double f = std::max(lambda - g.center_v[ci], 0.0);
                double val = std::pow(f, expo);
                if (weight == PhaseWeight::GradSquared)
                    val *= g.center_w[ci];
                acc += val * g.cell_volume;
                continue;
            }
            // Crossing cell: one dyadic refinement, midpoint per subcell.
            g.cell_center(ci, x.data());
            double sub_vol = g.cell_volume / double(1 << n);
            for (int mask = 0; mask < (1 << n); ++mask) {
                std::array<double, kMaxDim> xs{};
                for (int d = 0; d < n; ++d)
                    xs[d] = x[d] + (((mask >> d) & 1) ? 0.25 : -0.25) * g.step[d];
                auto pt = std::span<const double>(xs.data(), n);
                double v = field_.eval(pt);
                if (v >= lambda)
                    continue;
                double val = std::pow(lambda - v, expo);
                if (weight == PhaseWeight::GradSquared) {
                    field_.gradient(pt, std::span<double>(grad.data(), n));
                    double s = 0.0;
                    for (int d = 0; d < n; ++d)
                        s += grad[d] * grad[d];
                    val *= s;
                }
                acc += val * sub_vol;
            }
        }
        partial[t] = acc;
    }, nt);

    for (char f : coverage_flag)
        if (f)
            throw coverage_error("sublevel set touches the quadrature box boundary");
    double total = 0.0;
    for (double p : partial)
        total += p;
    return total;
}

QuadResult PhaseSpaceQuadrature::integrate(double lambda, PhaseWeight weight) const {
    if (!(lambda > 0.0) || lambda > field_.lambda0() * (1.0 + 1e-12))
        throw config_error("phase-space integral needs 0 < lambda <= lambda0");
    QuadResult r;
    r.value = integrate_on(*fine_, lambda, weight);
    double coarse = integrate_on(*coarse_, lambda, weight);
    r.err_est = std::abs(r.value - coarse) / 3.0;
    r.omega = unit_ball_volume(field_.dimension());
    return r;
}

QuadResult phase_space_integral_oracle(const ScalarField& field, double lambda,
                                       PhaseWeight weight, QuadParams params) {
    return PhaseSpaceQuadrature(field, params).integrate(lambda, weight);
}

// ---------------------------------------------------------------------------
// 2-D level-set extraction (marching squares)

struct LevelSetScan2D::Grid {
    int cells = 0;
    Box box;
    double hx = 0.0, hy = 0.0;
    std::vector<double> v; // (cells+1)^2 corner values

    double at(int i, int j) const { return v[std::size_t(j) * (cells + 1) + i]; }

    void build(const ScalarField& field, int cells_per_dim) {
        cells = cells_per_dim;
        box = field.box();
        hx = (box.hi[0] - box.lo[0]) / cells;
        hy = (box.hi[1] - box.lo[1]) / cells;
        v.resize(std::size_t(cells + 1) * (cells + 1));
        parallel_for(std::size_t(cells + 1), [&](std::size_t j) {
            double y = box.lo[1] + hy * double(j);
            for (int i = 0; i <= cells; ++i) {
                double x[2] = {box.lo[0] + hx * double(i), y};
                v[j * (cells + 1) + i] = field.eval(std::span<const double>(x, 2));
            }
        });
    }
};

LevelSetScan2D::LevelSetScan2D(const ScalarField& field, QuadParams params)
    : field_(field) {
    if (field.dimension() != 2)
        throw geometry_error("marching-squares extraction is 2-D only");
    int cells = params.cells > 0 ? params.cells : default_cells(2, true);
    if (cells < 16)
        throw config_error("level-set scan needs >= 16 cells per dimension");
    fine_ = std::make_shared<Grid>();
    fine_->build(field, cells);
    coarse_ = std::make_shared<Grid>();
    coarse_->build(field, cells / 2);
}

namespace {

struct Pt {
    double x, y;
};

double polygon_area(const Pt* p, int m) {
    double a = 0.0;
    for (int i = 0; i < m; ++i) {
        const Pt& u = p[i];
        const Pt& w = p[(i + 1) % m];
        a += u.x * w.y - w.x * u.y;
    }
    return 0.5 * std::abs(a);
}

} // namespace

SurfaceInvariants LevelSetScan2D::scan(const Grid& g, double s,
                                       bool need_segments) const {
    const int N = g.cells;
    SurfaceInvariants out;
    out.min_grad = 1e300;
    out.max_grad = 0.0;

    unsigned nt = std::max(1u, std::thread::hardware_concurrency());
    struct Partial {
        double i1 = 0, i2 = 0, area = 0, vol = 0;
        double min_g = 1e300, max_g = 0;
        char coverage = 0, near_critical = 0;
    };
    std::vector<Partial> parts(nt);

    parallel_for(std::size_t(nt), [&](std::size_t t) {
        Partial& P = parts[t];
        for (int j = int(t); j < N; j += int(nt)) {
            double y0 = g.box.lo[1] + g.hy * j;
            double y1 = y0 + g.hy;
            for (int i = 0; i < N; ++i) {
                double f00 = g.at(i, j) - s;
                double f10 = g.at(i + 1, j) - s;
                double f11 = g.at(i + 1, j + 1) - s;
                double f01 = g.at(i, j + 1) - s;
                bool in00 = f00 < 0, in10 = f10 < 0, in11 = f11 < 0, in01 = f01 < 0;
                int inside = int(in00) + int(in10) + int(in11) + int(in01);
                if (inside == 0)
                    continue;
                if (i == 0 || j == 0 || i == N - 1 || j == N - 1) {
                    P.coverage = 1;
                    continue;
                }
                double x0 = g.box.lo[0] + g.hx * i;
                double x1 = x0 + g.hx;
                if (inside == 4) {
                    P.vol += g.hx * g.hy;
                    continue;
                }
                // Perimeter walk: corners CCW with edge crossings by linear
                // interpolation of V - s.
                Pt corner[4] = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
                double f[4] = {f00, f10, f11, f01};
                Pt poly[8];
                Pt cross[4];
                int cross_edge[4];
                int np = 0, nc = 0;
                for (int e = 0; e < 4; ++e) {
                    int e2 = (e + 1) % 4;
                    if (f[e] < 0)
                        poly[np++] = corner[e];
                    if ((f[e] < 0) != (f[e2] < 0)) {
                        double tt = f[e] / (f[e] - f[e2]);
                        Pt c{corner[e].x + tt * (corner[e2].x - corner[e].x),
                             corner[e].y + tt * (corner[e2].y - corner[e].y)};
                        poly[np++] = c;
                        cross[nc] = c;
                        cross_edge[nc] = e;
                        ++nc;
                    }
                }
                bool saddle = (inside == 2) && (in00 == in11);
                double fc = 0.0;
                if (saddle) {
                    double xc[2] = {0.5 * (x0 + x1), 0.5 * (y0 + y1)};
                    fc = field_.eval(std::span<const double>(xc, 2)) - s;
                }
                // Area of {V < s} within the cell.
                if (!saddle || fc < 0) {
                    P.vol += polygon_area(poly, np);
                } else {
                    // Two disconnected corner regions.
                    for (int e = 0; e < 4; ++e) {
                        if (f[e] >= 0)
                            continue;
                        // The region at corner e is bounded by the crossings
                        // on its two adjacent edges.
                        int eprev = (e + 3) % 4;
                        Pt tri[3] = {corner[e], {0, 0}, {0, 0}};
                        int k = 1;
                        for (int c = 0; c < nc; ++c)
                            if (cross_edge[c] == e || cross_edge[c] == eprev)
                                tri[k++] = cross[c];
                        if (k == 3)
                            P.vol += polygon_area(tri, 3);
                    }
                }
                if (!need_segments || nc == 0)
                    continue;
                // Segment pairing; the saddle case splits by center sign.
                int seg_a[2], seg_b[2], nseg = 0;
                if (nc == 2) {
                    seg_a[0] = 0;
                    seg_b[0] = 1;
                    nseg = 1;
                } else if (nc == 4) {
                    if (fc < 0) {
                        seg_a[0] = 0; seg_b[0] = 1;
                        seg_a[1] = 2; seg_b[1] = 3;
                    } else {
                        seg_a[0] = 3; seg_b[0] = 0;
                        seg_a[1] = 1; seg_b[1] = 2;
                    }
                    nseg = 2;
                }
                for (int q = 0; q < nseg; ++q) {
                    const Pt& a = cross[seg_a[q]];
                    const Pt& b = cross[seg_b[q]];
                    double len = std::hypot(b.x - a.x, b.y - a.y);
                    if (len <= 0)
                        continue;
                    double mid[2] = {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
                    double gr[2];
                    field_.gradient(std::span<const double>(mid, 2),
                                    std::span<double>(gr, 2));
                    double gn = std::hypot(gr[0], gr[1]);
                    if (gn < kGradFloor) {
                        P.near_critical = 1;
                        continue;
                    }
                    P.i1 += len / gn;
                    P.i2 += len * gn;
                    P.area += len;
                    P.min_g = std::min(P.min_g, gn);
                    P.max_g = std::max(P.max_g, gn);
                }
            }
        }
    }, nt);

    for (const Partial& P : parts) {
        if (P.coverage)
            throw coverage_error("level set touches the quadrature box boundary");
        if (P.near_critical)
            throw near_critical_error("|grad V| below 1e-10 at a surface sample");
        out.i1 += P.i1;
        out.i2 += P.i2;
        out.area += P.area;
        out.volume += P.vol;
        out.min_grad = std::min(out.min_grad, P.min_g);
        out.max_grad = std::max(out.max_grad, P.max_g);
    }
    return out;
}

SurfaceInvariants LevelSetScan2D::invariants(double s) const {
    if (!(s > 0.0) || s >= field_.lambda0())
        throw config_error("level-set extraction needs 0 < s < lambda0");
    SurfaceInvariants fine = scan(*fine_, s, true);
    SurfaceInvariants coarse = scan(*coarse_, s, true);
    double rel = 0.0;
    auto add_rel = [&rel](double a, double b) {
        if (a != 0.0)
            rel = std::max(rel, std::abs(a - b) / (3.0 * std::abs(a)));
    };
    add_rel(fine.i1, coarse.i1);
    add_rel(fine.i2, coarse.i2);
    add_rel(fine.area, coarse.area);
    fine.err_est = rel;
    return fine;
}

double LevelSetScan2D::volume(double s) const {
    if (!(s > 0.0) || s > field_.lambda0() * (1.0 + 1e-12))
        throw config_error("sublevel volume needs 0 < s <= lambda0");
    return scan(*fine_, s, false).volume;
}

// ---------------------------------------------------------------------------
// Star-shaped extraction, n >= 3

struct StarShapedScan::CoarseGrid {
    int cells = 0;
    Box box;
    std::vector<double> v; // midpoint samples
    std::vector<double> step;
};

StarShapedScan::StarShapedScan(const ScalarField& field, QuadParams params)
    : field_(field), params_(params) {
    if (field.dimension() != 3)
        throw geometry_error("ray-shooting extraction supports n = 3 "
                             "(n = 2 uses marching squares)");
    coarse_ = std::make_shared<CoarseGrid>();
    coarse_->cells = 48;
    coarse_->box = field.box();
    int n = field.dimension();
    coarse_->step.resize(n);
    for (int d = 0; d < n; ++d)
        coarse_->step[d] = (coarse_->box.hi[d] - coarse_->box.lo[d]) / coarse_->cells;
    std::int64_t total = ipow(coarse_->cells, n);
    coarse_->v.resize(std::size_t(total));
    parallel_for(std::size_t(total), [&](std::size_t idx) {
        std::array<double, kMaxDim> x{};
        std::int64_t rem = std::int64_t(idx);
        for (int d = 0; d < n; ++d) {
            int q = int(rem % coarse_->cells);
            rem /= coarse_->cells;
            x[d] = coarse_->box.lo[d] + coarse_->step[d] * (q + 0.5);
        }
        coarse_->v[idx] = field_.eval(std::span<const double>(x.data(), n));
    });
}

std::vector<double> StarShapedScan::centroid(double s) const {
    int n = field_.dimension();
    std::vector<double> c(n, 0.0);
    std::int64_t count = 0;
    std::int64_t total = std::int64_t(coarse_->v.size());
    for (std::int64_t idx = 0; idx < total; ++idx) {
        if (coarse_->v[std::size_t(idx)] >= s)
            continue;
        std::int64_t rem = idx;
        for (int d = 0; d < n; ++d) {
            int q = int(rem % coarse_->cells);
            rem /= coarse_->cells;
            c[d] += coarse_->box.lo[d] + coarse_->step[d] * (q + 0.5);
        }
        ++count;
    }
    if (count == 0)
        throw config_error("sublevel set empty at the requested level");
    for (double& x : c)
        x /= double(count);
    return c;
}

SurfaceInvariants StarShapedScan::scan(double s, int n_polar) const {
    const int n = 3;
    std::vector<double> c = centroid(s);
    if (field_.eval(c) >= s)
        throw geometry_error("sublevel-set centroid is outside the level set");

    GaussLegendreRule gl = gauss_legendre(n_polar);
    int n_phi = 2 * n_polar;
    Box box = field_.box();

    SurfaceInvariants out;
    out.min_grad = 1e300;

    std::vector<SurfaceInvariants> rows(static_cast<std::size_t>(n_polar));
    std::vector<char> row_error(static_cast<std::size_t>(n_polar), 0);
    std::vector<std::string> row_msg(static_cast<std::size_t>(n_polar));

    parallel_for(std::size_t(n_polar), [&](std::size_t iu) {
        SurfaceInvariants acc;
        acc.min_grad = 1e300;
        double mu = gl.nodes[iu];
        double smu = std::sqrt(std::max(0.0, 1.0 - mu * mu));
        for (int ip = 0; ip < n_phi; ++ip) {
            double phi = 2.0 * M_PI * (ip + 0.5) / n_phi;
            double u[3] = {smu * std::cos(phi), smu * std::sin(phi), mu};
            double w = gl.weights[iu] * (2.0 * M_PI / n_phi);
            // Reach of the ray inside the box.
            double t_max = 1e300;
            for (int d = 0; d < n; ++d) {
                if (u[d] > 1e-14)
                    t_max = std::min(t_max, (box.hi[d] - c[d]) / u[d]);
                else if (u[d] < -1e-14)
                    t_max = std::min(t_max, (box.lo[d] - c[d]) / u[d]);
            }
            auto value_at = [&](double t) {
                double x[3] = {c[0] + t * u[0], c[1] + t * u[1], c[2] + t * u[2]};
                return field_.eval(std::span<const double>(x, 3)) - s;
            };
            const int march = 192;
            double dt = t_max / march;
            double t_prev = 0.0, f_prev = value_at(0.0);
            double t_root = -1.0;
            int crossings = 0;
            for (int k = 1; k <= march; ++k) {
                double t = dt * k;
                double f = value_at(t);
                if ((f_prev < 0) != (f < 0)) {
                    ++crossings;
                    if (crossings == 1) {
                        double a = t_prev, b = t;
                        for (int it = 0; it < 64; ++it) {
                            double m = 0.5 * (a + b);
                            if ((value_at(m) < 0) == (value_at(a) < 0))
                                a = m;
                            else
                                b = m;
                        }
                        t_root = 0.5 * (a + b);
                    }
                }
                t_prev = t;
                f_prev = f;
            }
            if (t_root < 0) {
                row_error[iu] = 1;
                row_msg[iu] = "ray never crossed the level set inside the box";
                return;
            }
            if (crossings > 1) {
                row_error[iu] = 2;
                row_msg[iu] = "level set is not star-shaped about the centroid";
                return;
            }
            double x[3] = {c[0] + t_root * u[0], c[1] + t_root * u[1],
                           c[2] + t_root * u[2]};
            double g[3];
            field_.gradient(std::span<const double>(x, 3), std::span<double>(g, 3));
            double gn = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
            if (gn < kGradFloor) {
                row_error[iu] = 3;
                row_msg[iu] = "|grad V| below 1e-10 at a surface sample";
                return;
            }
            double cosg = (u[0] * g[0] + u[1] * g[1] + u[2] * g[2]) / gn;
            if (cosg < 1e-6) {
                row_error[iu] = 2;
                row_msg[iu] = "tangential ray crossing; not star-shaped";
                return;
            }
            double r = t_root;
            double dS = w * r * r / cosg;
            acc.i1 += dS / gn;
            acc.i2 += dS * gn;
            acc.area += dS;
            acc.volume += w * r * r * r / 3.0;
            acc.min_grad = std::min(acc.min_grad, gn);
            acc.max_grad = std::max(acc.max_grad, gn);
        }
        rows[iu] = acc;
    });

    for (std::size_t iu = 0; iu < rows.size(); ++iu) {
        switch (row_error[iu]) {
        case 1:
            throw coverage_error(row_msg[iu]);
        case 2:
            throw geometry_error(row_msg[iu]);
        case 3:
            throw near_critical_error(row_msg[iu]);
        default:
            break;
        }
        out.i1 += rows[iu].i1;
        out.i2 += rows[iu].i2;
        out.area += rows[iu].area;
        out.volume += rows[iu].volume;
        out.min_grad = std::min(out.min_grad, rows[iu].min_grad);
        out.max_grad = std::max(out.max_grad, rows[iu].max_grad);
    }
    return out;
}

SurfaceInvariants StarShapedScan::invariants(double s) const {
    if (!(s > 0.0) || s >= field_.lambda0())
        throw config_error("level-set extraction needs 0 < s < lambda0");
    int n_polar = params_.angular_cells > 0 ? params_.angular_cells : 48;
    SurfaceInvariants fine = scan(s, n_polar);
    SurfaceInvariants coarse = scan(s, std::max(8, n_polar / 2));
    double rel = 0.0;
    auto add_rel = [&rel](double a, double b) {
        if (a != 0.0)
            rel = std::max(rel, std::abs(a - b) / (3.0 * std::abs(a)));
    };
    add_rel(fine.i1, coarse.i1);
    add_rel(fine.i2, coarse.i2);
    add_rel(fine.area, coarse.area);
    fine.err_est = rel;
    return fine;
}

// ---------------------------------------------------------------------------
// Dispatchers

SurfaceInvariants level_surface_invariants_oracle(const ScalarField& field,
                                                  double s, QuadParams params) {
    if (field.dimension() == 2)
        return LevelSetScan2D(field, params).invariants(s);
    if (field.dimension() == 3)
        return StarShapedScan(field, params).invariants(s);
    throw geometry_error("level-surface extraction supports n in {2, 3}");
}

QuadResult sublevel_volume_oracle(const ScalarField& field, double s,
                                  QuadParams params) {
    QuadResult r;
    r.omega = unit_ball_volume(field.dimension());
    if (field.dimension() == 2) {
        LevelSetScan2D scan(field, params);
        r.value = scan.volume(s);
        QuadParams half = params;
        half.cells = std::max(16, (params.cells > 0 ? params.cells
                                                    : default_cells(2, true)) / 2);
        r.err_est = std::abs(r.value - LevelSetScan2D(field, half).volume(s)) / 3.0;
        return r;
    }
    if (field.dimension() == 3) {
        StarShapedScan scan(field, params);
        SurfaceInvariants inv = scan.invariants(s);
        r.value = inv.volume;
        r.err_est = inv.err_est * inv.volume;
        return r;
    }
    throw geometry_error("sublevel volume oracle supports n in {2, 3}");
}

bool is_regular_value(const SurfaceInvariants& inv) {
    return inv.min_grad >= kGradFloor && inv.min_grad >= 1e-6 * inv.max_grad;
}

// ---------------------------------------------------------------------------
// Pushforward density

PushforwardDensity pushforwardensity_impl(const ScalarField& field, const Box& box,
                                          int bins, QuadParams params) {
    int n = field.dimension();
    int cells = params.cells > 0 ? params.cells : default_cells(n, true);
    double lambda0 = field.lambda0();
    std::vector<double> step(n);
    double cell_vol = 1.0;
    for (int d = 0; d < n; ++d) {
        step[d] = (box.hi[d] - box.lo[d]) / cells;
        cell_vol *= step[d];
    }
    std::int64_t total = ipow(cells, n);
    double bin_width = lambda0 / bins;

    unsigned nt = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::vector<double>> mass_parts(nt, std::vector<double>(bins, 0.0));
    parallel_for(std::size_t(nt), [&](std::size_t t) {
        std::array<double, kMaxDim> x{};
        auto& mass = mass_parts[t];
        for (std::int64_t idx = std::int64_t(t); idx < total;
             idx += std::int64_t(nt)) {
            std::int64_t rem = idx;
            for (int d = 0; d < n; ++d) {
                int q = int(rem % cells);
                rem /= cells;
                x[d] = box.lo[d] + step[d] * (q + 0.5);
            }
            double v = field.eval(std::span<const double>(x.data(), n));
            if (v <= 0.0 || v > lambda0)
                continue;
            int b = std::min(bins - 1, int(v / bin_width));
            mass[std::size_t(b)] += cell_vol;
        }
    }, nt);

    std::vector<double> mass(bins, 0.0);
    for (const auto& part : mass_parts)
        for (int b = 0; b < bins; ++b)
            mass[std::size_t(b)] += part[std::size_t(b)];

    PushforwardDensity out;
    std::vector<double> density(mass);
    for (double& m : density)
        m /= bin_width;
    out.density = Curve(0.5 * bin_width, lambda0 - 0.5 * bin_width,
                        std::move(density), "pushforward_density");
    for (int b = 0; b < bins; ++b) {
        std::vector<double> neigh;
        for (int k = b - 3; k <= b + 3; ++k) {
            if (k == b || k < 0 || k >= bins)
                continue;
            neigh.push_back(mass[std::size_t(k)]);
        }
        if (neigh.empty())
            continue;
        std::sort(neigh.begin(), neigh.end());
        double med = neigh[neigh.size() / 2];
        if (mass[std::size_t(b)] > 10.0 * med && mass[std::size_t(b)] > 0.0)
            out.atom_bins.push_back(b);
        out.total_mass += mass[std::size_t(b)];
    }
    return out;
}

PushforwardDensity pushforward_density(const ScalarField& field, const Box& box,
                                       int bins, QuadParams params) {
    if (bins < 10)
        throw config_error("pushforward density needs bins >= 10");
    return pushforwardensity_impl(field, box, bins, params);
}

// ---------------------------------------------------------------------------
// Full phase-space integrals of a 1-D test function

double phase_space_test_integral(const ScalarField& field,
                                 const TestFunction1D& g, PhaseWeight weight,
                                 QuadParams params) {
    int n = field.dimension();
    int cells = params.cells > 0 ? params.cells : default_cells(n, false);
    Box box = field.box();
    std::vector<double> step(n);
    double cell_vol = 1.0;
    for (int d = 0; d < n; ++d) {
        step[d] = (box.hi[d] - box.lo[d]) / cells;
        cell_vol *= step[d];
    }
    std::int64_t total = ipow(cells, n);
    double half_n = 0.5 * n;
    double omega = unit_ball_volume(n);
    GaussLegendreRule gl = gauss_legendre(24);

    unsigned nt = std::max(1u, std::thread::hardware_concurrency());
    std::vector<double> partial(nt, 0.0);
    parallel_for(std::size_t(nt), [&](std::size_t t) {
        std::array<double, kMaxDim> x{};
        std::array<double, kMaxDim> gr{};
        double acc = 0.0;
        for (std::int64_t idx = std::int64_t(t); idx < total;
             idx += std::int64_t(nt)) {
            std::int64_t rem = idx;
            for (int d = 0; d < n; ++d) {
                int q = int(rem % cells);
                rem /= cells;
                x[d] = box.lo[d] + step[d] * (q + 0.5);
            }
            auto xs = std::span<const double>(x.data(), n);
            double v = field.eval(xs);
            // Radial xi integral: omega_n * (n/2) * int g(v + rho) rho^{n/2-1} drho.
            double xi_int = 0.0;
            if (g.flat_below && v < g.support_lo) {
                // g = 1 on [v, support_lo]: closed-form head.
                xi_int += std::pow(g.support_lo - v, half_n);
            }
            double band_lo = std::max(0.0, g.support_lo - v);
            double band_hi = g.support_hi - v;
            if (band_hi > band_lo) {
                double mid = 0.5 * (band_lo + band_hi);
                double rad = 0.5 * (band_hi - band_lo);
                double acc_band = 0.0;
                for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
                    double rho = mid + rad * gl.nodes[k];
                    acc_band += gl.weights[k] * g.g(v + rho) *
                                std::pow(rho, half_n - 1.0);
                }
                xi_int += half_n * rad * acc_band;
            }
            if (xi_int == 0.0)
                continue;
            double w = 1.0;
            if (weight == PhaseWeight::GradSquared) {
                field.gradient(xs, std::span<double>(gr.data(), n));
                w = 0.0;
                for (int d = 0; d < n; ++d)
                    w += gr[d] * gr[d];
            }
            acc += w * xi_int * cell_vol;
        }
        partial[t] = acc;
    }, nt);

    double total_val = 0.0;
    for (double p : partial)
        total_val += p;
    return omega * total_val;
}

} // namespace specinv
