#include "specinv/interp.hpp"

#include <algorithm>
#include <cmath>

#include "specinv/errors.hpp"

namespace specinv {

PchipInterpolant::PchipInterpolant(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
        throw config_error("pchip: need >= 2 knots and matching value count");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(x_[i + 1] > x_[i]))
            throw config_error("pchip: knots must be strictly increasing");

    d_.assign(n, 0.0);
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    if (n == 2) {
        d_[0] = d_[1] = delta[0];
        return;
    }
    // Interior slopes: weighted harmonic mean when secants agree in sign.
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            d_[i] = 0.0;
        } else {
            double w1 = 2.0 * h[i] + h[i - 1];
            double w2 = h[i] + 2.0 * h[i - 1];
            d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    // One-sided endpoint slopes with the standard monotonicity clamp.
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (s * d0 <= 0.0)
            s = 0.0;
        else if (d0 * d1 < 0.0 && std::abs(s) > 3.0 * std::abs(d0))
            s = 3.0 * d0;
        return s;
    };
    d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

std::size_t PchipInterpolant::interval(double x) const {
    if (x <= x_.front())
        return 0;
    if (x >= x_.back())
        return x_.size() - 2;
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    return std::size_t(it - x_.begin()) - 1;
}

double PchipInterpolant::value(double x) const {
    std::size_t i = interval(x);
    double h = x_[i + 1] - x_[i];
    double t = (x - x_[i]) / h;
    double t2 = t * t, t3 = t2 * t;
    double h00 = 2 * t3 - 3 * t2 + 1;
    double h10 = t3 - 2 * t2 + t;
    double h01 = -2 * t3 + 3 * t2;
    double h11 = t3 - t2;
    return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

double PchipInterpolant::derivative(double x) const {
    std::size_t i = interval(x);
    double h = x_[i + 1] - x_[i];
    double t = (x - x_[i]) / h;
    double h00 = (6 * t * t - 6 * t) / h;
    double h10 = 3 * t * t - 4 * t + 1;
    double h01 = (-6 * t * t + 6 * t) / h;
    double h11 = 3 * t * t - 2 * t;
    return h00 * y_[i] + h10 * d_[i] + h01 * y_[i + 1] + h11 * d_[i + 1];
}

std::vector<double> isotonic_nondecreasing(const std::vector<double>& y) {
    std::size_t n = y.size();
    std::vector<double> level(n), weight(n);
    std::vector<std::size_t> count(n);
    std::size_t blocks = 0;
    for (std::size_t i = 0; i < n; ++i) {
        level[blocks] = y[i];
        weight[blocks] = 1.0;
        count[blocks] = 1;
        ++blocks;
        while (blocks > 1 && level[blocks - 2] > level[blocks - 1]) {
            double w = weight[blocks - 2] + weight[blocks - 1];
            level[blocks - 2] = (weight[blocks - 2] * level[blocks - 2] +
                                 weight[blocks - 1] * level[blocks - 1]) / w;
            weight[blocks - 2] = w;
            count[blocks - 2] += count[blocks - 1];
            --blocks;
        }
    }
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t b = 0; b < blocks; ++b)
        out.insert(out.end(), count[b], level[b]);
    return out;
}

std::vector<double> smoothed_derivative5(const std::vector<double>& y, double dx) {
    std::size_t n = y.size();
    std::vector<double> d(n, 0.0);
    if (n < 2)
        return d;
    if (n < 5) {
        for (std::size_t i = 0; i < n; ++i) {
            if (i == 0)
                d[i] = (y[1] - y[0]) / dx;
            else if (i + 1 == n)
                d[i] = (y[n - 1] - y[n - 2]) / dx;
            else
                d[i] = (y[i + 1] - y[i - 1]) / (2.0 * dx);
        }
        return d;
    }
    for (std::size_t i = 2; i + 2 < n; ++i)
        d[i] = (-2.0 * y[i - 2] - y[i - 1] + y[i + 1] + 2.0 * y[i + 2]) / (10.0 * dx);
    d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * dx);
    d[1] = (y[2] - y[0]) / (2.0 * dx);
    d[n - 2] = (y[n - 1] - y[n - 3]) / (2.0 * dx);
    d[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * dx);
    return d;
}

std::vector<double> second_difference(const std::vector<double>& y, double dx) {
    std::size_t n = y.size();
    std::vector<double> d(n, 0.0);
    if (n < 3)
        return d;
    for (std::size_t i = 1; i + 1 < n; ++i)
        d[i] = (y[i - 1] - 2.0 * y[i] + y[i + 1]) / (dx * dx);
    d[0] = d[1];
    d[n - 1] = d[n - 2];
    return d;
}

namespace {

// Integral of the piecewise-linear interpolant of y over [a, b], with the
// grid x_i = i*dx, i = 0..n-1; a and b are clamped to the grid range.
double linear_integral(const std::vector<double>& y, double dx, double a, double b) {
    std::size_t n = y.size();
    double lo = std::max(a, 0.0);
    double hi = std::min(b, dx * double(n - 1));
    if (hi <= lo)
        return 0.0;
    auto value_at = [&](double t) {
        double u = t / dx;
        std::size_t i = std::min<std::size_t>(std::size_t(u), n - 2);
        double f = u - double(i);
        return y[i] * (1.0 - f) + y[i + 1] * f;
    };
    std::size_t i0 = std::min<std::size_t>(std::size_t(lo / dx), n - 2);
    std::size_t i1 = std::min<std::size_t>(std::size_t(hi / dx), n - 2);
    if (i0 == i1)
        return 0.5 * (value_at(lo) + value_at(hi)) * (hi - lo);
    double total = 0.0;
    double x_break = dx * double(i0 + 1);
    total += 0.5 * (value_at(lo) + y[i0 + 1]) * (x_break - lo);
    for (std::size_t i = i0 + 1; i < i1; ++i)
        total += 0.5 * (y[i] + y[i + 1]) * dx;
    double x_last = dx * double(i1);
    total += 0.5 * (y[i1] + value_at(hi)) * (hi - x_last);
    return total;
}

} // namespace

std::vector<double> moving_average(const std::vector<double>& y, double dx,
                                   double half_width) {
    std::size_t n = y.size();
    std::vector<double> out(n, 0.0);
    if (half_width <= 0.5 * dx) {
        out = y;
        return out;
    }
    double span = dx * double(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        double c = dx * double(i);
        double a = std::max(0.0, c - half_width);
        double b = std::min(span, c + half_width);
        out[i] = linear_integral(y, dx, a, b) / (b - a);
    }
    return out;
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& y, double dx) {
    std::vector<double> out(y.size(), 0.0);
    for (std::size_t i = 1; i < y.size(); ++i)
        out[i] = out[i - 1] + 0.5 * (y[i - 1] + y[i]) * dx;
    return out;
}

} // namespace specinv
