#ifndef SPECINV_NUMERIC_HPP
#define SPECINV_NUMERIC_HPP

#include <cmath>
#include <cstdint>
#include <vector>

namespace specinv {

/// Volume of the unit ball in R^n: pi^{n/2} / Gamma(n/2 + 1).
inline double unit_ball_volume(int n) {
    return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

/// Exact binomial coefficient in double precision (n choose k).
inline double binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n)
        return 0.0;
    if (k > n - k)
        k = n - k;
    double r = 1.0;
    for (std::int64_t i = 1; i <= k; ++i)
        r = r * double(n - k + i) / double(i);
    return std::round(r);
}

struct GaussLegendreRule {
    std::vector<double> nodes;   // on (-1, 1)
    std::vector<double> weights; // sum to 2
};

/// Gauss-Legendre nodes/weights by Newton iteration on P_m.
GaussLegendreRule gauss_legendre(int m);

} // namespace specinv

#endif
