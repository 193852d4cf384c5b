#ifndef SPECINV_ERRORS_HPP
#define SPECINV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace specinv {

/// Bad run configuration or malformed input description. CLI exit code 2.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// File or directory level failure. CLI exit code 4.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Any failure of a numerical stage. CLI exit code 3.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Point outside the declared evaluation box of a potential.
struct domain_error : numerical_error {
    using numerical_error::numerical_error;
};

/// A sublevel or level set reaches the quadrature box boundary.
struct coverage_error : numerical_error {
    using numerical_error::numerical_error;
};

/// Level set is not star-shaped about the detected center (n >= 3 extraction).
struct geometry_error : numerical_error {
    using numerical_error::numerical_error;
};

/// |grad V| collapsed below the usable floor at a surface sample or along a flowline.
struct near_critical_error : numerical_error {
    using numerical_error::numerical_error;
};

/// Too few data points for a requested fit.
struct insufficient_data_error : numerical_error {
    using numerical_error::numerical_error;
};

/// Mollifier support exceeds the energy range covered by a spectrum.
struct truncation_error : numerical_error {
    using numerical_error::numerical_error;
};

/// Monotone inversion or regularized solve failed.
struct inversion_error : numerical_error {
    using numerical_error::numerical_error;
};

} // namespace specinv

#endif
