#ifndef SPECINV_FLOWLINES_HPP
#define SPECINV_FLOWLINES_HPP

#include <utility>
#include <vector>

#include "specinv/curve.hpp"
#include "specinv/potentials.hpp"

namespace specinv {

/// Gradient flowline x' = grad V(x) sampled at fixed time steps.
struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> points;
    std::vector<double> speeds; // |grad V| at the sample points
    std::vector<double> levels; // V at the sample points
    double s0 = 0.0;            // V at the starting point
};

/// Classical fixed-step 4th-order integration of x' = grad V from x0,
/// stopping early once V reaches lambda0. V must increase strictly along
/// the flow; a gradient collapse below 1e-10 is a stagnation error.
Trajectory integrate_flowline(const ScalarField& field,
                              std::vector<double> x0, double t_end, double dt);

/// Max distance from the points to their best-fit line (principal direction
/// of the centered cloud), divided by the trajectory arc length.
double line_deviation(const Trajectory& traj);

/// Deviation between V(x(t)) along the flow and the level predicted by
/// transporting s0 with ds/dt = F(s): max |V(x(t)) - I^{-1}(t)| where
/// I(V) = int_{s0}^{V} dV'/F(V').
double level_transport_check(const Trajectory& traj, const Curve& F, double s0);

/// Least-squares intersection point of the fitted flowline axes and the RMS
/// distance of the lines to it. Requires >= n trajectories that fit lines
/// within `deviation_threshold`.
std::pair<std::vector<double>, double>
common_center_estimate(const std::vector<Trajectory>& trajectories,
                       double deviation_threshold = 1e-4);

struct FlowCertificate {
    std::vector<double> center;
    double spread = 0.0;
    double max_line_deviation = 0.0;
    double max_transport_deviation = 0.0;
    bool accepts = false;
};

/// Integrates `count` flowlines from equally spaced starts on {V = s0},
/// runs the straightness/concurrency checks, and optionally the level
/// transport law against F. 2-D starts are placed by ray shooting from the
/// potential center estimate.
FlowCertificate flowline_certificate(const ScalarField& field, double s0,
                                     int count, double t_end, double dt,
                                     const Curve* F = nullptr,
                                     double line_tol = 1e-6,
                                     double spread_tol = 1e-5);

/// Starting points on the level set {V = s0} (2-D only), by ray shooting
/// from the sublevel centroid at equally spaced angles.
std::vector<std::vector<double>> level_set_starts(const ScalarField& field,
                                                  double s0, int count);

} // namespace specinv

#endif
