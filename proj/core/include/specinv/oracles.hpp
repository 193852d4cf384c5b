#ifndef SPECINV_ORACLES_HPP
#define SPECINV_ORACLES_HPP

#include <functional>
#include <memory>
#include <vector>

#include "specinv/curve.hpp"
#include "specinv/potentials.hpp"

namespace specinv {

enum class PhaseWeight { One, GradSquared };

struct QuadParams {
    int cells = 0;       // cells per dimension; 0 picks a default by dimension
    bool refine = true;  // one dyadic refinement level in boundary cells
    int angular_cells = 0; // rays per polar direction for n >= 3 extraction
};

struct QuadResult {
    double value = 0.0;
    double err_est = 0.0;
    double omega = 0.0; // unit ball volume, reported so callers can form
                        // the full phase-space value
};

/// Spatial integral over {V < lambda} of (lambda - V)^{n/2}, optionally
/// weighted by |grad V|^2. Tensor midpoint rule with one dyadic refinement
/// in cells crossing {V = lambda}; the integrand vanishes at the boundary,
/// so low-order cells suffice. Caches the sampled field so repeated calls
/// over a lambda grid are cheap.
class PhaseSpaceQuadrature {
  public:
    PhaseSpaceQuadrature(const ScalarField& field, QuadParams params = {});
    QuadResult integrate(double lambda, PhaseWeight weight) const;

  private:
    struct Grid;
    double integrate_on(const Grid& g, double lambda, PhaseWeight weight) const;
    const ScalarField& field_;
    QuadParams params_;
    std::shared_ptr<Grid> fine_, coarse_;
};

QuadResult phase_space_integral_oracle(const ScalarField& field, double lambda,
                                       PhaseWeight weight, QuadParams params = {});

struct SurfaceInvariants {
    double i1 = 0.0;       // integral of 1/|grad V| over {V = s}
    double i2 = 0.0;       // integral of |grad V| over {V = s}
    double area = 0.0;     // surface measure of {V = s}
    double volume = 0.0;   // measure of {V < s}
    double min_grad = 0.0; // extremes of |grad V| over the extracted level set
    double max_grad = 0.0;
    double err_est = 0.0;  // relative discretization estimate
};

/// Marching-squares level-set extraction on a cached 2-D grid.
class LevelSetScan2D {
  public:
    LevelSetScan2D(const ScalarField& field, QuadParams params = {});
    SurfaceInvariants invariants(double s) const;
    double volume(double s) const;

  private:
    struct Grid;
    SurfaceInvariants scan(const Grid& g, double s, bool need_segments) const;
    const ScalarField& field_;
    std::shared_ptr<Grid> fine_, coarse_;
};

/// Radial ray-shooting extraction for star-shaped level sets, n >= 3.
class StarShapedScan {
  public:
    StarShapedScan(const ScalarField& field, QuadParams params = {});
    SurfaceInvariants invariants(double s) const;

  private:
    SurfaceInvariants scan(double s, int n_polar) const;
    std::vector<double> centroid(double s) const;
    const ScalarField& field_;
    QuadParams params_;
    struct CoarseGrid;
    std::shared_ptr<CoarseGrid> coarse_;
};

/// Dispatches on dimension: marching squares for n = 2, ray shooting for
/// n = 3. Fails with geometry_error for n >= 4.
SurfaceInvariants level_surface_invariants_oracle(const ScalarField& field,
                                                  double s, QuadParams params = {});

QuadResult sublevel_volume_oracle(const ScalarField& field, double s,
                                  QuadParams params = {});

/// True when min |grad V| on the extracted level set exceeds both the
/// absolute floor 1e-10 and 1e-6 times its max (regular-value screen).
bool is_regular_value(const SurfaceInvariants& inv);

struct PushforwardDensity {
    Curve density;               // d(V_* dx)/ds estimate on bin centers
    std::vector<int> atom_bins;  // bins whose mass exceeds 10x the
                                 // neighboring-bin median
    double total_mass = 0.0;     // sum of bin masses = vol{0 < V <= lambda0}
};

PushforwardDensity pushforward_density(const ScalarField& field, const Box& box,
                                       int bins, QuadParams params = {});

/// A 1-D test function g with compact transition band [support_lo, support_hi];
/// flat_below means g = 1 to the left of the band (mollified step shape).
struct TestFunction1D {
    std::function<double(double)> g;
    double support_lo = 0.0;
    double support_hi = 0.0;
    bool flat_below = false;
};

/// Full phase-space integral of g(|xi|^2 + V(x)) (weight One) or
/// |grad V|^2 g(|xi|^2 + V(x)) (weight GradSquared) over R^{2n}, reduced to
/// a radial xi integral per spatial point.
double phase_space_test_integral(const ScalarField& field,
                                 const TestFunction1D& g, PhaseWeight weight,
                                 QuadParams params = {});

} // namespace specinv

#endif
