#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "danneal/objective.hpp"

namespace danneal {

// Midpoint-rule discretization of the probability density proportional to
// exp(-2 U(x) / epsilon^2) on a box, for dim <= 2. As epsilon decreases the
// mass concentrates on the global minimum set of U; the grid is the numeric
// witness for that limit.
struct GibbsGrid {
    int dim = 1;
    Eigen::VectorXd lo, hi;
    int resolution = 64;  // cells per axis
    double epsilon = 0.1;
    // Normalized density at cell centers; x varies fastest in the flat index.
    Eigen::ArrayXd density;
    double log_z = 0.0;  // log of the midpoint estimate of integral exp(-2U/eps^2)

    std::int64_t n_cells() const;
    double cell_volume() const;
    Eigen::VectorXd cell_center(std::int64_t flat) const;
    double total_mass() const { return density.sum() * cell_volume(); }
};

class GridError : public std::runtime_error {
  public:
    enum class Kind { BadDomain, BoundaryLeak, TooCoarse };
    GridError(Kind kind, const std::string& message);
    Kind kind;
};

// Builds the normalized grid. Log-domain throughout, so tiny epsilon cannot
// underflow the normalization. Errors:
//   - BadDomain      dim > 2 ("grid oracle limited to d <= 2"), resolution
//                    < 64, or a malformed box;
//   - BoundaryLeak   boundary density above 1e-12 of the peak — the box does
//                    not confine the measure, quadrature would be lying;
//   - TooCoarse      the peak cell exceeds 10x its axis neighbors — the
//                    concentration spike is unresolved.
// Rows are filled in parallel when threads > 1; the result is identical for
// any thread count.
GibbsGrid build_grid(const ObjectiveSet& objective, const Eigen::VectorXd& lo,
                     const Eigen::VectorXd& hi, int resolution, double epsilon, int threads = 1);

// Total mass of cells whose center lies within `radius` of any of `centers`.
// Centers must lie inside the box.
double mass_near(const GibbsGrid& grid, const std::vector<Eigen::VectorXd>& centers,
                 double radius);

// Evidence that the minimum set of U is a finite set of isolated,
// nondegenerate zeros — the hypotheses that make the small-epsilon limit of
// the Gibbs measure concentrate there:
//   (i)   positive mass strictly below a small level near the candidates,
//   (ii)  min U = 0 at the candidates (within 1e-8),
//   (iii) the sublevel set is compact (U large on a distant sphere),
//   (iv)  the construction is seam-smooth and every candidate has a
//         nondegenerate finite-difference Hessian.
struct MinimumCertificate {
    double sublevel_level = 0.0;
    int sublevel_hits = 0;
    bool sublevel_positive = false;

    double min_value = 0.0;
    bool min_is_zero = false;

    double sphere_radius = 0.0;
    double sphere_min = 0.0;
    bool sublevel_compact = false;

    double seam_gap = 0.0;
    bool smooth = false;

    struct Candidate {
        Eigen::VectorXd x;
        double value = 0.0;
        double hessian_min_sv = 0.0;
        bool hessian_ok = false;
    };
    std::vector<Candidate> candidates;

    bool pass() const;
};

MinimumCertificate certify_minimum_set(const ObjectiveSet& objective,
                                       const std::vector<Eigen::VectorXd>& candidate_minima,
                                       std::uint64_t seed = 0);

}  // namespace danneal
