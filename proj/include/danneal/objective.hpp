#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace danneal {

// --- Scalar radial kernel ---------------------------------------------------
//
// g(y, r, eps) turns a range residual into a C^3 function of y = |x|:
//
//   inner   y <= r/2 - eps : -y^2 + (r/2)^2      (smooth cap over the origin)
//   bridge  r/2-eps < y < r/2 : C^3 blend of the two branches
//   outer   y >= r/2       : (y - r)^2           (the actual range residual)
//
// The blend weight is the degree-7 smoothstep in s = (y - (r/2-eps))/eps.
// Note the branches never meet (their gap is >= (r/2)^2), so the bridge
// climbs over a hump; that is inherent to this construction, and it is why
// the kernel is positive everywhere except the zero ring y = r.

double g_value(double y, double r, double eps);
double g_deriv(double y, double r, double eps, int order);  // order in {1,2,3}

// f(x, r) = g(|x|, r): C^3 on all of R^2 including the origin, where the
// inner branch gives the exact gradient -2x.
double f_value(const Eigen::Vector2d& x, double r, double eps);
Eigen::Vector2d f_grad(const Eigen::Vector2d& x, double r, double eps);

// --- Sensor geometry ---------------------------------------------------------

// Ranging geometry: sensors at s_n, targets at z_k, true distances
// d(n,k) = |z_k - s_n|. region_radius R bounds the diameter of the deployment
// region; bridge_eps is the g-kernel blend width.
struct SensorField {
    Eigen::Matrix<double, Eigen::Dynamic, 2> sensors;  // row n = s_n
    Eigen::Matrix<double, Eigen::Dynamic, 2> targets;  // row k = z_k
    Eigen::MatrixXd distances;                         // (n, k) entry = d_nk
    double region_radius = 3.0;
    double bridge_eps = 0.0;
    // Evaluate only the bounded-region formula everywhere, skipping the
    // radial blend to the quadratic tail. Matches simulations whose iterates
    // are known to stay inside the region.
    bool inner_only = false;

    int n_sensors() const { return static_cast<int>(sensors.rows()); }
    int n_targets() const { return static_cast<int>(targets.rows()); }
    int dim() const { return 2 * n_targets(); }

    // Stacked ground truth (z_1, ..., z_T) as one vector in R^{2T}.
    Eigen::VectorXd stacked_targets() const;

    // Builds the field with exact distances; eps = 0 picks the default blend
    // width 0.125 * min d_nk.
    static SensorField from_ground_truth(Eigen::Matrix<double, Eigen::Dynamic, 2> sensors,
                                         Eigen::Matrix<double, Eigen::Dynamic, 2> targets,
                                         double region_radius, double eps = 0.0,
                                         bool inner_only = false);

    std::vector<std::string> violations() const;
    void validate() const;  // throws std::invalid_argument
};

// Reference geometries. The pentagon field is the well-posed default: five
// sensors on the unit circle, one target inside. The colinear field puts
// sensors and target on one line — a deliberately degenerate geometry whose
// minimum is flat to second order transverse to the line.
SensorField pentagon_field(bool inner_only = false);
SensorField colinear_field(bool inner_only = false);

// --- Per-agent objective -----------------------------------------------------

// Agent n's cost on R^{2T}, in three radial regimes of rho = |x| / T:
//   rho <  R    : sum_k f(x^k - s_n, d_nk)
//   rho >= R+1  : |x|^2
//   in between  : C^3 blend of the two, weight smoothstep(rho - R)
// With field.inner_only the first formula applies everywhere.
double un_value(const SensorField& field, int n, const Eigen::VectorXd& x);
Eigen::VectorXd un_grad(const SensorField& field, int n, const Eigen::VectorXd& x);

// A bundle of per-agent costs plus what is known about their sum.
struct ObjectiveSet {
    int n_agents = 0;
    int dim = 0;
    std::vector<std::function<double(const Eigen::VectorXd&)>> agent_value;
    std::vector<std::function<Eigen::VectorXd(const Eigen::VectorXd&)>> agent_grad;
    // Known global minimizers of the sum (may be empty).
    std::vector<Eigen::VectorXd> minimizers;
    // Worst relative one-sided derivative mismatch (orders 0..3) across the
    // construction's C^3 seams; null when the construction has none.
    std::function<double()> seam_scan;

    double value(const Eigen::VectorXd& x) const;           // sum over agents
    Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
    std::optional<double> distance_to_minimizer(const Eigen::VectorXd& x) const;
};

ObjectiveSet make_localization(const SensorField& field);
ObjectiveSet make_quadratic(int dim, const Eigen::VectorXd& center, int n_agents = 1);
ObjectiveSet make_double_well(double scale = 1.0, int n_agents = 1);

// --- Seam certification --------------------------------------------------------

// One-sided derivative jets (orders 0..3) compared across every seam of the
// localization construction: the g-kernel seams y in {r/2 - eps, r/2} for
// each (sensor, target) pair, and — unless inner_only — the radial seams
// rho in {R, R+1} along sampled directions.
struct SeamReport {
    struct Entry {
        std::string where;
        int order = 0;
        double left = 0.0;
        double right = 0.0;
        double gap = 0.0;  // relative, hybrid denominator
    };
    double max_rel_gap = 0.0;
    std::vector<Entry> entries;  // worst entry per (seam, order)
};

SeamReport scan_seams(const SensorField& field, int directions = 16, std::uint64_t seed = 0);

}  // namespace danneal
