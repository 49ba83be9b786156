#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "danneal/engine.hpp"
#include "danneal/gibbs.hpp"
#include "danneal/graph.hpp"
#include "danneal/objective.hpp"
#include "danneal/schedules.hpp"

namespace danneal {

// The convergence analysis rests on tail and regularity conditions that are
// stated as sups/infs over all of R^d. These checks turn each one into a
// sampled witness: spheres of growing radius, trend analysis, deterministic
// given the seed. A Pass is evidence, not proof; a Fail carries the witness
// that broke it.

enum class CheckStatus { Pass, Fail, Inconclusive };

const char* to_string(CheckStatus status);

struct Witness {
    std::string key;
    double value = 0.0;
};

struct CheckResult {
    std::string name;
    CheckStatus status = CheckStatus::Inconclusive;
    std::vector<Witness> witnesses;
    std::string note;

    const Witness* find(const std::string& key) const;
};

// "lipschitz-gradient": largest sampled gradient difference quotient
// max_n sup |grad U_n(x) - grad U_n(x')| / |x - x'| over the ball (or the
// annulus min_radius <= |x| <= region_radius). Pass needs the estimate finite
// and stable when the sample count doubles (< 10% growth).
CheckResult check_lipschitz(const ObjectiveSet& objective, double region_radius, int samples,
                            std::uint64_t seed = 0, double min_radius = 0.0);

// "gradient-dissimilarity": per radius rho, sampled sup over |x| <= rho and
// agents of |grad U_n(x) - grad U(x)| (literal bounded-dissimilarity form),
// with the sup against the average gradient (1/N) grad U reported alongside.
// Pass if the profile flattens, Fail if it grows cleanly linearly,
// Inconclusive otherwise.
CheckResult check_dissimilarity(const ObjectiveSet& objective, const std::vector<double>& radii,
                                int samples, std::uint64_t seed = 0);

// "coercivity": min over sphere samples of U and |grad U| strictly increasing
// along the radii, plus min U ~ 0 at the known minimizers (coarse inner grid
// when none are known).
CheckResult check_coercivity(const ObjectiveSet& objective, const std::vector<double>& radii,
                             int directions, std::uint64_t seed = 0);

// "laplacian-gap": sampled inf of |grad U(x)|^2 - laplacian U(x), the
// quantity that must stay bounded below. Dense scan over the inner box for
// dim <= 2 (deterministic), random annuli further out; the laplacian comes
// from central differences of the analytic gradient. Pass when the outermost
// annulus sits above the global minimum (no downward tail).
CheckResult check_laplacian_gap(const ObjectiveSet& objective, const std::vector<double>& radii,
                                int samples, std::uint64_t seed = 0);

// sqrt((4d-4)/(4d-3)): the required asymptotic cosine between grad U and the
// radial direction; 0 in dimension 1, ~0.894 in dimension 2.
double alignment_floor(int dim);

// "radial-alignment": min over sphere samples of <grad U/|grad U|, x/|x|>
// per radius; pass iff it clears alignment_floor(dim) - 0.01 at the two
// largest radii.
CheckResult check_radial_alignment(const ObjectiveSet& objective, const std::vector<double>& radii,
                                   int directions, std::uint64_t seed = 0);

// "growth-lower" / "growth-upper": min and max of |grad U(x)|/|x| over
// sphere samples per radius. The lower profile must stay bounded away from
// zero, the upper must stabilize instead of growing (a quartic tail fails
// it).
std::pair<CheckResult, CheckResult> check_growth(const ObjectiveSet& objective,
                                                 const std::vector<double>& radii, int directions,
                                                 std::uint64_t seed = 0);

// "sensor-geometry": (i) at least 3 pairwise-distinct sensors; (ii) for every
// target some sensor pair spans a genuinely nonzero triangle with it
// (normalized cross product above 1e-9). A colinear layout fails (ii) and
// with it the uniqueness of the minimum.
CheckResult check_colinearity(const SensorField& field);

// "connectivity-mean": lambda_2 of the mean Laplacian > 0. A single agent
// passes trivially (nothing to gossip).
CheckResult check_connectivity(const GraphModel& model);

// "schedule": weight-sequence admissibility; when no lower bound for
// c_gamma^2/c_alpha is configured the ratio is reported but unverified.
CheckResult check_schedule(const WeightSchedule& schedule);

struct SuiteParams {
    double region_radius = 2.0;        // inner sampling region for lipschitz/laplacian
    std::vector<double> radii = {8.0, 16.0, 32.0, 64.0};
    int samples = 2000;
    int directions = 64;
    std::uint64_t seed = 0;
};

struct AssumptionReport {
    std::vector<CheckResult> entries;

    const CheckResult* find(const std::string& name) const;
    // True when a condition the convergence argument cannot survive failed:
    // coercivity, laplacian-gap, radial-alignment, growth bounds, mean
    // connectivity, sensor geometry, or the minimum certificate.
    bool hard_fail() const;
};

// Runs every check that applies: the objective checks always; the geometry
// check when a field is given; connectivity when a graph is given; schedule
// admissibility when a schedule is given; and the minimum certificate
// (certify_minimum_set) when the objective knows its minimizers. Checks are
// independent and run concurrently; the report order is fixed.
AssumptionReport run_all_checks(const ObjectiveSet& objective, const SensorField* field,
                                const GraphModel* graph, const WeightSchedule* schedule,
                                const SuiteParams& params = {});

}  // namespace danneal
