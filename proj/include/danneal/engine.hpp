#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "danneal/graph.hpp"
#include "danneal/objective.hpp"
#include "danneal/schedules.hpp"

namespace danneal {

// Additive gradient-measurement noise: each agent observes
// grad U_n(x) + zeta with zeta ~ N(0, zeta_sigma^2 I). l1_bound, when given,
// is the declared bound on E|zeta| that the schedule analysis assumes; it is
// carried along for reporting, not enforced here.
struct NoiseModel {
    double zeta_sigma = 0.0;
    std::optional<double> l1_bound;

    std::vector<std::string> violations() const;
    void validate() const;  // throws std::invalid_argument
};

// Where the step weights come from — the annealing schedule, or fixed
// constants for controlled experiments — plus per-term switches. Masking a
// term makes its weight exactly zero, so e.g. a diffusion-only run
// (use_alpha = use_beta = false) never touches the objective or the graph
// weights, and an annealing-off run (use_gamma = false) is fully
// deterministic given the gradient noise.
struct WeightRule {
    std::variant<WeightSchedule, StepWeights> source;
    bool use_alpha = true;
    bool use_beta = true;
    bool use_gamma = true;

    StepWeights at(std::int64_t t) const;
    std::vector<std::string> violations() const;
    void validate() const;
};

// Iterates of all agents at time t; row n is agent n's estimate.
struct NetworkState {
    Eigen::MatrixXd x;
    std::int64_t t = 1;

    int n_agents() const { return static_cast<int>(x.rows()); }
    Eigen::VectorXd average() const { return x.colwise().mean().transpose(); }
    // max_n |x_n - x_avg|
    double disagreement() const;
};

struct DivergenceInfo {
    std::int64_t t = 0;  // time the diverged iterate would have carried
    int agent = 0;
    double state_norm = 0.0;
    // Magnitudes of the three weighted update terms that produced it.
    double consensus_norm = 0.0;
    double innovation_norm = 0.0;
    double annealing_norm = 0.0;
};

class DivergenceError : public std::runtime_error {
  public:
    explicit DivergenceError(const DivergenceInfo& info);
    DivergenceInfo info;
};

// All randomness of one trial, split into independent substreams so the
// draw sequence of one consumer never shifts another's: one stream for graph
// activation, and per-agent streams for gradient noise and annealing noise.
// The normal distributions persist across steps (they generate in pairs).
struct TrialStreams {
    std::mt19937_64 graph;
    std::vector<std::mt19937_64> zeta;
    std::vector<std::mt19937_64> wiener;
    std::vector<std::normal_distribution<double>> zeta_gauss;
    std::vector<std::normal_distribution<double>> wiener_gauss;

    static TrialStreams make(std::uint64_t master_seed, std::uint64_t trial, int n_agents);
};

// Iterates above this norm abort the trial. The 1/t weight on the gradient
// makes the first steps violent (with the reference schedule the transient
// peaks around 1e26 before the strong early contraction pulls it back), so
// the guard is far out; it exists to catch genuine blow-ups, not transients.
inline constexpr double kDefaultDivergenceGuard = 1e100;

// One synchronous update of every agent from the same old state:
//
//   x_n+ = x_n - beta_t * sum_{l in Omega_n} (x_n - x_l)
//              - alpha_t * (grad U_n(x_n) + zeta_n)
//              + gamma_t * w_n
//
// The consensus term is accumulated as per-neighbor differences (not a
// Laplacian product) so it cancels exactly at consensus. Draw order per
// step: graph activation, then per agent zeta (only when zeta_sigma > 0)
// then w (only when gamma != 0). Throws DivergenceError when an updated row
// is non-finite or exceeds `guard`.
NetworkState step(const NetworkState& state, const ObjectiveSet& objective,
                  const GraphModel& graph_model, const WeightRule& rule, const NoiseModel& noise,
                  TrialStreams& streams, double guard = kDefaultDivergenceGuard);

// Same update with the communication graph pinned, for tests that need a
// specific realization.
NetworkState step_with_graph(const NetworkState& state, const ObjectiveSet& objective,
                             const LaplacianSample& graph, const StepWeights& weights,
                             const NoiseModel& noise, TrialStreams& streams,
                             double guard = kDefaultDivergenceGuard);

struct RunConfig {
    ObjectiveSet objective;
    GraphModel graph;
    WeightRule weights;
    NoiseModel noise;
    // One row broadcast to every agent, or one row per agent.
    Eigen::MatrixXd init;
    std::int64_t t_max = 10000;
    std::vector<std::int64_t> checkpoints;
    double divergence_guard = kDefaultDivergenceGuard;
    bool record_trajectory = false;
};

// Network summary at one time step.
struct CheckpointStat {
    std::int64_t t = 0;
    Eigen::VectorXd x_avg;
    double disagreement = 0.0;
    double value_at_avg = 0.0;
    std::optional<double> dist;  // to the nearest known minimizer
};

struct TrialReport {
    int trial = 0;
    std::uint64_t master_seed = 0;
    std::vector<CheckpointStat> checkpoints;
    std::vector<CheckpointStat> trajectory;  // every step, when recorded
    std::optional<DivergenceInfo> divergence;
};

// Runs one trial from t = 1 to t_max, recording requested checkpoints.
// A divergence stops the trial and is reported, not rethrown; checkpoints
// past the stopping time are simply absent.
TrialReport run(const RunConfig& config, std::uint64_t master_seed, int trial_index = 0);

}  // namespace danneal
