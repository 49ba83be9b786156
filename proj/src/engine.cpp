#include "danneal/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "danneal/rng.hpp"

namespace danneal {

// --- NoiseModel ---------------------------------------------------------------

std::vector<std::string> NoiseModel::violations() const {
    std::vector<std::string> v;
    if (!(zeta_sigma >= 0.0) || !std::isfinite(zeta_sigma)) {
        v.push_back("zeta_sigma must be finite and nonnegative");
    }
    if (l1_bound && !(*l1_bound > 0.0)) v.push_back("l1_bound must be positive when given");
    return v;
}

void NoiseModel::validate() const {
    const auto v = violations();
    if (v.empty()) return;
    std::ostringstream msg;
    msg << "invalid noise model:";
    for (const auto& s : v) msg << " [" << s << "]";
    throw std::invalid_argument(msg.str());
}

// --- WeightRule ---------------------------------------------------------------

StepWeights WeightRule::at(std::int64_t t) const {
    if (t < 1) throw std::domain_error("weights start at t = 1");
    StepWeights w = std::holds_alternative<WeightSchedule>(source)
                        ? std::get<WeightSchedule>(source).at(t)
                        : std::get<StepWeights>(source);
    if (!use_alpha) w.alpha = 0.0;
    if (!use_beta) w.beta = 0.0;
    if (!use_gamma) w.gamma = 0.0;
    return w;
}

std::vector<std::string> WeightRule::violations() const {
    if (std::holds_alternative<WeightSchedule>(source)) {
        return std::get<WeightSchedule>(source).violations();
    }
    const auto& w = std::get<StepWeights>(source);
    std::vector<std::string> v;
    const std::pair<double, const char*> entries[] = {
        {w.alpha, "alpha"}, {w.beta, "beta"}, {w.gamma, "gamma"}};
    for (const auto& [value, name] : entries) {
        if (!std::isfinite(value) || value < 0.0) {
            v.push_back(std::string("fixed ") + name + " must be finite and nonnegative");
        }
    }
    return v;
}

void WeightRule::validate() const {
    const auto v = violations();
    if (v.empty()) return;
    std::ostringstream msg;
    msg << "invalid weight rule:";
    for (const auto& s : v) msg << " [" << s << "]";
    throw std::invalid_argument(msg.str());
}

// --- NetworkState --------------------------------------------------------------

double NetworkState::disagreement() const {
    const Eigen::RowVectorXd avg = x.colwise().mean();
    double worst = 0.0;
    for (Eigen::Index n = 0; n < x.rows(); ++n) {
        worst = std::max(worst, (x.row(n) - avg).norm());
    }
    return worst;
}

// --- Divergence ----------------------------------------------------------------

namespace {

std::string divergence_message(const DivergenceInfo& info) {
    std::ostringstream msg;
    msg << "iterate diverged at t = " << info.t << ", agent " << info.agent
        << ": |x| = " << info.state_norm << " (consensus " << info.consensus_norm
        << ", innovation " << info.innovation_norm << ", annealing " << info.annealing_norm
        << ")";
    return msg.str();
}

}  // namespace

DivergenceError::DivergenceError(const DivergenceInfo& info_)
    : std::runtime_error(divergence_message(info_)), info(info_) {}

// --- TrialStreams ----------------------------------------------------------------

TrialStreams TrialStreams::make(std::uint64_t master_seed, std::uint64_t trial, int n_agents) {
    if (n_agents < 1) throw std::invalid_argument("need at least one agent");
    TrialStreams s;
    s.graph = substream(master_seed, trial, kStreamGraph);
    s.zeta.reserve(n_agents);
    s.wiener.reserve(n_agents);
    for (int n = 0; n < n_agents; ++n) {
        s.zeta.push_back(substream(master_seed, trial, kStreamGradientNoise, n));
        s.wiener.push_back(substream(master_seed, trial, kStreamAnnealing, n));
    }
    s.zeta_gauss.resize(n_agents);
    s.wiener_gauss.resize(n_agents);
    return s;
}

// --- Step ------------------------------------------------------------------------

namespace {

Eigen::VectorXd draw_gauss(std::mt19937_64& rng, std::normal_distribution<double>& dist,
                           Eigen::Index d) {
    Eigen::VectorXd v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = dist(rng);
    return v;
}

}  // namespace

NetworkState step(const NetworkState& state, const ObjectiveSet& objective,
                  const GraphModel& graph_model, const WeightRule& rule, const NoiseModel& noise,
                  TrialStreams& streams, double guard) {
    const LaplacianSample lap = sample(graph_model, streams.graph);
    return step_with_graph(state, objective, lap, rule.at(state.t), noise, streams, guard);
}

NetworkState step_with_graph(const NetworkState& state, const ObjectiveSet& objective,
                             const LaplacianSample& graph, const StepWeights& weights,
                             const NoiseModel& noise, TrialStreams& streams, double guard) {
    const int n_agents = state.n_agents();
    const Eigen::Index dim = state.x.cols();
    if (objective.n_agents != n_agents || graph.n_agents() != n_agents) {
        throw std::invalid_argument("state, objective, and graph disagree on the agent count");
    }
    if (objective.dim != dim) {
        throw std::invalid_argument("state dimension does not match the objective");
    }
    if (static_cast<int>(streams.zeta.size()) < n_agents ||
        static_cast<int>(streams.wiener.size()) < n_agents) {
        throw std::invalid_argument("trial streams were made for fewer agents");
    }

    NetworkState next;
    next.x.resize(n_agents, dim);
    next.t = state.t + 1;

    for (int n = 0; n < n_agents; ++n) {
        Eigen::VectorXd consensus = Eigen::VectorXd::Zero(dim);
        if (weights.beta != 0.0) {
            // Per-neighbor differences so the terms cancel exactly at consensus.
            for (const int l : neighbors(graph, n)) {
                consensus += (state.x.row(n) - state.x.row(l)).transpose();
            }
        }

        Eigen::VectorXd innovation = Eigen::VectorXd::Zero(dim);
        if (weights.alpha != 0.0) {
            innovation = objective.agent_grad[n](state.x.row(n).transpose());
            if (noise.zeta_sigma > 0.0) {
                innovation +=
                    noise.zeta_sigma * draw_gauss(streams.zeta[n], streams.zeta_gauss[n], dim);
            }
        }

        Eigen::VectorXd annealing = Eigen::VectorXd::Zero(dim);
        if (weights.gamma != 0.0) {
            annealing = draw_gauss(streams.wiener[n], streams.wiener_gauss[n], dim);
        }

        next.x.row(n) = state.x.row(n) - weights.beta * consensus.transpose() -
                        weights.alpha * innovation.transpose() +
                        weights.gamma * annealing.transpose();

        if (!next.x.row(n).allFinite() || next.x.row(n).norm() > guard) {
            DivergenceInfo info;
            info.t = next.t;
            info.agent = n;
            info.state_norm = next.x.row(n).norm();
            info.consensus_norm = weights.beta * consensus.norm();
            info.innovation_norm = weights.alpha * innovation.norm();
            info.annealing_norm = weights.gamma * annealing.norm();
            throw DivergenceError(info);
        }
    }
    return next;
}

// --- Run ---------------------------------------------------------------------------

namespace {

CheckpointStat stats_of(const NetworkState& state, const ObjectiveSet& objective) {
    CheckpointStat s;
    s.t = state.t;
    s.x_avg = state.average();
    s.disagreement = state.disagreement();
    s.value_at_avg = objective.value(s.x_avg);
    s.dist = objective.distance_to_minimizer(s.x_avg);
    return s;
}

}  // namespace

TrialReport run(const RunConfig& config, std::uint64_t master_seed, int trial_index) {
    config.graph.validate();
    config.weights.validate();
    config.noise.validate();
    const int n_agents = config.objective.n_agents;
    const Eigen::Index dim = config.objective.dim;
    if (n_agents < 1 || dim < 1) throw std::invalid_argument("objective is empty");
    if (config.graph.n_agents() != n_agents) {
        throw std::invalid_argument("objective and graph disagree on the agent count");
    }
    if (config.init.cols() != dim || (config.init.rows() != 1 && config.init.rows() != n_agents)) {
        throw std::invalid_argument("init must be 1 x dim (broadcast) or n_agents x dim");
    }
    if (config.t_max < 1) throw std::invalid_argument("t_max must be at least 1");
    std::vector<std::int64_t> marks = config.checkpoints;
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
    if (!marks.empty() && (marks.front() < 1 || marks.back() > config.t_max)) {
        throw std::invalid_argument("checkpoints must lie in [1, t_max]");
    }

    NetworkState state;
    state.t = 1;
    if (config.init.rows() == 1) {
        state.x = config.init.replicate(n_agents, 1);
    } else {
        state.x = config.init;
    }

    TrialStreams streams = TrialStreams::make(master_seed, trial_index, n_agents);

    TrialReport report;
    report.trial = trial_index;
    report.master_seed = master_seed;

    auto next_mark = marks.cbegin();
    auto record = [&](const NetworkState& s) {
        CheckpointStat stat = stats_of(s, config.objective);
        if (config.record_trajectory) report.trajectory.push_back(stat);
        if (next_mark != marks.cend() && *next_mark == s.t) {
            report.checkpoints.push_back(std::move(stat));
            ++next_mark;
        }
    };

    record(state);
    for (std::int64_t t = 1; t < config.t_max; ++t) {
        try {
            state = step(state, config.objective, config.graph, config.weights, config.noise,
                         streams, config.divergence_guard);
        } catch (const DivergenceError& err) {
            report.divergence = err.info;
            break;
        }
        record(state);
    }
    return report;
}

}  // namespace danneal
