#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "danneal/engine.hpp"
#include "danneal/graph.hpp"
#include "danneal/objective.hpp"
#include "danneal/rng.hpp"
#include "danneal/schedules.hpp"

using namespace danneal;

namespace {

GraphModel fixed_model(Eigen::MatrixXi adjacency) {
    GraphModel m;
    m.base_adjacency = std::move(adjacency);
    return m;
}

WeightRule constant_weights(double alpha, double beta, double gamma) {
    WeightRule rule;
    rule.source = StepWeights{alpha, beta, gamma};
    rule.use_gamma = gamma != 0.0;
    return rule;
}

}  // namespace

TEST_CASE("weight rule masks and sources") {
    WeightRule rule;  // default: the annealing schedule, all terms on
    const WeightSchedule sched;
    CHECK(rule.at(1).alpha == sched.at(1).alpha);
    CHECK(rule.at(17).beta == sched.at(17).beta);
    CHECK(rule.at(17).gamma == sched.at(17).gamma);

    rule.use_alpha = false;
    rule.use_gamma = false;
    CHECK(rule.at(17).alpha == 0.0);
    CHECK(rule.at(17).beta == sched.at(17).beta);
    CHECK(rule.at(17).gamma == 0.0);

    WeightRule fixed = constant_weights(0.125, 0.25, 0.0);
    CHECK(fixed.at(1).alpha == 0.125);
    CHECK(fixed.at(100000).alpha == 0.125);  // constants do not decay
    CHECK(fixed.at(1).gamma == 0.0);
    CHECK_THROWS_AS(fixed.at(0), std::domain_error);
}

TEST_CASE("weight rule and noise model validation") {
    WeightRule bad = constant_weights(-1.0, 0.0, 0.0);
    auto v = bad.violations();
    REQUIRE(v.size() == 1);
    CHECK(v[0] == "fixed alpha must be finite and nonnegative");
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    WeightRule sched;
    std::get<WeightSchedule>(sched.source).c_beta = -1.0;
    CHECK_FALSE(sched.violations().empty());  // delegates to the schedule

    NoiseModel noise;
    CHECK(noise.violations().empty());
    noise.zeta_sigma = -0.5;
    noise.l1_bound = 0.0;
    v = noise.violations();
    REQUIRE(v.size() == 2);
    CHECK(v[0] == "zeta_sigma must be finite and nonnegative");
    CHECK(v[1] == "l1_bound must be positive when given");
}

TEST_CASE("network state summaries") {
    NetworkState state;
    state.x.resize(2, 2);
    state.x << 1.0, 1.0, 3.0, 5.0;
    CHECK(state.n_agents() == 2);
    CHECK(state.average() == Eigen::Vector2d(2.0, 3.0));
    CHECK(state.disagreement() == std::sqrt(5.0));
}

TEST_CASE("one synchronous step, by hand") {
    // Two agents on one edge, quadratic costs |x|^2, dyadic weights so the
    // arithmetic is exact:
    //   x0+ = 1 - 0.25*(1-3) - 0.125*2*1 = 1.25
    //   x1+ = 3 - 0.25*(3-1) - 0.125*2*3 = 1.75
    // A sequential (Gauss-Seidel) update would give x1+ = 1.8125 instead:
    // the equality below pins the update to the old state.
    const ObjectiveSet objective = make_quadratic(1, Eigen::VectorXd::Zero(1), 2);
    const GraphModel graph = fixed_model(path_adjacency(2));
    const WeightRule rule = constant_weights(0.125, 0.25, 0.0);
    TrialStreams streams = TrialStreams::make(1, 0, 2);

    NetworkState state;
    state.t = 1;
    state.x.resize(2, 1);
    state.x << 1.0, 3.0;

    const NetworkState next = step(state, objective, graph, rule, NoiseModel{}, streams);
    CHECK(next.t == 2);
    CHECK(next.x(0, 0) == 1.25);
    CHECK(next.x(1, 0) == 1.75);
}

TEST_CASE("step validates shapes") {
    const ObjectiveSet objective = make_quadratic(1, Eigen::VectorXd::Zero(1), 2);
    const WeightRule rule = constant_weights(0.125, 0.25, 0.0);
    TrialStreams streams = TrialStreams::make(1, 0, 3);
    NetworkState state;
    state.x = Eigen::MatrixXd::Zero(3, 1);
    CHECK_THROWS_WITH_AS(
        step(state, objective, fixed_model(ring_adjacency(3)), rule, NoiseModel{}, streams),
        doctest::Contains("disagree on the agent count"), std::invalid_argument);

    NetworkState wide;
    wide.x = Eigen::MatrixXd::Zero(2, 3);
    CHECK_THROWS_WITH_AS(
        step(wide, objective, fixed_model(path_adjacency(2)), rule, NoiseModel{}, streams),
        doctest::Contains("dimension does not match"), std::invalid_argument);
}

TEST_CASE("consensus term cancels at agreement and preserves the mean") {
    const ObjectiveSet objective = make_quadratic(1, Eigen::VectorXd::Zero(1), 5);
    const GraphModel graph = fixed_model(ring_adjacency(5));
    WeightRule rule = constant_weights(0.0, 0.3, 0.0);
    rule.use_alpha = false;
    TrialStreams streams = TrialStreams::make(3, 0, 5);

    NetworkState state;
    state.t = 1;
    state.x.resize(5, 1);
    state.x << 0.0, 1.0, 2.0, 3.0, 4.0;

    for (int i = 0; i < 200; ++i) {
        state = step(state, objective, graph, rule, NoiseModel{}, streams);
        // each edge contributes (x_n - x_l) to n and its negation to l
        CHECK(std::abs(state.average()(0) - 2.0) < 1e-12);
    }
    CHECK(state.disagreement() < 1e-10);

    // at exact consensus the per-neighbor differences vanish identically
    NetworkState agreed;
    agreed.t = 1;
    agreed.x = Eigen::MatrixXd::Constant(5, 1, 0.7);
    const NetworkState after = step(agreed, objective, graph, rule, NoiseModel{}, streams);
    CHECK(after.x == agreed.x);
}

TEST_CASE("iterates past the guard raise a divergence report") {
    // alpha = 10 on |x|^2 maps x to -19x: geometric blow-up
    const ObjectiveSet objective = make_quadratic(1, Eigen::VectorXd::Zero(1), 1);
    const GraphModel graph = fixed_model(Eigen::MatrixXi::Zero(1, 1));
    const WeightRule rule = constant_weights(10.0, 0.0, 0.0);
    TrialStreams streams = TrialStreams::make(1, 0, 1);

    NetworkState state;
    state.t = 1;
    state.x = Eigen::MatrixXd::Constant(1, 1, 2.0);
    CHECK_THROWS_WITH_AS(
        step(state, objective, graph, rule, NoiseModel{}, streams, /*guard=*/5.0),
        doctest::Contains("iterate diverged at t = 2"), DivergenceError);

    try {
        step(state, objective, graph, rule, NoiseModel{}, streams, 5.0);
    } catch (const DivergenceError& err) {
        CHECK(err.info.agent == 0);
        CHECK(err.info.state_norm == 38.0);
        CHECK(err.info.innovation_norm == 40.0);
        CHECK(err.info.consensus_norm == 0.0);
        CHECK(err.info.annealing_norm == 0.0);
    }
}

TEST_CASE("non-finite iterates are caught regardless of the guard") {
    ObjectiveSet broken;
    broken.n_agents = 1;
    broken.dim = 1;
    broken.agent_value.emplace_back([](const Eigen::VectorXd&) { return 0.0; });
    broken.agent_grad.emplace_back([](const Eigen::VectorXd&) {
        return Eigen::VectorXd::Constant(1, std::numeric_limits<double>::quiet_NaN()).eval();
    });
    const GraphModel graph = fixed_model(Eigen::MatrixXi::Zero(1, 1));
    TrialStreams streams = TrialStreams::make(1, 0, 1);
    NetworkState state;
    state.x = Eigen::MatrixXd::Zero(1, 1);
    CHECK_THROWS_AS(step(state, broken, graph, constant_weights(1.0, 0.0, 0.0), NoiseModel{},
                         streams, std::numeric_limits<double>::infinity()),
                    DivergenceError);
}

TEST_CASE("full trial records checkpoints at the requested times") {
    RunConfig config;
    config.objective = make_localization(pentagon_field(true));
    config.graph = fixed_model(ring_adjacency(5));
    config.init = Eigen::RowVector2d(-0.5, 1.0);
    config.t_max = 300;
    config.checkpoints = {1, 7, 300};

    const TrialReport report = run(config, 7, 0);
    CHECK_FALSE(report.divergence.has_value());
    REQUIRE(report.checkpoints.size() == 3);
    CHECK(report.checkpoints[0].t == 1);
    CHECK(report.checkpoints[1].t == 7);
    CHECK(report.checkpoints[2].t == 300);

    // t = 1 is the broadcast start: zero spread, known distance
    const CheckpointStat& first = report.checkpoints[0];
    CHECK(first.disagreement == 0.0);
    CHECK(first.x_avg == Eigen::Vector2d(-0.5, 1.0));
    REQUIRE(first.dist.has_value());
    CHECK(*first.dist == (Eigen::Vector2d(-0.5, 1.0) - Eigen::Vector2d(0.25, 0.35)).norm());
    CHECK(first.value_at_avg == config.objective.value(first.x_avg));

    // trajectory off by default
    CHECK(report.trajectory.empty());
    CHECK(report.trial == 0);
    CHECK(report.master_seed == 7);
}

TEST_CASE("trajectory recording covers every step") {
    RunConfig config;
    config.objective = make_quadratic(1, Eigen::VectorXd::Zero(1), 1);
    config.graph = fixed_model(Eigen::MatrixXi::Zero(1, 1));
    config.init = Eigen::MatrixXd::Constant(1, 1, 0.5);
    config.t_max = 50;
    config.record_trajectory = true;

    const TrialReport report = run(config, 11, 0);
    REQUIRE(report.trajectory.size() == 50);
    for (int i = 0; i < 50; ++i) CHECK(report.trajectory[i].t == i + 1);
}

TEST_CASE("trial validation") {
    RunConfig config;
    config.objective = make_quadratic(2, Eigen::Vector2d::Zero(), 3);
    config.graph = fixed_model(ring_adjacency(3));
    config.init = Eigen::RowVector2d(1.0, 1.0);

    RunConfig bad = config;
    bad.graph = fixed_model(ring_adjacency(4));
    CHECK_THROWS_WITH_AS(run(bad, 1), doctest::Contains("disagree on the agent count"),
                         std::invalid_argument);

    bad = config;
    bad.init = Eigen::MatrixXd::Zero(2, 2);  // neither 1 row nor n_agents rows
    CHECK_THROWS_WITH_AS(run(bad, 1), doctest::Contains("init must be 1 x dim"),
                         std::invalid_argument);

    bad = config;
    bad.checkpoints = {0};
    CHECK_THROWS_WITH_AS(run(bad, 1), doctest::Contains("checkpoints must lie in [1, t_max]"),
                         std::invalid_argument);
    bad.checkpoints = {20000};
    CHECK_THROWS_AS(run(bad, 1), std::invalid_argument);

    bad = config;
    bad.t_max = 0;
    CHECK_THROWS_AS(run(bad, 1), std::invalid_argument);
}

TEST_CASE("a diverging trial is reported, not rethrown") {
    RunConfig config;
    config.objective = make_quadratic(1, Eigen::VectorXd::Zero(1), 1);
    config.graph = fixed_model(Eigen::MatrixXi::Zero(1, 1));
    config.weights = constant_weights(10.0, 0.0, 0.0);
    config.init = Eigen::MatrixXd::Constant(1, 1, 1.0);
    config.t_max = 200;
    config.checkpoints = {1, 10, 200};

    const TrialReport report = run(config, 1, 0);
    REQUIRE(report.divergence.has_value());
    CHECK(report.divergence->state_norm > 1e100);
    // 19^k crosses 1e100 near k = 79, so t = 200 is never reached
    CHECK(report.divergence->t < 100);
    CHECK(report.divergence->t > 70);
    REQUIRE(report.checkpoints.size() == 2);  // t = 1 and t = 10 only
    CHECK(report.checkpoints[1].t == 10);
}

TEST_CASE("trials are reproducible and decorrelated") {
    RunConfig config;
    config.objective = make_localization(pentagon_field(true));
    config.graph = fixed_model(ring_adjacency(5));
    config.init = Eigen::RowVector2d(-0.5, 1.0);
    config.t_max = 300;
    config.checkpoints = {300};

    const TrialReport a = run(config, 7, 3);
    const TrialReport b = run(config, 7, 3);
    REQUIRE(a.checkpoints.size() == 1);
    REQUIRE(b.checkpoints.size() == 1);
    CHECK(a.checkpoints[0].x_avg == b.checkpoints[0].x_avg);
    CHECK(a.checkpoints[0].disagreement == b.checkpoints[0].disagreement);

    const TrialReport c = run(config, 7, 4);  // sibling trial
    CHECK(a.checkpoints[0].x_avg != c.checkpoints[0].x_avg);
    const TrialReport d = run(config, 8, 3);  // different master seed
    CHECK(a.checkpoints[0].x_avg != d.checkpoints[0].x_avg);
}

TEST_CASE("annealing-only dynamics replay from the per-agent stream") {
    // With consensus and innovations masked, the iterate is the pure weighted
    // random walk x_{t+1} = x_t + gamma_t w_t; replaying the agent's stream by
    // hand must reproduce the trial bitwise.
    RunConfig config;
    config.objective = make_quadratic(1, Eigen::VectorXd::Zero(1), 1);
    config.graph = fixed_model(Eigen::MatrixXi::Zero(1, 1));
    config.weights.use_alpha = false;
    config.weights.use_beta = false;
    config.init = Eigen::MatrixXd::Constant(1, 1, 0.5);
    config.t_max = 500;
    config.record_trajectory = true;

    const TrialReport report = run(config, 9, 2);
    REQUIRE(report.trajectory.size() == 500);

    const WeightSchedule sched;
    TrialStreams streams = TrialStreams::make(9, 2, 1);
    double x = 0.5;
    for (std::int64_t t = 1; t < 500; ++t) {
        x += sched.at(t).gamma * streams.wiener_gauss[0](streams.wiener[0]);
        CHECK(report.trajectory[t].x_avg(0) == x);
    }
}

TEST_CASE("gradient noise perturbs the innovation term only when present") {
    RunConfig config;
    config.objective = make_quadratic(1, Eigen::VectorXd::Zero(1), 1);
    config.graph = fixed_model(Eigen::MatrixXi::Zero(1, 1));
    config.weights = constant_weights(0.05, 0.0, 0.0);
    config.init = Eigen::MatrixXd::Constant(1, 1, 1.0);
    config.t_max = 100;
    config.checkpoints = {100};

    const TrialReport clean = run(config, 5, 0);
    config.noise.zeta_sigma = 0.5;
    const TrialReport noisy = run(config, 5, 0);
    CHECK(clean.checkpoints[0].x_avg != noisy.checkpoints[0].x_avg);
    // the deterministic contraction (1 - 2*0.05)^99 from x = 1
    CHECK(clean.checkpoints[0].x_avg(0) == doctest::Approx(std::pow(0.9, 99)).epsilon(1e-12));
}

TEST_CASE("trial streams require at least one agent") {
    CHECK_THROWS_AS(TrialStreams::make(1, 0, 0), std::invalid_argument);
}
