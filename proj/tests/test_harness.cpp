#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "danneal/harness.hpp"
#include "danneal/objective.hpp"

using namespace danneal;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, sep)) out.push_back(item);
    return out;
}

// One agent contracting x -> 0.75 x from x = 1 with no randomness: the
// distances at t = 1..4 are exactly 1, 0.75, 0.5625, 0.421875.
ExperimentConfig contraction_config() {
    ExperimentConfig config;
    config.run.objective = make_quadratic(1, Eigen::VectorXd::Zero(1), 1);
    config.run.graph.base_adjacency = Eigen::MatrixXi::Zero(1, 1);
    config.run.weights.source = StepWeights{0.125, 0.0, 0.0};
    config.run.weights.use_gamma = false;
    config.run.init = Eigen::MatrixXd::Constant(1, 1, 1.0);
    config.run.t_max = 4;
    config.run.checkpoints = {1, 2, 3, 4};
    config.n_trials = 3;
    config.radii = {0.75, 1.0};
    return config;
}

CheckpointStat stat_at(std::int64_t t, double x, double disagreement, double value,
                       std::optional<double> dist) {
    CheckpointStat s;
    s.t = t;
    s.x_avg = Eigen::VectorXd::Constant(1, x);
    s.disagreement = disagreement;
    s.value_at_avg = value;
    s.dist = dist;
    return s;
}

}  // namespace

TEST_CASE("ball-hit counts use strict containment at exact checkpoints") {
    const ExperimentResult result = run_experiment(contraction_config(), 7);
    CHECK(result.n_diverged == 0);
    CHECK(result.reports.size() == 3);
    REQUIRE(result.table.has_value());
    const BallHitTable& table = *result.table;
    REQUIRE(table.radii == std::vector<double>{0.75, 1.0});
    REQUIRE(table.checkpoints == std::vector<std::int64_t>{1, 2, 3, 4});

    // dist = 0.75 at t = 2 must NOT count for radius 0.75: containment is strict
    Eigen::MatrixXi expected(2, 4);
    expected << 0, 0, 3, 3, 0, 3, 3, 3;
    CHECK(table.counts == expected);
    CHECK(table.monotone_in_radius());

    CHECK(table_csv(table) == "radius,1,2,3,4\n0.75,0,0,3,3\n1,0,3,3,3\n");
}

TEST_CASE("summary statistics of the deterministic contraction") {
    const ExperimentResult result = run_experiment(contraction_config(), 7);
    const std::string csv = summary_csv(result.reports);
    const auto lines = split(csv, '\n');
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] ==
          "t,n,n_diverged,dist_mean,dist_median,dist_p10,dist_p90,"
          "disagreement_mean,disagreement_median,disagreement_p10,disagreement_p90,"
          "value_mean,value_median,value_p10,value_p90");
    CHECK(lines[1] == "1,3,0,1,1,1,1,0,0,0,0,1,1,1,1");
    CHECK(lines[2] == "2,3,0,0.75,0.75,0.75,0.75,0,0,0,0,0.5625,0.5625,0.5625,0.5625");
    CHECK(lines[3] == "3,3,0,0.5625,0.5625,0.5625,0.5625,0,0,0,0,"
                      "0.31640625,0.31640625,0.31640625,0.31640625");
    CHECK(lines[4] == "4,3,0,0.421875,0.421875,0.421875,0.421875,0,0,0,0,"
                      "0.177978515625,0.177978515625,0.177978515625,0.177978515625");
}

TEST_CASE("experiments are identical for every thread count") {
    ExperimentConfig config = contraction_config();
    config.run.objective = make_localization(pentagon_field(true));
    config.run.graph.base_adjacency = ring_adjacency(5);
    config.run.weights = WeightRule{};  // the annealing schedule, randomness on
    config.run.init = Eigen::RowVector2d(-0.5, 1.0);
    config.run.t_max = 200;
    config.run.checkpoints = {100, 200};
    config.n_trials = 12;
    config.radii = {0.1, 0.25, 0.5};
    config.trajectory_trials = {3};

    const ExperimentResult serial = run_experiment(config, 7, 1);
    const ExperimentResult parallel = run_experiment(config, 7, 4);
    REQUIRE(serial.table.has_value());
    REQUIRE(parallel.table.has_value());
    CHECK(serial.table->counts == parallel.table->counts);
    CHECK(summary_csv(serial.reports) == summary_csv(parallel.reports));
    CHECK(trajectory_csv(serial.reports[3], 10) == trajectory_csv(parallel.reports[3], 10));
    CHECK(serial.table->monotone_in_radius());

    // only the requested trial keeps its path
    CHECK(serial.reports[3].trajectory.size() == 200);
    CHECK(serial.reports[0].trajectory.empty());

    // trial i of the experiment is exactly engine run trial i
    RunConfig solo = config.run;
    solo.record_trajectory = false;
    const TrialReport direct = run(solo, 7, 5);
    REQUIRE(direct.checkpoints.size() == 2);
    CHECK(direct.checkpoints[1].x_avg == serial.reports[5].checkpoints[1].x_avg);
    CHECK(direct.checkpoints[1].disagreement == serial.reports[5].checkpoints[1].disagreement);
}

TEST_CASE("unsorted or duplicated checkpoint requests land in sorted columns") {
    ExperimentConfig config = contraction_config();
    config.run.checkpoints = {3, 1, 3, 2};
    const ExperimentResult result = run_experiment(config, 7);
    REQUIRE(result.table.has_value());
    CHECK(result.table->checkpoints == std::vector<std::int64_t>{1, 2, 3});
    Eigen::MatrixXi expected(2, 3);
    expected << 0, 0, 3, 0, 3, 3;
    CHECK(result.table->counts == expected);
}

TEST_CASE("a minimizer-free objective yields no table but full summaries") {
    ExperimentConfig config = contraction_config();
    config.run.objective.minimizers.clear();
    const ExperimentResult result = run_experiment(config, 7);
    CHECK_FALSE(result.table.has_value());
    // distance columns go NaN; the rest is intact
    const auto lines = split(summary_csv(result.reports), '\n');
    CHECK(lines[1] == "1,3,0,nan,nan,nan,nan,0,0,0,0,1,1,1,1");
}

TEST_CASE("diverged trials are excluded from counts and flagged per checkpoint") {
    // Annealing-only random walk against a tight guard: some trials blow
    // past it, others never do — split depends only on the master seed.
    ExperimentConfig config;
    config.run.objective = make_quadratic(1, Eigen::VectorXd::Zero(1), 1);
    config.run.graph.base_adjacency = Eigen::MatrixXi::Zero(1, 1);
    config.run.weights.use_alpha = false;
    config.run.weights.use_beta = false;
    config.run.init = Eigen::MatrixXd::Constant(1, 1, 0.5);
    config.run.t_max = 100;
    config.run.checkpoints = {1, 100};
    config.run.divergence_guard = 2.0;
    config.n_trials = 12;
    config.radii = {0.5};

    const ExperimentResult result = run_experiment(config, 7);
    CHECK(result.n_diverged > 0);
    CHECK(result.n_diverged < 12);

    const auto lines = split(summary_csv(result.reports), '\n');
    REQUIRE(lines.size() >= 3);  // header, t = 1, t = 100
    const auto last = split(lines.back(), ',');
    CHECK(last[0] == "100");
    CHECK(last[1] == std::to_string(12 - result.n_diverged));
    CHECK(last[2] == std::to_string(result.n_diverged));

    // survivors only: no column may exceed the non-diverged population
    REQUIRE(result.table.has_value());
    CHECK(result.table->counts.maxCoeff() <= 12 - result.n_diverged);
}

TEST_CASE("experiment validation") {
    ExperimentConfig config = contraction_config();
    config.n_trials = 0;
    CHECK_THROWS_AS(run_experiment(config, 7), std::invalid_argument);

    config = contraction_config();
    config.radii = {0.5, 0.25};
    CHECK_THROWS_AS(run_experiment(config, 7), std::invalid_argument);
    config.radii = {0.0, 0.25};
    CHECK_THROWS_AS(run_experiment(config, 7), std::invalid_argument);

    config = contraction_config();
    config.trajectory_trials = {3};  // n_trials is 3: valid indices are 0..2
    CHECK_THROWS_AS(run_experiment(config, 7), std::invalid_argument);

    // a validation error inside a worker surfaces on the calling thread
    config = contraction_config();
    config.run.t_max = 0;
    CHECK_THROWS_AS(run_experiment(config, 7, 4), std::invalid_argument);
}

TEST_CASE("trajectory csv strides and always lands on the endpoint") {
    TrialReport report;
    for (int t = 1; t <= 10; ++t) {
        report.trajectory.push_back(
            stat_at(t, static_cast<double>(t), t / 10.0, static_cast<double>(t * t), std::nullopt));
    }
    const auto lines = split(trajectory_csv(report, 4), '\n');
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "t,x0,disagreement,value");
    CHECK(lines[1] == "1,1,0.1,1");
    CHECK(lines[2] == "5,5,0.5,25");
    CHECK(lines[3] == "9,9,0.9,81");
    CHECK(lines[4] == "10,10,1,100");

    // stride 1 keeps everything (endpoint repeated by design)
    CHECK(split(trajectory_csv(report, 1), '\n').size() == 12);

    CHECK_THROWS_AS(trajectory_csv(report, 0), std::invalid_argument);
    CHECK_THROWS_AS(trajectory_csv(TrialReport{}, 4), std::invalid_argument);
}

TEST_CASE("gradient field csv walks the inclusive grid row-major") {
    const ObjectiveSet quad = make_quadratic(2, Eigen::Vector2d::Zero(), 1);
    const std::string csv =
        field_csv(quad, Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 1.0), 2);
    CHECK(csv == "x,y,dudx,dudy\n0,0,0,0\n1,0,2,0\n0,1,0,2\n1,1,2,2\n");

    CHECK_THROWS_AS(field_csv(make_quadratic(1, Eigen::VectorXd::Zero(1), 1),
                              Eigen::Vector2d::Zero(), Eigen::Vector2d::Ones(), 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(field_csv(quad, Eigen::Vector2d::Zero(), Eigen::Vector2d::Ones(), 1),
                    std::invalid_argument);
}

TEST_CASE("monotonicity detector catches a shrinking ball") {
    BallHitTable table;
    table.radii = {0.1, 0.2};
    table.checkpoints = {10};
    table.counts.resize(2, 1);
    table.counts << 2, 1;  // bigger ball, fewer hits: impossible for real data
    CHECK_FALSE(table.monotone_in_radius());
}

TEST_CASE("summary quantiles interpolate linearly between order statistics") {
    std::vector<TrialReport> reports(5);
    for (int i = 0; i < 5; ++i) {
        reports[i].trial = i;
        reports[i].checkpoints.push_back(stat_at(1, 0.0, 0.0, 0.0, static_cast<double>(i)));
    }
    const auto lines = split(summary_csv(reports), '\n');
    REQUIRE(lines.size() == 2);
    // dist samples 0..4: mean 2, median 2, p10 = 0.4, p90 = 3.6
    CHECK(lines[1] == "1,5,0,2,2,0.4,3.6,0,0,0,0,0,0,0,0");

    CHECK_THROWS_AS(summary_csv({}), std::invalid_argument);
}
