#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "danneal/engine.hpp"

namespace danneal {

// Monte Carlo experiment: n_trials independent runs of one configuration,
// each trial seeded from its own substream of the master seed, reduced to a
// ball-hit table (how many trials were within radius r of the target at
// exactly iteration t) plus per-checkpoint summary statistics.
struct ExperimentConfig {
    RunConfig run;
    int n_trials = 100;
    std::vector<double> radii;          // ascending
    std::vector<int> trajectory_trials;  // trials that keep their full path
};

struct BallHitTable {
    std::vector<double> radii;             // rows
    std::vector<std::int64_t> checkpoints;  // columns
    Eigen::MatrixXi counts;

    // Containment: a bigger ball can only hold more trials.
    bool monotone_in_radius() const;
};

struct ExperimentResult {
    // Absent when the objective has no known minimizer to measure against.
    std::optional<BallHitTable> table;
    std::vector<TrialReport> reports;  // index = trial
    int n_diverged = 0;
};

// Runs the trials (in a thread pool when threads > 1; trial i always consumes
// substream i, so results are identical for every thread count). Diverged
// trials are excluded from the table counts and flagged in the summary.
ExperimentResult run_experiment(const ExperimentConfig& config, std::uint64_t master_seed,
                                int threads = 1);

// CSV renderings. All numbers go through the shortest-round-trip formatter,
// so identical results give byte-identical files.

// header "radius,<t1>,<t2>,..."; one row per radius.
std::string table_csv(const BallHitTable& table);

// Per checkpoint: trial count, divergence count, and mean/median/p10/p90 of
// distance-to-minimizer, disagreement, and objective value.
std::string summary_csv(const std::vector<TrialReport>& reports);

// Rows t = 1, 1+stride, 1+2*stride, ... plus always the final recorded row.
// Columns: t, x_avg components, disagreement, value. Throws when the report
// kept no trajectory.
std::string trajectory_csv(const TrialReport& report, std::int64_t stride);

// The gradient field on an inclusive resolution x resolution grid over
// [lo, hi]^2, for external quiver plots. Columns: x, y, dudx, dudy.
std::string field_csv(const ObjectiveSet& objective, const Eigen::Vector2d& lo,
                      const Eigen::Vector2d& hi, int resolution);

}  // namespace danneal
