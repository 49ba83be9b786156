#include "danneal/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "danneal/text.hpp"

namespace danneal {

bool BallHitTable::monotone_in_radius() const {
    for (int c = 0; c < counts.cols(); ++c) {
        for (int r = 1; r < counts.rows(); ++r) {
            if (counts(r, c) < counts(r - 1, c)) return false;
        }
    }
    return true;
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::uint64_t master_seed,
                                int threads) {
    if (config.n_trials < 1) throw std::invalid_argument("need at least one trial");
    if (!std::is_sorted(config.radii.begin(), config.radii.end())) {
        throw std::invalid_argument("radii must be sorted ascending");
    }
    for (const double r : config.radii) {
        if (!(r > 0.0)) throw std::invalid_argument("radii must be positive");
    }
    for (const int i : config.trajectory_trials) {
        if (i < 0 || i >= config.n_trials) {
            throw std::invalid_argument("trajectory trial index out of range");
        }
    }

    ExperimentResult result;
    result.reports.resize(config.n_trials);

    std::atomic<int> cursor{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const int trial = cursor.fetch_add(1);
            if (trial >= config.n_trials) return;
            try {
                RunConfig run_config = config.run;
                run_config.record_trajectory =
                    std::find(config.trajectory_trials.begin(), config.trajectory_trials.end(),
                              trial) != config.trajectory_trials.end();
                result.reports[trial] = run(run_config, master_seed, trial);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    const int workers = std::max(1, std::min(threads, config.n_trials));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    for (const auto& report : result.reports) {
        if (report.divergence) ++result.n_diverged;
    }

    // Ball-hit counts need a distance, i.e. a known minimizer.
    const bool has_dist = !config.run.objective.minimizers.empty() && !config.radii.empty();
    if (has_dist) {
        BallHitTable table;
        table.radii = config.radii;
        std::vector<std::int64_t> marks = config.run.checkpoints;
        std::sort(marks.begin(), marks.end());
        marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
        table.checkpoints = marks;
        table.counts = Eigen::MatrixXi::Zero(static_cast<int>(config.radii.size()),
                                             static_cast<int>(marks.size()));
        for (const auto& report : result.reports) {
            if (report.divergence) continue;  // excluded wholesale, flagged in summary
            for (const auto& stat : report.checkpoints) {
                const auto col =
                    std::lower_bound(marks.begin(), marks.end(), stat.t) - marks.begin();
                if (col == static_cast<std::ptrdiff_t>(marks.size()) || marks[col] != stat.t) {
                    continue;
                }
                for (size_t row = 0; row < table.radii.size(); ++row) {
                    if (stat.dist && *stat.dist < table.radii[row]) {
                        table.counts(static_cast<int>(row), static_cast<int>(col)) += 1;
                    }
                }
            }
        }
        result.table = std::move(table);
    }
    return result;
}

std::string table_csv(const BallHitTable& table) {
    std::ostringstream out;
    out << "radius";
    for (const auto t : table.checkpoints) out << "," << format_int(t);
    out << "\n";
    for (size_t row = 0; row < table.radii.size(); ++row) {
        out << format_double(table.radii[row]);
        for (int col = 0; col < table.counts.cols(); ++col) {
            out << "," << format_int(table.counts(static_cast<int>(row), col));
        }
        out << "\n";
    }
    return out.str();
}

namespace {

// Linear-interpolation quantile on a sorted sample (the convention most
// statistics packages default to).
double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
    if (sorted.size() == 1) return sorted.front();
    const double h = q * (static_cast<double>(sorted.size()) - 1.0);
    const size_t i = static_cast<size_t>(h);
    if (i + 1 >= sorted.size()) return sorted.back();
    return sorted[i] + (h - i) * (sorted[i + 1] - sorted[i]);
}

void append_stats(std::ostringstream& out, std::vector<double>& values) {
    if (values.empty()) {
        const std::string nan = format_double(std::numeric_limits<double>::quiet_NaN());
        for (int i = 0; i < 4; ++i) out << "," << nan;
        return;
    }
    double mean = 0.0;
    for (const double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    std::sort(values.begin(), values.end());
    out << "," << format_double(mean) << "," << format_double(quantile_sorted(values, 0.5)) << ","
        << format_double(quantile_sorted(values, 0.10)) << ","
        << format_double(quantile_sorted(values, 0.90));
}

}  // namespace

std::string summary_csv(const std::vector<TrialReport>& reports) {
    if (reports.empty()) throw std::invalid_argument("summary needs at least one report");

    struct Bucket {
        std::vector<double> dist, disagreement, value;
    };
    std::map<std::int64_t, Bucket> buckets;
    for (const auto& report : reports) {
        for (const auto& stat : report.checkpoints) {
            Bucket& b = buckets[stat.t];
            if (stat.dist) b.dist.push_back(*stat.dist);
            b.disagreement.push_back(stat.disagreement);
            b.value.push_back(stat.value_at_avg);
        }
    }

    std::ostringstream out;
    out << "t,n,n_diverged,dist_mean,dist_median,dist_p10,dist_p90,"
           "disagreement_mean,disagreement_median,disagreement_p10,disagreement_p90,"
           "value_mean,value_median,value_p10,value_p90\n";
    for (auto& [t, bucket] : buckets) {
        const auto n = bucket.value.size();
        out << format_int(t) << "," << format_int(static_cast<std::int64_t>(n)) << ","
            << format_int(static_cast<std::int64_t>(reports.size() - n));
        append_stats(out, bucket.dist);
        append_stats(out, bucket.disagreement);
        append_stats(out, bucket.value);
        out << "\n";
    }
    return out.str();
}

namespace {

void append_trajectory_row(std::ostringstream& out, const CheckpointStat& stat) {
    out << format_int(stat.t);
    for (Eigen::Index i = 0; i < stat.x_avg.size(); ++i) {
        out << "," << format_double(stat.x_avg(i));
    }
    out << "," << format_double(stat.disagreement) << "," << format_double(stat.value_at_avg)
        << "\n";
}

}  // namespace

std::string trajectory_csv(const TrialReport& report, std::int64_t stride) {
    if (stride < 1) throw std::invalid_argument("stride must be at least 1");
    if (report.trajectory.empty()) {
        throw std::invalid_argument("trial did not record a trajectory");
    }
    std::ostringstream out;
    out << "t";
    for (Eigen::Index i = 0; i < report.trajectory.front().x_avg.size(); ++i) out << ",x" << i;
    out << ",disagreement,value\n";
    // Strided rows, then the final row unconditionally: the endpoint matters
    // for convergence plots even when the stride skips past it.
    for (size_t i = 0; i < report.trajectory.size(); i += static_cast<size_t>(stride)) {
        append_trajectory_row(out, report.trajectory[i]);
    }
    append_trajectory_row(out, report.trajectory.back());
    return out.str();
}

std::string field_csv(const ObjectiveSet& objective, const Eigen::Vector2d& lo,
                      const Eigen::Vector2d& hi, int resolution) {
    if (objective.dim != 2) throw std::invalid_argument("field export needs a 2-dimensional state");
    if (resolution < 2) throw std::invalid_argument("field export needs resolution >= 2");
    std::ostringstream out;
    out << "x,y,dudx,dudy\n";
    for (int iy = 0; iy < resolution; ++iy) {
        const double y = lo(1) + (hi(1) - lo(1)) * iy / (resolution - 1);
        for (int ix = 0; ix < resolution; ++ix) {
            const double x = lo(0) + (hi(0) - lo(0)) * ix / (resolution - 1);
            const Eigen::VectorXd g = objective.gradient(Eigen::Vector2d(x, y));
            out << format_double(x) << "," << format_double(y) << "," << format_double(g(0))
                << "," << format_double(g(1)) << "\n";
        }
    }
    return out.str();
}

}  // namespace danneal
