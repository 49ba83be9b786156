#include "danneal/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "danneal/checker.hpp"
#include "danneal/config.hpp"
#include "danneal/gibbs.hpp"
#include "danneal/harness.hpp"
#include "danneal/text.hpp"

namespace danneal {

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::int64_t seed = -1;  // < 0 = keep the config's seed
    int threads = std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
    std::string out_dir;
};

RunSetup load_setup(const CommonArgs& args) {
    ConfigFile file = load_config_file(args.config_path);
    for (const std::string& spec : args.overrides) apply_override(file, spec);
    RunSetup setup = build_setup(file);
    if (args.seed >= 0) {
        setup.master_seed = static_cast<std::uint64_t>(args.seed);
        setup.check.seed = static_cast<std::uint64_t>(args.seed);
    }
    return setup;
}

// --out beats the config, the config beats $DANNEAL_OUT, and the working
// directory is the last resort.
std::filesystem::path resolve_out_dir(const CommonArgs& args, const RunSetup& setup) {
    std::string dir = args.out_dir;
    if (dir.empty()) dir = setup.output.directory;
    if (dir.empty()) {
        if (const char* env = std::getenv("DANNEAL_OUT")) dir = env;
    }
    if (dir.empty()) dir = ".";
    std::filesystem::create_directories(dir);
    return dir;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + path.string());
    file << content;
}

std::string render_table(const BallHitTable& table) {
    std::ostringstream out;
    out << std::setw(10) << "r \\ t";
    for (const auto t : table.checkpoints) out << std::setw(9) << format_int(t);
    out << "\n";
    for (size_t row = 0; row < table.radii.size(); ++row) {
        out << std::setw(10) << format_double(table.radii[row]);
        for (int col = 0; col < table.counts.cols(); ++col) {
            out << std::setw(9) << table.counts(static_cast<int>(row), col);
        }
        out << "\n";
    }
    return out.str();
}

int cmd_run(const CommonArgs& args, bool table_only, std::ostream& out, std::ostream& err) {
    RunSetup setup = load_setup(args);
    if (!table_only && setup.output.field && setup.experiment.run.objective.dim != 2) {
        throw std::invalid_argument("output.field needs a 2-dimensional objective");
    }
    if (table_only && (setup.experiment.run.objective.minimizers.empty() ||
                       setup.experiment.radii.empty())) {
        throw std::invalid_argument(
            "the ball-hit table needs known minimizers and a nonempty experiment.radii");
    }

    const auto started = std::chrono::steady_clock::now();
    const ExperimentResult result =
        run_experiment(setup.experiment, setup.master_seed, args.threads);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    const std::filesystem::path dir = resolve_out_dir(args, setup);
    std::vector<std::string> written;
    if (result.table) {
        write_file(dir / "table.csv", table_csv(*result.table));
        written.push_back("table.csv");
    }
    if (!table_only) {
        write_file(dir / "summary.csv", summary_csv(result.reports));
        written.push_back("summary.csv");
        for (const int trial : setup.experiment.trajectory_trials) {
            const std::string name = "trajectory_" + format_int(trial) + ".csv";
            write_file(dir / name, trajectory_csv(result.reports[trial], setup.output.stride));
            written.push_back(name);
        }
        if (setup.output.field) {
            write_file(dir / "field.csv",
                       field_csv(setup.experiment.run.objective, setup.output.field_lo,
                                 setup.output.field_hi, setup.output.field_resolution));
            written.push_back("field.csv");
        }
    }

    if (result.table) {
        out << "trials within r of the minimizer, out of " << result.reports.size() << "\n";
        out << render_table(*result.table);
    } else {
        out << "no ball-hit table: the objective has no known minimizer or experiment.radii "
               "is empty\n";
    }
    out << result.reports.size() << " trials in "
        << format_double(std::round(seconds * 1000.0) / 1000.0) << " s";
    if (result.n_diverged > 0) out << " (" << result.n_diverged << " diverged, excluded)";
    out << "\n";
    out << "wrote";
    for (const auto& name : written) out << " " << (dir / name).string();
    out << "\n";

    if (2 * result.n_diverged > setup.experiment.n_trials) {
        err << "error: " << result.n_diverged << " of " << setup.experiment.n_trials
            << " trials diverged\n";
        return 2;
    }
    return 0;
}

int cmd_check(const CommonArgs& args, std::ostream& out, std::ostream& /*err*/) {
    RunSetup setup = load_setup(args);
    const AssumptionReport report = run_all_checks(
        setup.experiment.run.objective, setup.field ? &*setup.field : nullptr,
        &setup.experiment.run.graph, &setup.schedule, setup.check);

    for (const CheckResult& entry : report.entries) {
        std::string status = to_string(entry.status);
        for (char& c : status) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        out << "[" << status << "] " << std::left << std::setw(24) << entry.name << std::right;
        for (size_t i = 0; i < entry.witnesses.size(); ++i) {
            out << (i ? ", " : " ") << entry.witnesses[i].key << "="
                << format_double(entry.witnesses[i].value);
        }
        out << "\n";
        if (!entry.note.empty()) out << "       " << entry.note << "\n";
    }
    out << (report.hard_fail() ? "hard failure: at least one load-bearing assumption broke\n"
                               : "no hard failures\n");
    return report.hard_fail() ? 3 : 0;
}

int cmd_gibbs(const CommonArgs& args, std::ostream& out, std::ostream& /*err*/) {
    RunSetup setup = load_setup(args);
    const ObjectiveSet& objective = setup.experiment.run.objective;
    if (objective.minimizers.empty()) {
        throw std::invalid_argument("the mass report needs an objective with known minimizers");
    }
    bool header_written = false;
    for (const double epsilon : setup.gibbs.epsilons) {
        const GibbsGrid grid = build_grid(objective, setup.gibbs.lo, setup.gibbs.hi,
                                          setup.gibbs.resolution, epsilon, args.threads);
        if (!header_written) {
            out << "epsilon,radius,mass\n";
            header_written = true;
        }
        for (const double radius : setup.gibbs.radii) {
            out << format_double(epsilon) << "," << format_double(radius) << ","
                << format_double(mass_near(grid, objective.minimizers, radius)) << "\n";
        }
    }
    return 0;
}

void add_common_options(CLI::App* cmd, CommonArgs& args, bool with_threads, bool with_out) {
    cmd->add_option("--config", args.config_path, "experiment description file")->required();
    cmd->add_option("--set", args.overrides,
                    "override one config entry, section.key=value (repeatable)");
    cmd->add_option("--seed", args.seed, "override the config's seed");
    if (with_threads) {
        cmd->add_option("--threads", args.threads, "worker threads")
            ->check(CLI::PositiveNumber);
    }
    if (with_out) {
        cmd->add_option("--out", args.out_dir,
                        "output directory (default: config, then $DANNEAL_OUT, then .)");
    }
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"distributed annealing: simulator, assumption checker, Gibbs oracle"};
    app.require_subcommand(1);

    CommonArgs run_args, table_args, check_args, gibbs_args;
    CLI::App* run_cmd =
        app.add_subcommand("run", "run the trial ensemble and write table/summary/trajectories");
    add_common_options(run_cmd, run_args, true, true);
    CLI::App* table_cmd = app.add_subcommand("table", "like run, but emit only table.csv");
    add_common_options(table_cmd, table_args, true, true);
    CLI::App* check_cmd = app.add_subcommand("check", "run the assumption suite");
    add_common_options(check_cmd, check_args, false, false);
    CLI::App* gibbs_cmd =
        app.add_subcommand("gibbs", "grid quadrature of the Gibbs family; prints epsilon,radius,mass");
    add_common_options(gibbs_cmd, gibbs_args, true, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (run_cmd->parsed()) return cmd_run(run_args, false, out, err);
        if (table_cmd->parsed()) return cmd_run(table_args, true, out, err);
        if (check_cmd->parsed()) return cmd_check(check_args, out, err);
        return cmd_gibbs(gibbs_args, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace danneal
