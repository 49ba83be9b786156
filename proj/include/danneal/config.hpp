#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "danneal/checker.hpp"
#include "danneal/harness.hpp"
#include "danneal/objective.hpp"
#include "danneal/schedules.hpp"

namespace danneal {

// --- Config file model --------------------------------------------------------
//
// Experiments are described by a key = value file with [section] headers — a
// TOML subset: booleans, integers, floats, quoted strings, and single-line
// arrays, with # comments. Parsing preserves section and key order, so
// parse -> serialize -> parse is the identity on every recognized field.

struct ConfigValue {
    using Array = std::vector<ConfigValue>;
    std::variant<bool, std::int64_t, double, std::string, Array> data;

    ConfigValue() : data(false) {}
    ConfigValue(bool v) : data(v) {}
    ConfigValue(int v) : data(static_cast<std::int64_t>(v)) {}
    ConfigValue(std::int64_t v) : data(v) {}
    ConfigValue(double v) : data(v) {}
    ConfigValue(const char* v) : data(std::string(v)) {}
    ConfigValue(std::string v) : data(std::move(v)) {}
    ConfigValue(Array v) : data(std::move(v)) {}

    bool operator==(const ConfigValue&) const = default;

    const char* type_name() const;

    // Typed accessors. Each throws std::runtime_error naming the expected
    // and actual type; callers add the section.key context.
    bool as_bool() const;
    std::int64_t as_int() const;
    double as_number() const;  // accepts integer or float
    const std::string& as_string() const;
    std::vector<double> as_numbers() const;     // flat numeric array
    std::vector<std::int64_t> as_ints() const;  // integer array
};

struct ConfigFile {
    struct Entry {
        std::string key;
        ConfigValue value;
        int line = 0;  // 1-based source line; 0 when synthesized
    };
    struct Section {
        std::string name;
        std::vector<Entry> entries;
        int line = 0;
    };
    std::vector<Section> sections;

    const ConfigValue* find(std::string_view section, std::string_view key) const;
    // Inserts or replaces, creating the section on demand.
    void set(const std::string& section, const std::string& key, ConfigValue value);

    bool operator==(const ConfigFile& other) const;  // ignores line numbers
};

struct ConfigError : std::runtime_error {
    int line;  // 1-based; 0 when no line applies
    ConfigError(std::string message, int line_number);
};

ConfigFile parse_config(const std::string& text);
ConfigFile load_config_file(const std::string& path);  // throws on missing file
std::string serialize_config(const ConfigFile& config);

// Applies one command-line override of the form "section.key=value". The
// value uses the file grammar, except that an unquoted word is accepted as a
// string for shell convenience.
void apply_override(ConfigFile& config, const std::string& spec);

// --- Translation to domain objects ---------------------------------------------

// Gibbs-oracle request: grid bounds per coordinate, the epsilon ladder, and
// the ball radii whose mass around the known minimizers gets reported.
struct GibbsRequest {
    Eigen::VectorXd lo, hi;
    int resolution = 128;
    std::vector<double> epsilons = {0.5, 0.3, 0.2, 0.1};
    std::vector<double> radii = {0.2};
};

struct OutputOptions {
    std::string directory;  // empty = not configured (CLI falls back to env/cwd)
    std::int64_t stride = 100;
    bool field = false;  // also export the gradient field on a grid
    Eigen::Vector2d field_lo{-1.5, -1.5};
    Eigen::Vector2d field_hi{1.5, 1.5};
    int field_resolution = 40;
};

// Everything the command-line front end needs, cross-validated: objective
// dimension vs. initial condition, checkpoint range, graph size vs. agent
// count. Throws std::invalid_argument naming the offending section.key.
struct RunSetup {
    ExperimentConfig experiment;
    std::uint64_t master_seed = 0;
    std::optional<SensorField> field;  // localization objectives only
    WeightSchedule schedule;
    GibbsRequest gibbs;
    SuiteParams check;
    OutputOptions output;
};

RunSetup build_setup(const ConfigFile& config);

}  // namespace danneal
