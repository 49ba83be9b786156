#include "danneal/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "danneal/graph.hpp"
#include "danneal/text.hpp"

namespace danneal {

// --- ConfigValue ----------------------------------------------------------------

const char* ConfigValue::type_name() const {
    switch (data.index()) {
        case 0: return "boolean";
        case 1: return "integer";
        case 2: return "float";
        case 3: return "string";
        default: return "array";
    }
}

namespace {

[[noreturn]] void type_mismatch(const char* expected, const ConfigValue& value) {
    throw std::runtime_error(std::string("expected ") + expected + ", found " +
                             value.type_name());
}

}  // namespace

bool ConfigValue::as_bool() const {
    if (const bool* v = std::get_if<bool>(&data)) return *v;
    type_mismatch("boolean", *this);
}

std::int64_t ConfigValue::as_int() const {
    if (const auto* v = std::get_if<std::int64_t>(&data)) return *v;
    type_mismatch("integer", *this);
}

double ConfigValue::as_number() const {
    if (const auto* v = std::get_if<std::int64_t>(&data)) return static_cast<double>(*v);
    if (const double* v = std::get_if<double>(&data)) return *v;
    type_mismatch("number", *this);
}

const std::string& ConfigValue::as_string() const {
    if (const auto* v = std::get_if<std::string>(&data)) return *v;
    type_mismatch("string", *this);
}

std::vector<double> ConfigValue::as_numbers() const {
    const auto* array = std::get_if<Array>(&data);
    if (!array) type_mismatch("numeric array", *this);
    std::vector<double> out;
    out.reserve(array->size());
    for (const ConfigValue& element : *array) {
        if (!std::holds_alternative<std::int64_t>(element.data) &&
            !std::holds_alternative<double>(element.data)) {
            type_mismatch("numeric array", *this);
        }
        out.push_back(element.as_number());
    }
    return out;
}

std::vector<std::int64_t> ConfigValue::as_ints() const {
    const auto* array = std::get_if<Array>(&data);
    if (!array) type_mismatch("integer array", *this);
    std::vector<std::int64_t> out;
    out.reserve(array->size());
    for (const ConfigValue& element : *array) {
        if (!std::holds_alternative<std::int64_t>(element.data)) {
            type_mismatch("integer array", *this);
        }
        out.push_back(element.as_int());
    }
    return out;
}

// --- ConfigFile -------------------------------------------------------------------

const ConfigValue* ConfigFile::find(std::string_view section, std::string_view key) const {
    for (const Section& s : sections) {
        if (s.name != section) continue;
        for (const Entry& e : s.entries) {
            if (e.key == key) return &e.value;
        }
    }
    return nullptr;
}

void ConfigFile::set(const std::string& section, const std::string& key, ConfigValue value) {
    for (Section& s : sections) {
        if (s.name != section) continue;
        for (Entry& e : s.entries) {
            if (e.key == key) {
                e.value = std::move(value);
                return;
            }
        }
        s.entries.push_back(Entry{key, std::move(value), 0});
        return;
    }
    Section fresh{section, {}, 0};
    fresh.entries.push_back(Entry{key, std::move(value), 0});
    sections.push_back(std::move(fresh));
}

bool ConfigFile::operator==(const ConfigFile& other) const {
    if (sections.size() != other.sections.size()) return false;
    for (size_t i = 0; i < sections.size(); ++i) {
        const Section& a = sections[i];
        const Section& b = other.sections[i];
        if (a.name != b.name || a.entries.size() != b.entries.size()) return false;
        for (size_t j = 0; j < a.entries.size(); ++j) {
            if (a.entries[j].key != b.entries[j].key) return false;
            if (!(a.entries[j].value == b.entries[j].value)) return false;
        }
    }
    return true;
}

// --- Parsing ---------------------------------------------------------------------

ConfigError::ConfigError(std::string message, int line_number)
    : std::runtime_error(std::move(message)), line(line_number) {}

namespace {

[[noreturn]] void parse_fail(int line, const std::string& what) {
    throw ConfigError("config parse error, line " + format_int(line) + ": " + what, line);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool valid_name(std::string_view s) {
    if (s.empty()) return false;
    for (const char c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
    }
    return true;
}

// Strips a trailing comment, ignoring # inside quoted strings.
std::string_view strip_comment(std::string_view line) {
    bool in_string = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_string) {
            if (c == '\\') ++i;
            else if (c == '"') in_string = false;
        } else if (c == '"') {
            in_string = true;
        } else if (c == '#') {
            return line.substr(0, i);
        }
    }
    return line;
}

ConfigValue parse_string_token(std::string_view token, int line) {
    std::string out;
    size_t i = 1;  // past the opening quote
    for (; i < token.size(); ++i) {
        const char c = token[i];
        if (c == '"') break;
        if (c == '\\') {
            if (i + 1 >= token.size()) parse_fail(line, "unterminated escape in string");
            const char next = token[++i];
            switch (next) {
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                default:
                    parse_fail(line, std::string("unsupported escape '\\") + next + "' in string");
            }
        } else {
            out.push_back(c);
        }
    }
    if (i >= token.size()) parse_fail(line, "unterminated string");
    if (!trim(token.substr(i + 1)).empty()) {
        parse_fail(line, "unexpected text after closing quote");
    }
    return ConfigValue(std::move(out));
}

ConfigValue parse_value(std::string_view token, int line);

ConfigValue parse_array_token(std::string_view token, int line) {
    if (token.back() != ']') parse_fail(line, "unterminated array");
    std::string_view body = token.substr(1, token.size() - 2);
    ConfigValue::Array elements;
    size_t start = 0;
    bool in_string = false;
    int depth = 0;
    auto flush = [&](size_t end) {
        const std::string_view piece = trim(body.substr(start, end - start));
        if (!piece.empty()) {
            elements.push_back(parse_value(piece, line));
        } else if (end < body.size()) {
            // between commas (",," or a leading ","); a trailing comma is fine
            parse_fail(line, "empty array element");
        }
    };
    for (size_t i = 0; i < body.size(); ++i) {
        const char c = body[i];
        if (in_string) {
            if (c == '\\') ++i;
            else if (c == '"') in_string = false;
        } else if (c == '"') {
            in_string = true;
        } else if (c == '[') {
            ++depth;
        } else if (c == ']') {
            --depth;
        } else if (c == ',' && depth == 0) {
            flush(i);
            start = i + 1;
        }
    }
    if (in_string) parse_fail(line, "unterminated string in array");
    flush(body.size());
    return ConfigValue(std::move(elements));
}

ConfigValue parse_value(std::string_view token, int line) {
    if (token == "true") return ConfigValue(true);
    if (token == "false") return ConfigValue(false);
    if (token.front() == '"') return parse_string_token(token, line);
    if (token.front() == '[') return parse_array_token(token, line);

    const char* first = token.data();
    const char* last = token.data() + token.size();
    std::int64_t integer = 0;
    auto [iptr, ierr] = std::from_chars(first, last, integer);
    if (ierr == std::errc() && iptr == last) return ConfigValue(integer);
    double real = 0.0;
    auto [dptr, derr] = std::from_chars(first, last, real);
    if (derr == std::errc() && dptr == last) return ConfigValue(real);
    parse_fail(line, "cannot parse value '" + std::string(token) + "'");
}

}  // namespace

ConfigFile parse_config(const std::string& text) {
    ConfigFile file;
    ConfigFile::Section* current = nullptr;
    std::istringstream stream(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        const std::string_view line = trim(strip_comment(raw));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') parse_fail(line_no, "unterminated section header");
            const std::string_view name = trim(line.substr(1, line.size() - 2));
            if (!valid_name(name)) {
                parse_fail(line_no, "invalid section name '" + std::string(name) + "'");
            }
            for (const auto& s : file.sections) {
                if (s.name == name) {
                    parse_fail(line_no, "duplicate section [" + std::string(name) + "]");
                }
            }
            file.sections.push_back(ConfigFile::Section{std::string(name), {}, line_no});
            current = &file.sections.back();
            continue;
        }

        const size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            parse_fail(line_no, "expected 'key = value' or '[section]'");
        }
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view token = trim(line.substr(eq + 1));
        if (!valid_name(key)) parse_fail(line_no, "invalid key '" + std::string(key) + "'");
        if (token.empty()) parse_fail(line_no, "missing value for key '" + std::string(key) + "'");
        if (!current) {
            parse_fail(line_no, "key '" + std::string(key) + "' appears outside any [section]");
        }
        for (const auto& e : current->entries) {
            if (e.key == key) {
                parse_fail(line_no, "duplicate key " + current->name + "." + std::string(key));
            }
        }
        current->entries.push_back(
            ConfigFile::Entry{std::string(key), parse_value(token, line_no), line_no});
    }
    return file;
}

ConfigFile load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_config(buffer.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what(), e.line);
    }
}

// --- Serialization ----------------------------------------------------------------

namespace {

std::string serialize_value(const ConfigValue& value) {
    switch (value.data.index()) {
        case 0: return std::get<bool>(value.data) ? "true" : "false";
        case 1: return format_int(std::get<std::int64_t>(value.data));
        case 2: {
            // Keep a float marker so the round-trip preserves the type: a
            // fractionless double like 40.0 prints shortest as "40".
            std::string s = format_double(std::get<double>(value.data));
            if (s.find_first_not_of("0123456789+-") == std::string::npos) s += ".0";
            return s;
        }
        case 3: {
            std::string out = "\"";
            for (const char c : std::get<std::string>(value.data)) {
                switch (c) {
                    case '"': out += "\\\""; break;
                    case '\\': out += "\\\\"; break;
                    case '\n': out += "\\n"; break;
                    case '\t': out += "\\t"; break;
                    default: out.push_back(c);
                }
            }
            out += "\"";
            return out;
        }
        default: {
            std::string out = "[";
            const auto& elements = std::get<ConfigValue::Array>(value.data);
            for (size_t i = 0; i < elements.size(); ++i) {
                if (i) out += ", ";
                out += serialize_value(elements[i]);
            }
            out += "]";
            return out;
        }
    }
}

}  // namespace

std::string serialize_config(const ConfigFile& config) {
    std::string out;
    for (size_t i = 0; i < config.sections.size(); ++i) {
        if (i) out += "\n";
        out += "[" + config.sections[i].name + "]\n";
        for (const auto& entry : config.sections[i].entries) {
            out += entry.key + " = " + serialize_value(entry.value) + "\n";
        }
    }
    return out;
}

void apply_override(ConfigFile& config, const std::string& spec) {
    const size_t eq = spec.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("override '" + spec + "' must look like section.key=value", 0);
    }
    const std::string_view path = trim(std::string_view(spec).substr(0, eq));
    const size_t dot = path.find('.');
    if (dot == std::string_view::npos) {
        throw ConfigError("override '" + spec + "' must name section.key", 0);
    }
    const std::string section{trim(path.substr(0, dot))};
    const std::string key{trim(path.substr(dot + 1))};
    if (!valid_name(section) || !valid_name(key)) {
        throw ConfigError("override '" + spec + "' must name section.key", 0);
    }
    const std::string_view token = trim(std::string_view(spec).substr(eq + 1));
    if (token.empty()) {
        throw ConfigError("override '" + spec + "' is missing a value", 0);
    }
    ConfigValue value;
    try {
        value = parse_value(token, 0);
    } catch (const ConfigError&) {
        // Shell convenience: an unquoted word (objective.preset=colinear)
        // reads as a string.
        if (token.front() == '"' || token.front() == '[') throw;
        value = ConfigValue(std::string(token));
    }
    config.set(section, key, std::move(value));
}

// --- Translation to domain objects ---------------------------------------------------

namespace {

[[noreturn]] void fail_key(const std::string& section, const std::string& key,
                           const std::string& what) {
    throw std::invalid_argument(section + "." + key + ": " + what);
}

// Typed view over one section; every type error is rethrown with the
// section.key prefix so diagnostics name the offending field.
class SectionReader {
public:
    SectionReader(const ConfigFile& file, std::string name)
        : file_(file), name_(std::move(name)) {}

    bool has(const std::string& key) const { return file_.find(name_, key) != nullptr; }

    bool get_bool(const std::string& key, bool fallback) const {
        return read<bool>(key, fallback, [](const ConfigValue& v) { return v.as_bool(); });
    }
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
        return read<std::int64_t>(key, fallback,
                                  [](const ConfigValue& v) { return v.as_int(); });
    }
    double get_number(const std::string& key, double fallback) const {
        return read<double>(key, fallback, [](const ConfigValue& v) { return v.as_number(); });
    }
    std::string get_string(const std::string& key, std::string fallback) const {
        return read<std::string>(key, std::move(fallback),
                                 [](const ConfigValue& v) { return v.as_string(); });
    }
    std::vector<double> get_numbers(const std::string& key, std::vector<double> fallback) const {
        return read<std::vector<double>>(key, std::move(fallback),
                                         [](const ConfigValue& v) { return v.as_numbers(); });
    }
    std::vector<std::int64_t> get_ints(const std::string& key,
                                       std::vector<std::int64_t> fallback) const {
        return read<std::vector<std::int64_t>>(key, std::move(fallback),
                                               [](const ConfigValue& v) { return v.as_ints(); });
    }
    std::optional<double> opt_number(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return get_number(key, 0.0);
    }
    std::optional<std::string> opt_string(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return get_string(key, {});
    }
    std::optional<std::vector<double>> opt_numbers(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return get_numbers(key, {});
    }

    const std::string& name() const { return name_; }

private:
    template <typename T, typename F>
    T read(const std::string& key, T fallback, F&& accessor) const {
        const ConfigValue* value = file_.find(name_, key);
        if (!value) return fallback;
        try {
            return accessor(*value);
        } catch (const std::exception& e) {
            fail_key(name_, key, e.what());
        }
    }

    const ConfigFile& file_;
    std::string name_;
};

void check_known_keys(const ConfigFile& config) {
    static const std::map<std::string, std::set<std::string>> schema = {
        {"objective",
         {"kind", "preset", "sensors", "targets", "region_radius", "bridge_eps", "inner_only",
          "center", "scale", "dim", "n_agents"}},
        {"graph", {"kind", "topology", "n", "p", "edges"}},
        {"schedule", {"c_alpha", "c_beta", "tau_beta", "c_gamma", "c0_bound"}},
        {"noise", {"zeta_sigma", "l1_bound", "annealing"}},
        {"engine", {"t_max", "init", "checkpoints", "divergence_guard"}},
        {"experiment", {"n_trials", "radii", "master_seed"}},
        {"gibbs", {"bounds", "resolution", "epsilons", "radii"}},
        {"check", {"region_radius", "radii", "samples", "directions", "seed"}},
        {"output",
         {"directory", "stride", "trajectory_trials", "field", "field_bounds",
          "field_resolution"}},
    };
    auto where = [](int line) {
        return line > 0 ? " (line " + format_int(line) + ")" : std::string();
    };
    for (const auto& section : config.sections) {
        const auto known = schema.find(section.name);
        if (known == schema.end()) {
            throw std::invalid_argument("unknown config section: [" + section.name + "]" +
                                        where(section.line));
        }
        for (const auto& entry : section.entries) {
            if (!known->second.count(entry.key)) {
                throw std::invalid_argument("unknown config key: " + section.name + "." +
                                            entry.key + where(entry.line));
            }
        }
    }
}

void forbid_keys(const SectionReader& section, const std::vector<std::string>& keys,
                 const std::string& reason) {
    for (const auto& key : keys) {
        if (section.has(key)) fail_key(section.name(), key, "not applicable " + reason);
    }
}

Eigen::Matrix<double, Eigen::Dynamic, 2> points_from_flat(const std::vector<double>& flat,
                                                          const std::string& section,
                                                          const std::string& key) {
    if (flat.empty() || flat.size() % 2 != 0) {
        fail_key(section, key, "needs an even number of coordinates (x1, y1, x2, y2, ...)");
    }
    Eigen::Matrix<double, Eigen::Dynamic, 2> points(flat.size() / 2, 2);
    for (size_t i = 0; i < flat.size() / 2; ++i) {
        points(static_cast<Eigen::Index>(i), 0) = flat[2 * i];
        points(static_cast<Eigen::Index>(i), 1) = flat[2 * i + 1];
    }
    return points;
}

// objective.* -> ObjectiveSet (+ SensorField for localization kinds)
ObjectiveSet build_objective(const ConfigFile& config, std::optional<SensorField>& field_out) {
    const SectionReader obj(config, "objective");
    const auto preset = obj.opt_string("preset");
    std::string kind = obj.get_string("kind", preset ? "localization" : "");
    if (kind.empty()) {
        throw std::invalid_argument("objective.kind is required (or give objective.preset)");
    }

    if (kind == "localization") {
        forbid_keys(obj, {"center", "scale"}, "to kind = \"localization\"");
        const bool inner_only = obj.get_bool("inner_only", false);
        SensorField field;
        if (preset) {
            forbid_keys(obj, {"sensors", "targets", "region_radius", "bridge_eps"},
                        "together with objective.preset");
            if (*preset == "pentagon") {
                field = pentagon_field(inner_only);
            } else if (*preset == "colinear") {
                field = colinear_field(inner_only);
            } else {
                fail_key("objective", "preset",
                         "unknown preset '" + *preset + "' (available: pentagon, colinear)");
            }
        } else {
            const auto sensors = obj.opt_numbers("sensors");
            const auto targets = obj.opt_numbers("targets");
            if (!sensors || !targets) {
                throw std::invalid_argument(
                    "objective.sensors and objective.targets are required without a preset");
            }
            field = SensorField::from_ground_truth(
                points_from_flat(*sensors, "objective", "sensors"),
                points_from_flat(*targets, "objective", "targets"),
                obj.get_number("region_radius", 3.0), obj.get_number("bridge_eps", 0.0),
                inner_only);
        }
        if (obj.has("n_agents") &&
            obj.get_int("n_agents", 0) != static_cast<std::int64_t>(field.n_sensors())) {
            fail_key("objective", "n_agents",
                     "must match the sensor count (" + format_int(field.n_sensors()) + ")");
        }
        if (obj.has("dim") && obj.get_int("dim", 0) != static_cast<std::int64_t>(field.dim())) {
            fail_key("objective", "dim",
                     "must match twice the target count (" + format_int(field.dim()) + ")");
        }
        field_out = field;
        return make_localization(field);
    }

    if (kind == "quadratic") {
        forbid_keys(obj,
                    {"preset", "sensors", "targets", "region_radius", "bridge_eps", "inner_only",
                     "scale"},
                    "to kind = \"quadratic\"");
        const auto center_flat = obj.opt_numbers("center");
        std::int64_t dim = obj.get_int("dim", center_flat ? center_flat->size() : 0);
        if (dim < 1) {
            throw std::invalid_argument("objective.dim or objective.center is required");
        }
        Eigen::VectorXd center = Eigen::VectorXd::Zero(dim);
        if (center_flat) {
            if (static_cast<std::int64_t>(center_flat->size()) != dim) {
                fail_key("objective", "center", "length must equal objective.dim");
            }
            center = Eigen::Map<const Eigen::VectorXd>(center_flat->data(), dim);
        }
        const std::int64_t n_agents = obj.get_int("n_agents", 1);
        if (n_agents < 1) fail_key("objective", "n_agents", "must be at least 1");
        return make_quadratic(static_cast<int>(dim), center, static_cast<int>(n_agents));
    }

    if (kind == "doublewell") {
        forbid_keys(obj,
                    {"preset", "sensors", "targets", "region_radius", "bridge_eps", "inner_only",
                     "center"},
                    "to kind = \"doublewell\"");
        if (obj.has("dim") && obj.get_int("dim", 0) != 1) {
            fail_key("objective", "dim", "the double well is one-dimensional");
        }
        const double scale = obj.get_number("scale", 1.0);
        const std::int64_t n_agents = obj.get_int("n_agents", 1);
        if (n_agents < 1) fail_key("objective", "n_agents", "must be at least 1");
        return make_double_well(scale, static_cast<int>(n_agents));
    }

    fail_key("objective", "kind",
             "unknown kind '" + kind + "' (available: localization, quadratic, doublewell)");
}

GraphModel build_graph(const ConfigFile& config, int n_agents) {
    const SectionReader gr(config, "graph");
    GraphModel model;
    const std::string kind = gr.get_string("kind", "fixed");
    if (kind == "fixed") {
        if (gr.has("p")) fail_key("graph", "p", "only applies to kind = \"edge-activation\"");
    } else if (kind == "edge-activation") {
        if (!gr.has("p")) fail_key("graph", "p", "required for kind = \"edge-activation\"");
        model.kind = GraphModel::Kind::EdgeActivation;
        model.activation_p = gr.get_number("p", 0.0);
    } else {
        fail_key("graph", "kind",
                 "unknown kind '" + kind + "' (available: fixed, edge-activation)");
    }

    const std::int64_t n = gr.get_int("n", n_agents);
    if (n != n_agents) {
        fail_key("graph", "n",
                 "must equal the objective's agent count (" + format_int(n_agents) + ")");
    }
    const std::string topology = gr.get_string("topology", n == 1 ? "empty" : "complete");
    try {
        if (topology == "ring") {
            model.base_adjacency = ring_adjacency(static_cast<int>(n));
        } else if (topology == "complete") {
            model.base_adjacency = complete_adjacency(static_cast<int>(n));
        } else if (topology == "path") {
            model.base_adjacency = path_adjacency(static_cast<int>(n));
        } else if (topology == "star") {
            model.base_adjacency = star_adjacency(static_cast<int>(n));
        } else if (topology == "empty") {
            model.base_adjacency = Eigen::MatrixXi::Zero(n, n);
        } else if (topology == "edges") {
            const auto flat = gr.get_ints("edges", {});
            if (flat.size() % 2 != 0) {
                fail_key("graph", "edges", "needs an even number of vertex indices");
            }
            std::vector<std::pair<int, int>> edges;
            edges.reserve(flat.size() / 2);
            for (size_t i = 0; i < flat.size(); i += 2) {
                edges.emplace_back(static_cast<int>(flat[i]), static_cast<int>(flat[i + 1]));
            }
            model.base_adjacency = adjacency_from_edges(static_cast<int>(n), edges);
        } else {
            fail_key("graph", "topology",
                     "unknown topology '" + topology +
                         "' (available: ring, complete, path, star, edges, empty)");
        }
    } catch (const std::invalid_argument& e) {
        if (std::string(e.what()).rfind("graph.", 0) == 0) throw;
        fail_key("graph", "topology", e.what());
    }
    if (topology != "edges" && gr.has("edges")) {
        fail_key("graph", "edges", "only applies to topology = \"edges\"");
    }
    model.validate();
    return model;
}

}  // namespace

RunSetup build_setup(const ConfigFile& config) {
    check_known_keys(config);

    RunSetup setup;
    RunConfig& run = setup.experiment.run;
    run.objective = build_objective(config, setup.field);
    run.graph = build_graph(config, run.objective.n_agents);

    const SectionReader sc(config, "schedule");
    setup.schedule.c_alpha = sc.get_number("c_alpha", setup.schedule.c_alpha);
    setup.schedule.c_beta = sc.get_number("c_beta", setup.schedule.c_beta);
    setup.schedule.tau_beta = sc.get_number("tau_beta", setup.schedule.tau_beta);
    setup.schedule.c_gamma = sc.get_number("c_gamma", setup.schedule.c_gamma);
    setup.schedule.c0_bound = sc.opt_number("c0_bound");
    setup.schedule.validate();

    const SectionReader no(config, "noise");
    run.noise.zeta_sigma = no.get_number("zeta_sigma", 0.0);
    run.noise.l1_bound = no.opt_number("l1_bound");
    run.noise.validate();
    run.weights = WeightRule{setup.schedule};
    run.weights.use_gamma = no.get_bool("annealing", true);

    const SectionReader en(config, "engine");
    run.t_max = en.get_int("t_max", run.t_max);
    if (run.t_max < 1) fail_key("engine", "t_max", "must be at least 1");

    const int dim = run.objective.dim;
    const int n_agents = run.objective.n_agents;
    if (const auto init = en.opt_numbers("init")) {
        if (init->size() == static_cast<size_t>(dim)) {
            run.init = Eigen::Map<const Eigen::RowVectorXd>(init->data(), dim);
        } else if (init->size() == static_cast<size_t>(n_agents) * dim) {
            run.init = Eigen::Map<
                const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                init->data(), n_agents, dim);
        } else {
            fail_key("engine", "init",
                     "needs dim (" + format_int(dim) + ") numbers for a shared start or " +
                         "n_agents * dim (" + format_int(n_agents * dim) + ") for per-agent rows");
        }
    } else {
        run.init = Eigen::RowVectorXd::Zero(dim);
    }

    {
        const auto marks = en.get_ints("checkpoints", {run.t_max});
        if (!std::is_sorted(marks.begin(), marks.end()) ||
            std::adjacent_find(marks.begin(), marks.end()) != marks.end()) {
            fail_key("engine", "checkpoints", "must be strictly increasing");
        }
        for (const auto t : marks) {
            if (t < 1 || t > run.t_max) {
                fail_key("engine", "checkpoints",
                         "must lie in [1, engine.t_max = " + format_int(run.t_max) + "]");
            }
        }
        run.checkpoints.assign(marks.begin(), marks.end());
    }
    run.divergence_guard = en.get_number("divergence_guard", run.divergence_guard);
    if (!(run.divergence_guard > 0.0)) fail_key("engine", "divergence_guard", "must be positive");

    const SectionReader ex(config, "experiment");
    const std::int64_t n_trials = ex.get_int("n_trials", setup.experiment.n_trials);
    if (n_trials < 1) fail_key("experiment", "n_trials", "must be at least 1");
    setup.experiment.n_trials = static_cast<int>(n_trials);
    setup.experiment.radii = ex.get_numbers("radii", {});
    if (!std::is_sorted(setup.experiment.radii.begin(), setup.experiment.radii.end())) {
        fail_key("experiment", "radii", "must be sorted ascending");
    }
    for (const double r : setup.experiment.radii) {
        if (!(r > 0.0)) fail_key("experiment", "radii", "must be positive");
    }
    const std::int64_t seed = ex.get_int("master_seed", 0);
    if (seed < 0) fail_key("experiment", "master_seed", "must be nonnegative");
    setup.master_seed = static_cast<std::uint64_t>(seed);

    const SectionReader gi(config, "gibbs");
    {
        const auto bounds = gi.get_numbers("bounds", {-2.0, 2.0});
        if (bounds.size() == 2) {
            setup.gibbs.lo = Eigen::VectorXd::Constant(dim, bounds[0]);
            setup.gibbs.hi = Eigen::VectorXd::Constant(dim, bounds[1]);
        } else if (bounds.size() == 2 * static_cast<size_t>(dim)) {
            setup.gibbs.lo = Eigen::Map<const Eigen::VectorXd>(bounds.data(), dim);
            setup.gibbs.hi = Eigen::Map<const Eigen::VectorXd>(bounds.data() + dim, dim);
        } else {
            fail_key("gibbs", "bounds",
                     "needs 2 numbers (one interval for every coordinate) or 2 * dim (all lows, "
                     "then all highs)");
        }
        for (int i = 0; i < dim; ++i) {
            if (!(setup.gibbs.lo(i) < setup.gibbs.hi(i))) {
                fail_key("gibbs", "bounds", "must satisfy lo < hi per coordinate");
            }
        }
        setup.gibbs.resolution = static_cast<int>(gi.get_int("resolution", 128));
        setup.gibbs.epsilons = gi.get_numbers("epsilons", setup.gibbs.epsilons);
        setup.gibbs.radii = gi.get_numbers("radii", setup.gibbs.radii);
        for (const double e : setup.gibbs.epsilons) {
            if (!(e > 0.0)) fail_key("gibbs", "epsilons", "must be positive");
        }
        for (const double r : setup.gibbs.radii) {
            if (!(r > 0.0)) fail_key("gibbs", "radii", "must be positive");
        }
    }

    const SectionReader ck(config, "check");
    setup.check.region_radius = ck.get_number("region_radius", setup.check.region_radius);
    setup.check.radii = ck.get_numbers("radii", setup.check.radii);
    setup.check.samples = static_cast<int>(ck.get_int("samples", setup.check.samples));
    setup.check.directions = static_cast<int>(ck.get_int("directions", setup.check.directions));
    setup.check.seed = static_cast<std::uint64_t>(ck.get_int("seed", 0));

    const SectionReader out(config, "output");
    setup.output.directory = out.get_string("directory", "");
    setup.output.stride = out.get_int("stride", setup.output.stride);
    if (setup.output.stride < 1) fail_key("output", "stride", "must be at least 1");
    {
        const auto trials = out.get_ints("trajectory_trials", {});
        for (const auto i : trials) {
            if (i < 0 || i >= setup.experiment.n_trials) {
                fail_key("output", "trajectory_trials",
                         "indices must lie in [0, experiment.n_trials)");
            }
            setup.experiment.trajectory_trials.push_back(static_cast<int>(i));
        }
    }
    setup.output.field = out.get_bool("field", false);
    if (const auto bounds = out.opt_numbers("field_bounds")) {
        if (bounds->size() == 2) {
            setup.output.field_lo = Eigen::Vector2d::Constant((*bounds)[0]);
            setup.output.field_hi = Eigen::Vector2d::Constant((*bounds)[1]);
        } else if (bounds->size() == 4) {
            setup.output.field_lo = Eigen::Vector2d((*bounds)[0], (*bounds)[1]);
            setup.output.field_hi = Eigen::Vector2d((*bounds)[2], (*bounds)[3]);
        } else {
            fail_key("output", "field_bounds",
                     "needs 2 numbers (symmetric) or 4 (lo_x, lo_y, hi_x, hi_y)");
        }
        if (!(setup.output.field_lo(0) < setup.output.field_hi(0)) ||
            !(setup.output.field_lo(1) < setup.output.field_hi(1))) {
            fail_key("output", "field_bounds", "must satisfy lo < hi per axis");
        }
    }
    setup.output.field_resolution = static_cast<int>(out.get_int("field_resolution", 40));
    if (setup.output.field_resolution < 2) {
        fail_key("output", "field_resolution", "must be at least 2");
    }

    return setup;
}

}  // namespace danneal
