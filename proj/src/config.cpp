#include "fohs/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fohs/error.hpp"

namespace fohs {

using nlohmann::json;

namespace {

enum class Type { Number, Integer, Bool, String, Choice, Vector, Matrix, MatrixList, VectorList, Object };

struct Field {
    Field(std::string n, Type t, bool req = false, json fb = nullptr)
        : name(std::move(n)), type(t), required(req), fallback(std::move(fb)) {}

    std::string name;
    Type type;
    bool required = false;
    json fallback = nullptr;  // filled in when absent
    std::vector<Field> children;
    std::vector<std::string> choices;
    std::optional<double> lower;  // exclusive when lower_open
    bool lower_open = false;
    std::optional<double> upper;
    bool upper_open = false;
};

Field number(std::string name, bool required, json fallback = nullptr) {
    return {std::move(name), Type::Number, required, std::move(fallback)};
}

Field positive(std::string name, bool required, json fallback = nullptr) {
    Field f = number(std::move(name), required, std::move(fallback));
    f.lower = 0.0;
    f.lower_open = true;
    return f;
}

Field non_negative(std::string name, json fallback) {
    Field f = number(std::move(name), false, std::move(fallback));
    f.lower = 0.0;
    return f;
}

Field integer(std::string name, bool required, json fallback, double min) {
    Field f{std::move(name), Type::Integer, required, std::move(fallback)};
    f.lower = min;
    return f;
}

Field boolean(std::string name, bool fallback) { return {std::move(name), Type::Bool, false, fallback}; }

Field object(std::string name, bool required, std::vector<Field> children) {
    Field f{std::move(name), Type::Object, required, required ? json(nullptr) : json::object()};
    f.children = std::move(children);
    return f;
}

Field choice(std::string name, bool required, std::vector<std::string> choices, json fallback = nullptr) {
    Field f{std::move(name), Type::Choice, required, std::move(fallback)};
    f.choices = std::move(choices);
    return f;
}

Field order_field() {
    Field f = positive("alpha", true);
    f.upper = 2.0;
    f.upper_open = true;
    return f;
}

Field tf_field(std::string name) {
    Field order = positive("order", true);
    order.upper = 1.0;
    return object(std::move(name), true,
                  {order, {"num", Type::Vector, true}, {"den", Type::Vector, true}});
}

Field loop_field() {
    return object("loop", true,
                  {tf_field("plant"), tf_field("controller"), tf_field("reset"),
                   integer("n_reset", false, nullptr, 0), number("r", false, 0.0),
                   {"beta_row", Type::Vector, false}});
}

Field grid_field() {
    Field points = integer("points", false, 2000, 2);
    return object("grid", false, {positive("omega_min", false, 1e-4), positive("omega_max", false, 1e4), points});
}

std::vector<Field> common_fields() {
    return {choice("kind", true, config_kinds()),
            {"name", Type::String, false, ""},
            {"description", Type::String, false},
            integer("seed", false, 0, 0),
            {"out_dir", Type::String, false, "fohs-out"}};
}

std::vector<Field> fields_for(const std::string& kind) {
    std::vector<Field> f = common_fields();
    auto add = [&f](std::initializer_list<Field> more) { f.insert(f.end(), more); };
    if (kind == "switching-analysis") {
        add({order_field(), {"modes", Type::MatrixList, true}, grid_field(), non_negative("band", 0.02),
             boolean("certify", true),
             object("search", false,
                    {integer("max_iter", false, 5000, 1), positive("epsilon", false, 1e-6)}),
             boolean("write_csv", true)});
    } else if (kind == "reset-analysis") {
        add({loop_field(), number("beta", true), positive("p_r", false, 1.0), grid_field(),
             non_negative("band", 0.0), boolean("certify", true), boolean("write_csv", true)});
    } else if (kind == "beta-sweep") {
        add({loop_field(), grid_field(),
             object("beta_range", false,
                    {number("lo", false, -5.0), number("hi", false, 5.0), positive("step", false, 0.01),
                     positive("width", false, 1e-4)}),
             positive("p_r", false, 1.0), non_negative("band", 0.0), boolean("write_csv", true)});
    } else if (kind == "simulate-switched") {
        add({order_field(), {"modes", Type::MatrixList, true},
             object("rule", true,
                    {choice("kind", true, {"arbitrary", "regions"}), integer("dwell", false, 1, 1),
                     {"w", Type::Vector, false}, {"q", Type::Matrix, false}, non_negative("band", 0.0)}),
             {"initial_conditions", Type::VectorList, true}, positive("h", true), positive("horizon", true),
             integer("window", false, 0, 0)});
    } else if (kind == "simulate-reset") {
        add({loop_field(), {"x0", Type::Vector, false}, positive("h", true), positive("horizon", true),
             integer("window", false, 0, 0), choice("memory", false, {"clear", "retain"}, "clear"),
             positive("surface_tol", false, 1e-9), positive("state_tol", false, 1e-12)});
    }
    return f;
}

// Line of the deepest object key named by the pointer, found by scanning the
// source for each key in turn.
int line_of(const std::string& text, const std::vector<std::string>& path) {
    std::size_t pos = 0;
    std::size_t found = std::string::npos;
    for (const auto& token : path) {
        if (!token.empty() && std::all_of(token.begin(), token.end(), ::isdigit)) {
            continue;
        }
        const std::string needle = "\"" + token + "\"";
        std::size_t at = pos;
        for (;;) {
            at = text.find(needle, at);
            if (at == std::string::npos) {
                break;
            }
            std::size_t after = at + needle.size();
            while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) {
                ++after;
            }
            if (after < text.size() && text[after] == ':') {
                break;
            }
            at += needle.size();
        }
        if (at == std::string::npos) {
            break;
        }
        found = at;
        pos = at + needle.size();
    }
    if (found == std::string::npos) {
        return 0;
    }
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(found), '\n'));
}

class Validator {
public:
    explicit Validator(const std::string& text) : text_(text) {}

    [[noreturn]] void error(const std::vector<std::string>& path, const std::string& message) const {
        std::string pointer;
        for (const auto& p : path) {
            pointer += "/" + p;
        }
        if (pointer.empty()) {
            pointer = "/";
        }
        const int line = line_of(text_, path);
        std::ostringstream os;
        if (line > 0) {
            os << "line " << line << ": ";
        }
        os << pointer << ": " << message;
        fail(ErrorKind::Schema, os.str());
    }

    json object(const json& node, const std::vector<Field>& fields, std::vector<std::string>& path) const {
        if (!node.is_object()) {
            error(path, "expected an object");
        }
        for (const auto& [key, value] : node.items()) {
            const bool known = std::any_of(fields.begin(), fields.end(), [&](const Field& f) { return f.name == key; });
            if (!known) {
                path.push_back(key);
                error(path, "unknown field");
            }
        }
        json out = json::object();
        for (const auto& f : fields) {
            path.push_back(f.name);
            if (node.contains(f.name)) {
                out[f.name] = value(node.at(f.name), f, path);
            } else if (f.required) {
                error(path, "required field is missing");
            } else if (!f.fallback.is_null()) {
                out[f.name] = value(f.fallback, f, path);
            }
            path.pop_back();
        }
        return out;
    }

private:
    json value(const json& v, const Field& f, std::vector<std::string>& path) const {
        switch (f.type) {
        case Type::Number:
            return scalar(v, f, path);
        case Type::Integer: {
            if (!v.is_number_integer()) {
                error(path, "expected an integer");
            }
            check_range(static_cast<double>(v.get<long long>()), f, path);
            return v;
        }
        case Type::Bool:
            if (!v.is_boolean()) {
                error(path, "expected true or false");
            }
            return v;
        case Type::String:
            if (!v.is_string()) {
                error(path, "expected a string");
            }
            return v;
        case Type::Choice: {
            if (!v.is_string() ||
                std::find(f.choices.begin(), f.choices.end(), v.get<std::string>()) == f.choices.end()) {
                std::string options;
                for (const auto& c : f.choices) {
                    options += (options.empty() ? "" : ", ") + c;
                }
                error(path, "expected one of: " + options);
            }
            return v;
        }
        case Type::Vector:
            return vector(v, path);
        case Type::Matrix:
            return matrix(v, path);
        case Type::MatrixList:
        case Type::VectorList: {
            if (!v.is_array() || v.empty()) {
                error(path, "expected a non-empty array");
            }
            json out = json::array();
            for (std::size_t i = 0; i < v.size(); ++i) {
                path.push_back(std::to_string(i));
                out.push_back(f.type == Type::MatrixList ? matrix(v[i], path) : vector(v[i], path));
                path.pop_back();
            }
            return out;
        }
        case Type::Object:
            return object(v, f.children, path);
        }
        return v;
    }

    json scalar(const json& v, const Field& f, const std::vector<std::string>& path) const {
        if (!v.is_number()) {
            error(path, "expected a number");
        }
        const double x = v.get<double>();
        if (!std::isfinite(x)) {
            error(path, "expected a finite number");
        }
        check_range(x, f, path);
        return v;
    }

    void check_range(double x, const Field& f, const std::vector<std::string>& path) const {
        if (f.lower && (x < *f.lower || (f.lower_open && x == *f.lower))) {
            error(path, "value " + json(x).dump() + " must be " + (f.lower_open ? "> " : ">= ") + json(*f.lower).dump());
        }
        if (f.upper && (x > *f.upper || (f.upper_open && x == *f.upper))) {
            error(path, "value " + json(x).dump() + " must be " + (f.upper_open ? "< " : "<= ") + json(*f.upper).dump());
        }
    }

    json vector(const json& v, std::vector<std::string>& path) const {
        if (!v.is_array() || v.empty()) {
            error(path, "expected a non-empty array of numbers");
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
                path.push_back(std::to_string(i));
                error(path, "expected a finite number");
            }
        }
        return v;
    }

    json matrix(const json& v, std::vector<std::string>& path) const {
        if (!v.is_array() || v.empty()) {
            error(path, "expected a non-empty array of rows");
        }
        std::size_t width = 0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            path.push_back(std::to_string(i));
            vector(v[i], path);
            if (i == 0) {
                width = v[i].size();
            } else if (v[i].size() != width) {
                error(path, "ragged matrix: row has " + std::to_string(v[i].size()) + " entries, expected " +
                                std::to_string(width));
            }
            path.pop_back();
        }
        return v;
    }

    const std::string& text_;
};

Matrix to_matrix(const json& v) {
    Matrix m(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v[0].size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            m(i, j) = v[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get<double>();
        }
    }
    return m;
}

Vector to_vector(const json& v) {
    Vector x(static_cast<Eigen::Index>(v.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        x(i) = v[static_cast<std::size_t>(i)].get<double>();
    }
    return x;
}

std::vector<Matrix> to_modes(const json& v) {
    std::vector<Matrix> out;
    for (const auto& m : v) {
        out.push_back(to_matrix(m));
    }
    return out;
}

FrequencyGrid to_grid(const json& g) {
    FrequencyGrid grid{g.at("omega_min").get<double>(), g.at("omega_max").get<double>(),
                       g.at("points").get<std::size_t>()};
    grid.validate();
    return grid;
}

CommensurateTransferFunction to_tf(const json& t) {
    CommensurateTransferFunction tf{t.at("order").get<double>(), t.at("num").get<std::vector<double>>(),
                                    t.at("den").get<std::vector<double>>()};
    tf.validate();
    return tf;
}

LoopConfig to_loop(const json& l) {
    LoopConfig loop{to_tf(l.at("plant")), to_tf(l.at("controller")), to_tf(l.at("reset")), std::nullopt,
                    l.at("r").get<double>(), {}};
    if (l.contains("n_reset")) {
        loop.n_reset = l.at("n_reset").get<Eigen::Index>();
    }
    if (l.contains("beta_row")) {
        loop.beta_row = l.at("beta_row").get<std::vector<double>>();
    }
    return loop;
}

void fill_sim(SimOptions& sim, const json& j) {
    sim.h = j.at("h").get<double>();
    sim.horizon = j.at("horizon").get<double>();
    sim.window = j.at("window").get<std::size_t>();
}

ConfigBody to_body(const std::string& kind, const json& j, std::uint64_t seed) {
    if (kind == "switching-analysis") {
        SwitchingAnalysisConfig c;
        c.alpha = j.at("alpha").get<double>();
        c.modes = to_modes(j.at("modes"));
        c.grid = to_grid(j.at("grid"));
        c.verdict.band = j.at("band").get<double>();
        c.verdict.certify = j.at("certify").get<bool>();
        c.verdict.search.max_iter = j.at("search").at("max_iter").get<int>();
        c.verdict.search.epsilon = j.at("search").at("epsilon").get<double>();
        c.write_csv = j.at("write_csv").get<bool>();
        return c;
    }
    if (kind == "reset-analysis") {
        ResetAnalysisConfig c;
        c.loop = to_loop(j.at("loop"));
        c.beta = j.at("beta").get<double>();
        c.p_r = j.at("p_r").get<double>();
        c.grid = to_grid(j.at("grid"));
        c.spr.band = j.at("band").get<double>();
        c.certify = j.at("certify").get<bool>();
        c.write_csv = j.at("write_csv").get<bool>();
        return c;
    }
    if (kind == "beta-sweep") {
        BetaSweepConfig c;
        c.loop = to_loop(j.at("loop"));
        c.grid = to_grid(j.at("grid"));
        const auto& r = j.at("beta_range");
        c.search.beta_lo = r.at("lo").get<double>();
        c.search.beta_hi = r.at("hi").get<double>();
        c.search.step = r.at("step").get<double>();
        c.search.width = r.at("width").get<double>();
        c.search.p_r = j.at("p_r").get<double>();
        c.search.spr.band = j.at("band").get<double>();
        c.write_csv = j.at("write_csv").get<bool>();
        if (!(c.search.beta_lo < c.search.beta_hi)) {
            fail(ErrorKind::Schema, "/beta_range: lo must be below hi");
        }
        return c;
    }
    if (kind == "simulate-switched") {
        SimulateSwitchedConfig c;
        c.alpha = j.at("alpha").get<double>();
        c.modes = to_modes(j.at("modes"));
        const auto& r = j.at("rule");
        c.rule.kind = r.at("kind") == "arbitrary" ? SwitchingRule::Kind::ArbitrarySeeded
                                                  : SwitchingRule::Kind::StateRegions;
        c.rule.seed = seed;
        c.rule.dwell = r.at("dwell").get<std::size_t>();
        c.rule.band = r.at("band").get<double>();
        if (r.contains("w")) {
            c.rule.w = to_vector(r.at("w"));
        }
        if (r.contains("q")) {
            c.rule.q = to_matrix(r.at("q"));
        }
        for (const auto& x : j.at("initial_conditions")) {
            c.initial_conditions.push_back(to_vector(x));
        }
        fill_sim(c.sim, j);
        return c;
    }
    SimulateResetConfig c;
    c.loop = to_loop(j.at("loop"));
    if (j.contains("x0")) {
        c.x0 = to_vector(j.at("x0"));
    }
    fill_sim(c.sim, j);
    c.sim.memory = j.at("memory") == "retain" ? MemoryMode::Retain : MemoryMode::ClearResetStates;
    c.sim.surface_tol = j.at("surface_tol").get<double>();
    c.sim.state_tol = j.at("state_tol").get<double>();
    return c;
}

bool uses_grid(const std::string& kind) {
    return kind == "switching-analysis" || kind == "reset-analysis" || kind == "beta-sweep";
}

json number_array() { return {{"type", "array"}, {"minItems", 1}, {"items", {{"type", "number"}}}}; }

json schema_of(const Field& f) {
    json s;
    switch (f.type) {
    case Type::Number:
        s["type"] = "number";
        break;
    case Type::Integer:
        s["type"] = "integer";
        break;
    case Type::Bool:
        s["type"] = "boolean";
        break;
    case Type::String:
        s["type"] = "string";
        break;
    case Type::Choice:
        s["enum"] = f.choices;
        break;
    case Type::Vector:
        s = number_array();
        break;
    case Type::Matrix:
        s = {{"type", "array"}, {"minItems", 1}, {"items", number_array()}};
        break;
    case Type::MatrixList:
        s = {{"type", "array"},
             {"minItems", 1},
             {"items", {{"type", "array"}, {"minItems", 1}, {"items", number_array()}}}};
        break;
    case Type::VectorList:
        s = {{"type", "array"}, {"minItems", 1}, {"items", number_array()}};
        break;
    case Type::Object: {
        s = {{"type", "object"}, {"additionalProperties", false}};
        json props = json::object();
        json required = json::array();
        for (const auto& c : f.children) {
            props[c.name] = schema_of(c);
            if (c.required) {
                required.push_back(c.name);
            }
        }
        s["properties"] = props;
        if (!required.empty()) {
            s["required"] = required;
        }
        return s;
    }
    }
    if (f.lower) {
        s[f.lower_open ? "exclusiveMinimum" : "minimum"] = *f.lower;
    }
    if (f.upper) {
        s[f.upper_open ? "exclusiveMaximum" : "maximum"] = *f.upper;
    }
    if (!f.fallback.is_null()) {
        s["default"] = f.fallback;
    }
    return s;
}

} // namespace

json experiment_schema() {
    json variants = json::array();
    for (const auto& kind : config_kinds()) {
        Field root{"", Type::Object};
        root.children = fields_for(kind);
        json s = schema_of(root);
        s["title"] = kind;
        s["properties"]["kind"] = {{"const", kind}};
        variants.push_back(s);
    }
    return {{"$schema", "https://json-schema.org/draft/2020-12/schema"},
            {"title", "fohs experiment configuration"},
            {"oneOf", variants}};
}

ResetControlSystem LoopConfig::build() const {
    ResetControlSystem sys = build_closed_loop(plant, controller, reset, r, n_reset);
    if (!beta_row.empty()) {
        sys.beta_row = Eigen::Map<const RowVector>(beta_row.data(), static_cast<Eigen::Index>(beta_row.size()));
        sys.validate();
    }
    return sys;
}

std::vector<std::string> config_kinds() {
    return {"switching-analysis", "reset-analysis", "beta-sweep", "simulate-switched", "simulate-reset"};
}

FrequencyGrid parse_grid_spec(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ',');) {
        parts.push_back(item);
    }
    if (parts.size() != 3) {
        fail(ErrorKind::InvalidArgument, "--grid expects wmin,wmax,N, got '" + spec + "'");
    }
    FrequencyGrid g;
    try {
        std::size_t used = 0;
        g.omega_min = std::stod(parts[0], &used);
        if (used != parts[0].size()) {
            throw std::invalid_argument(parts[0]);
        }
        g.omega_max = std::stod(parts[1], &used);
        if (used != parts[1].size()) {
            throw std::invalid_argument(parts[1]);
        }
        const auto& p = parts[2];
        auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), g.points);
        if (ec != std::errc() || ptr != p.data() + p.size()) {
            throw std::invalid_argument(p);
        }
    } catch (const std::logic_error&) {
        fail(ErrorKind::InvalidArgument, "--grid expects wmin,wmax,N, got '" + spec + "'");
    }
    g.validate();
    return g;
}

ExperimentConfig parse_config(const std::string& text, const ConfigOverrides& overrides) {
    json raw;
    try {
        raw = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
        fail(ErrorKind::Schema, "line " + std::to_string(line) + ": malformed JSON: " + e.what());
    }
    if (!raw.is_object()) {
        fail(ErrorKind::Schema, "/: expected an object");
    }

    const Validator validator(text);
    std::vector<std::string> path;
    if (!raw.contains("kind")) {
        validator.error({"kind"}, "required field is missing");
    }
    {
        path = {"kind"};
        const auto kinds = config_kinds();
        if (!raw["kind"].is_string() ||
            std::find(kinds.begin(), kinds.end(), raw["kind"].get<std::string>()) == kinds.end()) {
            validator.error(path, "unknown experiment kind");
        }
        path.clear();
    }
    const std::string kind = raw["kind"].get<std::string>();

    if (overrides.out_dir) {
        raw["out_dir"] = overrides.out_dir->string();
    }
    if (overrides.seed) {
        raw["seed"] = *overrides.seed;
    }
    if (overrides.grid) {
        if (!uses_grid(kind)) {
            fail(ErrorKind::Schema, "--grid does not apply to kind " + kind);
        }
        raw["grid"] = {{"omega_min", overrides.grid->omega_min},
                       {"omega_max", overrides.grid->omega_max},
                       {"points", overrides.grid->points}};
    }

    ExperimentConfig cfg;
    cfg.effective = validator.object(raw, fields_for(kind), path);
    cfg.kind = kind;
    cfg.name = cfg.effective.at("name").get<std::string>();
    cfg.seed = cfg.effective.at("seed").get<std::uint64_t>();
    cfg.out_dir = cfg.effective.at("out_dir").get<std::string>();
    cfg.body = to_body(kind, cfg.effective, cfg.seed);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorKind::InvalidArgument, "cannot read config " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_config(buffer.str(), overrides);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Schema) {
            fail(ErrorKind::Schema, path.string() + ": " + e.detail());
        }
        throw;
    }
}

} // namespace fohs
