#include "scenario.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "frag/errors.hpp"

namespace fragsolve {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ConfigError(fmt::format("{}: {}", field, what));
}

template <class T>
T get(const YAML::Node& node, const std::string& key, const std::string& path) {
    const std::string field = path.empty() ? key : path + "." + key;
    if (!node[key]) fail(field, "missing");
    try {
        return node[key].as<T>();
    } catch (const YAML::Exception&) {
        fail(field, "has the wrong type");
    }
}

template <class T>
T get_or(const YAML::Node& node, const std::string& key, const std::string& path, T fallback) {
    return node[key] ? get<T>(node, key, path) : fallback;
}

frag::PhysicalParams parse_params(const YAML::Node& n) {
    if (!n || !n.IsMap()) fail("params", "missing or not a table");
    frag::PhysicalParams p;
    p.alpha = get<double>(n, "alpha", "params");
    p.nu = get<double>(n, "nu", "params");
    p.gamma = get<double>(n, "gamma", "params");
    p.k = get_or<double>(n, "k", "params", 1.0);
    p.a = get_or<double>(n, "a", "params", 1.0);
    const std::string mode = get<std::string>(n, "mode", "params");
    if (mode == "growth") p.mode = frag::Mode::growth;
    else if (mode == "decay") p.mode = frag::Mode::decay;
    else fail("params.mode", "must be growth or decay");
    try {
        p.validate();
    } catch (const frag::ParamError& e) {
        throw ConfigError(std::string("params.") + e.what());
    }
    if (frag::classify(p) == frag::CaseClass::unsupported)
        fail("params", "neither gamma = 1 nor the constant class (gamma + alpha = 1, gamma + nu = 0)");
    return p;
}

InitialSpec parse_initial(const YAML::Node& n) {
    if (!n || !n.IsMap()) fail("initial", "missing or not a table");
    InitialSpec s;
    if (n["dirac"]) {
        s.x0 = get<double>(n, "dirac", "initial");
        if (!(*s.x0 > 0.0)) fail("initial.dirac", "location must be > 0");
        return s;
    }
    if (n["gaussian"]) {
        const YAML::Node g = n["gaussian"];
        const double c = get<double>(g, "center", "initial.gaussian");
        const double w = get<double>(g, "width", "initial.gaussian");
        if (!(w > 0.0)) fail("initial.gaussian.width", "must be > 0");
        s.lo = get_or<double>(g, "lo", "initial.gaussian", std::max(c - 6 * w, 0.0));
        s.hi = get_or<double>(g, "hi", "initial.gaussian", c + 6 * w);
        if (!(s.lo > 0.0 && s.hi > s.lo)) fail("initial.gaussian", "needs 0 < lo < hi");
        s.samples = get_or<int>(g, "samples", "initial.gaussian", 4000);
        if (s.samples < 4) fail("initial.gaussian.samples", "must be >= 4");
        s.density = [c, w](double x) { return std::exp(-0.5 * (x - c) * (x - c) / (w * w)); };
        return s;
    }
    if (n["samples"]) {
        const YAML::Node t = n["samples"];
        frag::Sampled sm{get<std::vector<double>>(t, "grid", "initial.samples"),
                         get<std::vector<double>>(t, "values", "initial.samples")};
        try {
            (void)frag::InitialCondition::sampled(sm.grid, sm.values);
        } catch (const frag::ParamError& e) {
            throw ConfigError(std::string("initial.samples.") + e.what());
        }
        s.lo = sm.grid.front();
        s.hi = sm.grid.back();
        s.table = std::move(sm);
        return s;
    }
    fail("initial", "needs one of dirac, gaussian, samples");
}

std::vector<double> parse_times(const YAML::Node& n) {
    if (!n) fail("times", "missing");
    std::vector<double> t;
    if (n.IsSequence()) {
        t = n.as<std::vector<double>>();
    } else if (n.IsMap()) {
        const double from = get<double>(n, "from", "times"), to = get<double>(n, "to", "times");
        const double step = get<double>(n, "step", "times");
        if (!(step > 0.0) || !(to >= from)) fail("times", "needs step > 0 and to >= from");
        const int count = static_cast<int>(std::floor((to - from) / step + 1e-9));
        for (int i = 0; i <= count; ++i) t.push_back(from + i * step);
    } else {
        fail("times", "must be a list or a {from, to, step} table");
    }
    if (t.empty()) fail("times", "is empty");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] >= 0.0) || !std::isfinite(t[i])) fail("times", "must be finite and nonnegative");
        if (i > 0 && !(t[i] > t[i - 1])) fail("times", "must be sorted ascending");
    }
    return t;
}

ValidationSpec parse_validation(const YAML::Node& n) {
    ValidationSpec v;
    v.oracle.grid = {1e-3, 20.0, 1024};
    v.oracle.dt = 1e-3;
    v.levels = {{512, 2e-3}, {1024, 1e-3}, {2048, 5e-4}};
    if (!n) return v;
    if (n["grid"]) {
        const YAML::Node g = n["grid"];
        v.oracle.grid.x_min = get_or<double>(g, "x_min", "validation.grid", v.oracle.grid.x_min);
        v.oracle.grid.x_max = get_or<double>(g, "x_max", "validation.grid", v.oracle.grid.x_max);
        v.oracle.grid.n = get_or<int>(g, "n", "validation.grid", v.oracle.grid.n);
    }
    v.oracle.dt = get_or<double>(n, "dt", "validation", v.oracle.dt);
    if (n["levels"]) {
        v.levels.clear();
        for (const auto& l : get<std::vector<std::vector<double>>>(n, "levels", "validation")) {
            if (l.size() != 2 || !(l[0] >= 64) || !(l[1] > 0)) fail("validation.levels", "entries are [n >= 64, dt > 0]");
            v.levels.push_back({static_cast<int>(l[0]), l[1]});
        }
    }
    v.tolerance = get_or<double>(n, "tolerance", "validation", v.tolerance);
    v.order_tolerance = get_or<double>(n, "order_tolerance", "validation", v.order_tolerance);
    v.moment_tolerance = get_or<double>(n, "moment_tolerance", "validation", v.moment_tolerance);
    v.residual_tolerance = get_or<double>(n, "residual_tolerance", "validation", v.residual_tolerance);
    v.boundary_tolerance = get_or<double>(n, "boundary_tolerance", "validation", v.boundary_tolerance);
    if (n["residual_points"]) {
        for (const auto& pt : get<std::vector<std::vector<double>>>(n, "residual_points", "validation")) {
            if (pt.size() != 2 || !(pt[0] > 0) || !(pt[1] > 0)) fail("validation.residual_points", "entries are [x > 0, t > 0]");
            v.residual_points.emplace_back(pt[0], pt[1]);
        }
    }
    return v;
}

Scenario parse_node(const YAML::Node& root) {
    if (!root || !root.IsMap()) fail("scenario", "must be a table");
    Scenario s;
    s.name = get_or<std::string>(root, "name", "", "scenario");
    s.params = parse_params(root["params"]);
    if (root["spurious"]) {
        const YAML::Node h = root["spurious"];
        const double c = get<double>(h, "center", "spurious"), w = get<double>(h, "width", "spurious");
        if (!(w > 0.0) || !(c - 5 * w > 0.0)) fail("spurious", "needs width > 0 and center - 5 width > 0");
        s.spurious_hat = frag::Profile::smooth(
            [c, w](double m) { return std::exp(-0.5 * (m - c) * (m - c) / (w * w)); }, c - 5 * w, c + 5 * w, 20);
        if (frag::classify(s.params) != frag::CaseClass::linear) fail("spurious", "needs gamma = 1");
    } else {
        s.initial = parse_initial(root["initial"]);
    }
    s.times = parse_times(root["times"]);
    if (root["x_eval"]) {
        const YAML::Node x = root["x_eval"];
        s.x_eval.lo = get_or<double>(x, "lo", "x_eval", s.x_eval.lo);
        s.x_eval.hi = get_or<double>(x, "hi", "x_eval", s.x_eval.hi);
        s.x_eval.n = get_or<int>(x, "n", "x_eval", s.x_eval.n);
        const std::string sp = get_or<std::string>(x, "spacing", "x_eval", "log");
        if (sp != "log" && sp != "linear") fail("x_eval.spacing", "must be log or linear");
        s.x_eval.log = sp == "log";
        if (!(s.x_eval.lo > 0.0 && s.x_eval.hi > s.x_eval.lo)) fail("x_eval", "needs 0 < lo < hi");
        if (s.x_eval.n < 2) fail("x_eval.n", "must be >= 2");
    }
    if (root["moments"]) {
        s.moments = get<std::vector<double>>(root, "moments", "");
        for (double p : s.moments)
            if (!(p >= 0.0)) fail("moments", "p values must be >= 0");
    }
    s.validate = get_or<bool>(root, "validate", "", false);
    s.validation = parse_validation(root["validation"]);
    if (root["output"]) {
        s.output_path = get_or<std::string>(root["output"], "path", "output", "");
        s.format = parse_format(get_or<std::string>(root["output"], "format", "output", "csv"));
    }
    return s;
}

YAML::Node load_yaml_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("config", fmt::format("cannot open '{}'", path));
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return YAML::Load(buf.str());
    } catch (const YAML::Exception& e) {
        fail("config", fmt::format("YAML error at line {}: {}", e.mark.line + 1, e.msg));
    }
}

}  // namespace

frag::Profile InitialSpec::profile() const {
    if (is_dirac()) throw ConfigError("initial: a Dirac datum has no density profile");
    if (table) return condition().profile();
    return frag::Profile::smooth(density, lo, hi, 48);
}

frag::InitialCondition InitialSpec::condition() const {
    if (is_dirac()) return frag::InitialCondition::monodisperse(*x0);
    if (table) return frag::InitialCondition::sampled(table->grid, table->values);
    return frag::InitialCondition::sample(density, lo, hi, samples);
}

std::vector<double> XEval::points() const {
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double f = static_cast<double>(i) / (n - 1);
        x[static_cast<std::size_t>(i)] = log ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f;
    }
    x.front() = lo;
    x.back() = hi;
    return x;
}

Format parse_format(const std::string& s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    fail("format", "must be csv or json");
}

Scenario parse_scenario(const std::string& yaml_text) {
    try {
        return parse_node(YAML::Load(yaml_text));
    } catch (const YAML::Exception& e) {
        fail("config", fmt::format("YAML error at line {}: {}", e.mark.line + 1, e.msg));
    }
}

Scenario load_scenario(const std::string& path) { return parse_node(load_yaml_file(path)); }

Figure load_figure(const std::string& path) {
    const YAML::Node root = load_yaml_file(path);
    Figure f;
    f.name = get<std::string>(root, "figure", "");
    if (!root["panels"] || !root["panels"].IsSequence()) fail("panels", "missing or not a list");
    for (std::size_t i = 0; i < root["panels"].size(); ++i) {
        try {
            f.panels.push_back(parse_node(root["panels"][i]));
        } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("panels[{}].{}", i, e.what()));
        }
    }
    return f;
}

}  // namespace fragsolve
