#include "commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <memory>
#include <mutex>
#include <thread>

#include "frag/constant_case.hpp"
#include "frag/errors.hpp"
#include "frag/linear_case.hpp"
#include "frag/oracle.hpp"
#include "frag/validation.hpp"

namespace fragsolve {

using nlohmann::ordered_json;

namespace {

std::string cell_text(const Cell& c) {
    if (std::holds_alternative<double>(c)) return fmt::format("{:.17g}", std::get<double>(c));
    if (std::holds_alternative<bool>(c)) return std::get<bool>(c) ? "true" : "false";
    return "";
}

ordered_json cell_json(const Cell& c) {
    if (std::holds_alternative<double>(c)) {
        const double v = std::get<double>(c);
        return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
    }
    if (std::holds_alternative<bool>(c)) return std::get<bool>(c);
    return nullptr;
}

// Runs f(i) for i < n on up to thread_cap() threads; rethrows the first failure.
template <class F>
void parallel_for(std::size_t n, F&& f) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_cap(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = n;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

bool constant_class(const frag::PhysicalParams& p) { return frag::classify(p) == frag::CaseClass::constant; }

// Closed-form solution at time t as a snapshot.
frag::DensitySnapshot closed_form(const Scenario& s, double t) {
    const frag::PhysicalParams& p = s.params;
    if (s.spurious_hat) {
        auto hat = std::make_shared<frag::Profile>(*s.spurious_hat);
        frag::DensitySnapshot snap;
        snap.t = t;
        snap.support_hi = std::numeric_limits<double>::infinity();
        snap.regular = [p, hat, t](double x) { return frag::spurious_solution(p, *hat, x, t); };
        return snap;
    }
    if (s.initial.is_dirac()) {
        const double x0 = *s.initial.x0;
        if (!constant_class(p)) return frag::solve_linear_monodisperse(p, x0, t);
        if (p.mode == frag::Mode::growth)
            throw frag::UnsupportedConfig("initial: a Dirac datum in constant growth mode is not supported");
        return frag::solve_constant_decay_monodisperse(p, x0, t);
    }
    auto u0 = std::make_shared<frag::Profile>(s.initial.profile());
    frag::DensitySnapshot snap;
    snap.t = t;
    snap.support_hi = std::numeric_limits<double>::infinity();
    if (constant_class(p)) {
        (void)frag::solve_constant(p, *u0, u0->lo(), t);  // raises for case (ii) before any row is written
        snap.regular = [p, u0, t](double x) { return frag::solve_constant(p, *u0, x, t); };
    } else {
        snap.regular = [p, u0, t](double x) { return frag::solve_linear(p, *u0, x, t); };
    }
    return snap;
}

double closed_moment(const Scenario& s, double pw, double t) {
    if (s.spurious_hat) return frag::spurious_moment(s.params, *s.spurious_hat, pw, t);
    if (!s.initial.is_dirac()) throw ConfigError("initial: closed-form moments need a Dirac or spurious datum");
    if (constant_class(s.params)) {
        if (s.params.mode == frag::Mode::growth)
            throw frag::UnsupportedConfig("initial: a Dirac datum in constant growth mode is not supported");
        return frag::moments_constant_decay(s.params, pw, t, *s.initial.x0);
    }
    return frag::moment_linear(s.params, pw, t, *s.initial.x0);
}

// Mass without any loss to zero size: transport of the first moment, and for
// the constant class the additional damping of the transformed equation.
double unshattered_mass(const Scenario& s, double t) {
    const frag::PhysicalParams& p = s.params;
    const double sk = frag::mode_sign(p.mode) * p.k;
    if (s.spurious_hat) return frag::spurious_moment(p, *s.spurious_hat, 1.0, 0.0) * std::exp(sk * t);
    const double x0 = *s.initial.x0;
    if (!constant_class(p)) return x0 * std::exp(sk * t);
    const double base = std::pow(x0, p.alpha) - p.k * p.alpha * t;
    if (!(base > 0.0)) return 0.0;
    return std::exp(-0.5 * p.k * p.a * p.alpha * t * t) * std::pow(base, 1.0 / p.alpha);
}

std::vector<double> positive_times(const std::vector<double>& times) {
    std::vector<double> out;
    for (double t : times)
        if (t > 0.0) out.push_back(t);
    return out;
}

ordered_json oracle_check(const Scenario& s, double tol) {
    const frag::PhysicalParams& p = s.params;
    const ValidationSpec& v = s.validation;
    const std::vector<double> times = positive_times(s.times);
    const frag::InitialCondition u0 = s.initial.condition();

    frag::OracleConfig cfg = v.oracle;
    cfg.times = times;
    cfg.t_end = times.back();
    const frag::OracleRun run = frag::integrate_pde(p, u0, cfg);

    std::vector<double> l1(times.size());
    parallel_for(times.size(), [&](std::size_t i) {
        const frag::DensitySnapshot exact = closed_form(s, times[i]);
        l1[i] = frag::l1_on_grid(run.values[i], exact.regular);
    });

    const frag::DensitySnapshot last = closed_form(s, times.back());
    std::vector<frag::ConvergenceStudy> parts(v.levels.size());
    parallel_for(v.levels.size(), [&](std::size_t i) {
        parts[i] = frag::convergence_study(p, u0, cfg, {v.levels[i]}, last.regular);
    });
    std::vector<double> level_l1, orders;
    for (const auto& st : parts) level_l1.push_back(st.l1.front());
    for (std::size_t i = 1; i < level_l1.size(); ++i) orders.push_back(std::log2(level_l1[i - 1] / level_l1[i]));

    bool pass = true;
    for (double d : l1) pass = pass && d <= tol;
    for (double q : orders) pass = pass && std::fabs(q - 2.0) <= v.order_tolerance;

    ordered_json levels = ordered_json::array();
    for (const auto& l : v.levels) levels.push_back({l.n, l.dt});
    ordered_json j;
    j["name"] = "oracle";
    j["grid"] = {{"x_min", cfg.grid.x_min}, {"x_max", cfg.grid.x_max}, {"n", cfg.grid.n}};
    j["dt"] = cfg.dt;
    j["times"] = times;
    j["l1"] = l1;
    j["tolerance"] = tol;
    j["levels"] = levels;
    j["level_l1"] = level_l1;
    j["orders"] = orders;
    j["order_tolerance"] = v.order_tolerance;
    j["outflow_mass"] = run.outflow_mass;
    j["warnings"] = run.warnings;
    j["pass"] = pass;
    return j;
}

ordered_json moment_check(const Scenario& s, std::vector<std::string>& warnings) {
    Table t = cmd_moments(s);
    warnings.insert(warnings.end(), t.warnings.begin(), t.warnings.end());
    ordered_json rows = ordered_json::array();
    bool pass = true;
    double worst = 0.0;
    for (const auto& r : t.rows) {
        const double closed = std::get<double>(r[2]), quad = std::get<double>(r[3]);
        const double rel = std::fabs(closed - quad) / std::max(std::fabs(closed), 1e-300);
        const double diff = closed == 0.0 && quad == 0.0 ? 0.0 : rel;
        worst = std::max(worst, diff);
        pass = pass && diff <= s.validation.moment_tolerance;
        rows.push_back({{"t", std::get<double>(r[0])}, {"p", std::get<double>(r[1])}, {"closed_form", closed},
                        {"quadrature", quad}, {"relative_diff", diff}});
    }
    ordered_json j;
    j["name"] = "moments";
    j["rows"] = rows;
    j["max_relative_diff"] = worst;
    j["tolerance"] = s.validation.moment_tolerance;
    j["pass"] = pass;
    return j;
}

ordered_json spurious_check(const Scenario& s) {
    const frag::PhysicalParams& p = s.params;
    auto pts = s.validation.residual_points;
    if (pts.empty())
        for (double t : {0.3, 0.6, 0.9, 1.2})
            for (double x : {0.4, 0.7, 1.0, 1.5, 2.0}) pts.emplace_back(x, t);
    const frag::Profile hat = *s.spurious_hat;
    std::vector<double> res(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
        res[i] = frag::relative_pde_residual(
            p, [&](double x, double t) { return frag::spurious_solution(p, hat, x, t); }, pts[i].first, pts[i].second);
    });
    const double worst = *std::max_element(res.begin(), res.end());

    ordered_json mass = ordered_json::array();
    bool anomaly = false;
    for (double t : positive_times(s.times)) {
        const double m = frag::spurious_moment(p, hat, 1.0, t), transport = unshattered_mass(s, t);
        const double dev = std::fabs(m - transport) / transport;
        anomaly = anomaly || dev > 0.01;
        mass.push_back({{"t", t}, {"mass", m}, {"transport", transport}, {"relative_deviation", dev}});
    }
    ordered_json pj = ordered_json::array();
    for (const auto& pt : pts) pj.push_back({pt.first, pt.second});
    ordered_json j;
    j["name"] = "spurious";
    j["residual_points"] = pj;
    j["residuals"] = res;
    j["max_residual"] = worst;
    j["tolerance"] = s.validation.residual_tolerance;
    j["mass"] = mass;
    j["mass_anomaly"] = anomaly;
    j["pass"] = worst < s.validation.residual_tolerance;
    return j;
}

ordered_json boundary_check(const Scenario& s) {
    const double r = frag::boundary_residual(s.params, s.initial.profile(), -5.0, 51);
    ordered_json j;
    j["name"] = "boundary";
    j["xi_range"] = {-5.0, 0.0};
    j["max_residual"] = r;
    j["tolerance"] = s.validation.boundary_tolerance;
    j["pass"] = r < s.validation.boundary_tolerance;
    return j;
}

}  // namespace

unsigned thread_cap() {
    if (const char* env = std::getenv("FRAGSOLVE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.header.size(); ++i) out += (i ? "," : "") + t.header[i];
    out += '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + cell_text(r[i]);
        out += '\n';
    }
    return out;
}

ordered_json to_json(const Table& t) {
    ordered_json rows = ordered_json::array();
    for (const auto& r : t.rows) {
        ordered_json o;
        for (std::size_t i = 0; i < r.size(); ++i) o[t.header[i]] = cell_json(r[i]);
        rows.push_back(std::move(o));
    }
    return rows;
}

std::string render(const Table& t, Format f) { return f == Format::csv ? to_csv(t) : to_json(t).dump(2) + "\n"; }

Table cmd_solve(const Scenario& s) {
    Table out;
    out.header = {"t", "x", "density", "dirac_location", "dirac_weight"};
    const std::vector<double> xs = s.x_eval.points();
    std::vector<frag::DensitySnapshot> snaps;
    for (double t : s.times) snaps.push_back(closed_form(s, t));
    std::optional<frag::InitialCondition> ic0;
    if (!s.spurious_hat && !s.initial.is_dirac()) ic0 = s.initial.condition();
    out.rows.resize(s.times.size() * xs.size());
    parallel_for(out.rows.size(), [&](std::size_t k) {
        const std::size_t it = k / xs.size(), ix = k % xs.size();
        const frag::DensitySnapshot& snap = snaps[it];
        Cell loc, weight;
        if (snap.dirac) {
            loc = snap.dirac->location;
            weight = snap.dirac->weight;
        }
        const double t = s.times[it], x = xs[ix];
        double density;
        if (t == 0.0 && !s.spurious_hat)
            density = ic0 ? ic0->density(x) : 0.0;
        else
            density = snap.regular ? snap.density(x) : 0.0;
        if (!std::isfinite(density)) throw frag::NumericError(fmt::format("density at t={}, x={} is not finite", t, x));
        out.rows[k] = {t, x, density, loc, weight};
    });
    return out;
}

Table cmd_moments(const Scenario& s) {
    Table out;
    out.header = {"t", "p", "closed_form", "quadrature", "abs_diff", "shattering_flag"};
    if (s.moments.empty()) throw ConfigError("moments: no p values given");
    if (!s.spurious_hat && !s.initial.is_dirac())
        throw ConfigError("initial: closed-form moments need a Dirac or spurious datum");

    // Admissibility first, serially, so warnings keep their order.
    std::vector<std::pair<double, double>> jobs;
    for (double t : s.times)
        for (double pw : s.moments) {
            try {
                (void)closed_moment(s, pw, t);
                jobs.emplace_back(t, pw);
            } catch (const frag::DomainError& e) {
                out.warnings.push_back(fmt::format("skipped t={} p={}: {}", t, pw, e.what()));
            }
        }
    out.rows.resize(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) {
        const auto [t, pw] = jobs[i];
        const double closed = closed_moment(s, pw, t);
        const double quad = frag::moment_of_snapshot(closed_form(s, t), pw, 1e-10).value;
        const bool shattered = pw == 1.0 && t > 0.0 && closed < unshattered_mass(s, t) * (1.0 - 1e-9);
        out.rows[i] = {t, pw, closed, quad, std::fabs(closed - quad), shattered};
    });
    return out;
}

ValidationReport cmd_validate(const Scenario& s, std::optional<double> tolerance) {
    const double tol = tolerance.value_or(s.validation.tolerance);
    ValidationReport rep;
    std::vector<std::string> warnings = s.warnings;
    ordered_json checks = ordered_json::array();

    const bool regular = !s.spurious_hat && !s.initial.is_dirac();
    if (s.spurious_hat) checks.push_back(spurious_check(s));
    if (!regular && !s.moments.empty()) checks.push_back(moment_check(s, warnings));
    if (regular && !positive_times(s.times).empty()) checks.push_back(oracle_check(s, tol));
    if (regular && constant_class(s.params) &&
        frag::constant_case(s.params) == frag::ConstantCase::growth_positive_alpha) {
        const double m = frag::derive(s.params).m;
        if (std::fabs(m - std::round(m)) < 1e-12) checks.push_back(boundary_check(s));
    }
    if (checks.empty()) throw ConfigError("validate: the scenario enables no check");

    for (const auto& c : checks) rep.pass = rep.pass && c["pass"].get<bool>();
    const frag::PhysicalParams& p = s.params;
    rep.json["scenario"] = s.name;
    rep.json["params"] = {{"alpha", p.alpha}, {"nu", p.nu},  {"gamma", p.gamma},
                          {"k", p.k},         {"a", p.a},    {"mode", p.mode == frag::Mode::growth ? "growth" : "decay"}};
    rep.json["checks"] = checks;
    rep.json["warnings"] = warnings;
    rep.json["pass"] = rep.pass;
    return rep;
}

}  // namespace fragsolve
