// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <fmt/format.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "commands.hpp"
#include "frag/constant_case.hpp"
#include "frag/linear_case.hpp"
#include "frag/operator_core.hpp"
#include "frag/oracle.hpp"
#include "frag/quadrature.hpp"
#include "frag/specfun.hpp"
#include "frag/validation.hpp"
#include "scenario.hpp"

#ifndef FRAGSOLVE_SCENARIO_DIR
#define FRAGSOLVE_SCENARIO_DIR "scenarios"
#endif

using namespace frag;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

double rel(double got, double want) { return std::fabs(got - want) / std::max(std::fabs(want), 1e-300); }

double bump(double x, double c, double w) { return std::exp(-0.5 * (x - c) * (x - c) / (w * w)); }

PhysicalParams params(double alpha, double nu, double gamma, Mode mode, double k = 1.0, double a = 1.0) {
    PhysicalParams p;
    p.alpha = alpha;
    p.nu = nu;
    p.gamma = gamma;
    p.k = k;
    p.a = a;
    p.mode = mode;
    return p;
}

Outcome specfun_identities() {
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> ua(-5, 5), ub(0.5, 6), uz(-30, 30);
    double kummer = 0.0, deriv = 0.0, integral = 0.0;
    for (int i = 0; i < 500; ++i) {
        const double a = ua(rng), b = ub(rng), z = uz(rng);
        const double lhs = kummer_1f1(a, b, z);
        kummer = std::max(kummer, std::fabs(lhs - std::exp(z) * kummer_1f1(b - a, b, -z)) / (1 + std::fabs(lhs)));
    }
    for (int i = 0; i < 500; ++i) {
        const double a = ua(rng), b = ub(rng), z = uz(rng), h = 1e-5;
        const double fd = (kummer_1f1(a, b, z + h) - kummer_1f1(a, b, z - h)) / (2 * h);
        const double want = a / b * kummer_1f1(a + 1, b + 1, z);
        const double scale = std::max(std::fabs(want), 1e-4 * std::max(1.0, std::fabs(kummer_1f1(a, b, z))));
        deriv = std::max(deriv, std::fabs(fd - want) / scale);
    }
    std::uniform_real_distribution<double> ia(-3, 3), ip(-0.9, 3), ix(0.05, 8);
    boost::math::quadrature::tanh_sinh<double> ts;
    for (int done = 0; done < 500;) {
        const double a = ia(rng), p = ip(rng), x = ix(rng);
        if (std::fabs(a) < 0.05) continue;
        ++done;
        const double quad = ts.integrate([&](double y) { return std::pow(y, p) * kummer_1f1(a + 1, 2, x - y); }, 0.0, x);
        integral = std::max(integral, rel(quad, std::pow(x, p) / a * (kummer_1f1(a, p + 1, x) - 1)));
    }
    return {kummer <= 1e-9 && deriv <= 1e-6 && integral <= 1e-7,
            fmt::format("500 trials each: Kummer {:.1e} (1e-9), derivative {:.1e} (1e-6), integral {:.1e} (1e-7)",
                        kummer, deriv, integral)};
}

Outcome no_shattering() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ua(0.05, 4.0), un(-1.9, 0.0), uk(0.2, 2.0), uA(0.2, 2.0), ux(0.3, 3.0),
        ut(0.01, 2.0);
    double closed = 0.0, quad = 0.0;
    for (int i = 0; i < 20; ++i) {
        const Mode mode = i % 2 ? Mode::growth : Mode::decay;
        const PhysicalParams p = params(ua(rng), un(rng), 1.0, mode, uk(rng), uA(rng));
        const double x0 = ux(rng), t = ut(rng);
        const double want = std::exp(mode_sign(mode) * p.k * t) * x0;
        closed = std::max(closed, std::fabs(moment_linear(p, 1.0, t, x0) - want));
        quad = std::max(quad, rel(moment_of_snapshot(solve_linear_monodisperse(p, x0, t), 1.0).value, want));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {closed <= 1e-10 && quad <= 1e-6 && secs < 10.0,
            fmt::format("20 draws: closed form {:.1e} (1e-10), quadrature {:.1e} (1e-6), {:.2f} s (< 10 s)", closed,
                        quad, secs)};
}

Outcome shattering() {
    const PhysicalParams dec = params(-3, -1.5, 1.0, Mode::decay), gro = params(-3, -1.5, 1.0, Mode::growth);
    bool below = true;
    double quad = 0.0;
    std::string drops;
    for (double t : {0.2, 0.5, 1.0}) {
        const double m1 = moment_linear(dec, 1.0, t, 2.0);
        below = below && m1 < 2 * std::exp(-t);
        quad = std::max(quad, rel(moment_of_snapshot(solve_linear_monodisperse(dec, 2.0, t), 1.0).value, m1));
        drops += fmt::format(" {:.4f}/{:.4f}", m1, 2 * std::exp(-t));
    }
    const double grow = moment_linear(gro, 1.0, 5.0, 2.0);
    return {below && quad <= 1e-6 && grow > 20.0,
            fmt::format("decay M1 vs 2e^-t:{}; quadrature {:.1e} (1e-6); growth M1(5) = {:.3f} (> 20)", drops, quad,
                        grow)};
}

Outcome worked_example() {
    const PhysicalParams p = params(-1.0 / 3, -4.0 / 3, 4.0 / 3, Mode::decay);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux0(0.3, 4.0), ut(0.05, 3.0), ufrac(0.02, 0.98);
    double regular = 0.0, dirac = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double x0 = ux0(rng), t = ut(rng);
        const double c0 = std::cbrt(x0), xd = 27 * x0 / std::pow(t * c0 + 3, 3);
        const double weight = std::exp(-t * (1 / c0 + t / 6));
        const double x = ufrac(rng) * xd;
        const double want = weight * t / (3 * std::pow(x, 4.0 / 3)) * (2 + t * (1 / std::cbrt(x) - 1 / c0 - t / 3));
        const DensitySnapshot s = solve_constant_monodisperse(p, x0, t);
        regular = std::max(regular, rel(s.density(x), want));
        dirac = std::max({dirac, rel(s.dirac->location, xd), rel(s.dirac->weight, weight)});
    }
    return {regular <= 1e-10 && dirac <= 1e-12,
            fmt::format("50 points: regular part {:.1e} (1e-10), Dirac {:.1e} (1e-12)", regular, dirac)};
}

Outcome boundary_construction() {
    const Profile w0 = Profile::smooth([](double x) { return bump(x, 1.0, 0.1); }, 0.4, 1.6, 24);
    double boundary = 0.0, hermite = 0.0, exponent_margin = -1e300;
    std::string exponents;
    for (int m = 1; m <= 3; ++m) {
        const BoundaryCorrection bc = BoundaryCorrection::from_profile(m, 1.0, w0);
        for (int i = 0; i < 100; ++i) {
            const double xi = -5.0 + 0.05 * i, t = -xi;
            const double w = binomial_power(w0, t, m, Direction::plus, xi) + bc.correction(xi, t);
            boundary = std::max(boundary, std::fabs(w));
        }
        for (double zeta = -6.0; zeta <= 6.0; zeta += 0.25) {
            double scale = std::fabs(std::exp(0.5 * zeta * zeta) * bc.g(zeta));
            for (int k = 0; k <= m; ++k) scale = std::max(scale, std::fabs(bc.y_derivative(k, zeta)));
            hermite = std::max(hermite, std::fabs(bc.hermite_residual(zeta)) / std::max(scale, 1.0));
        }
        double worst = -1e300;
        for (double xi = -20.0; xi <= -5.0; xi += 0.5)
            worst = std::max(worst, std::log(std::fabs(bc.psi(xi))) / std::log(-xi));
        exponent_margin = std::max(exponent_margin, worst - (3 * m - 2 + 0.2));
        exponents += fmt::format(" m={}: {:.2f}", m, worst);
    }
    return {boundary < 1e-6 && hermite < 1e-8 && exponent_margin <= 0.0,
            fmt::format("|w+| on boundary {:.1e} (1e-6), Hermite residual {:.1e} (1e-8), psi exponent{} (<= 3m-2+0.2)",
                        boundary, hermite, exponents)};
}

Outcome oracle_cross_validation() {
    struct Run {
        const char* name;
        PhysicalParams p;
        double centre, width, x_max;
        std::function<double(const PhysicalParams&, const Profile&, double)> exact;
    };
    const std::vector<Run> runs{
        {"linear", params(3, -1.5, 1.0, Mode::growth), 2.0, 0.2, 20.0,
         [](const PhysicalParams& p, const Profile& u0, double x) { return solve_linear(p, u0, x, 0.5); }},
        {"constant decay", params(2.0 / 3, -1.0 / 3, 1.0 / 3, Mode::decay), 1.5, 0.2, 10.0,
         [](const PhysicalParams& p, const Profile& u0, double x) { return solve_constant_decay(p, u0, x, 0.5); }},
    };
    bool pass = true;
    std::string detail;
    for (const Run& r : runs) {
        const double c = r.centre, w = r.width;
        const Profile exact0 = Profile::smooth([=](double x) { return bump(x, c, w); }, c - 6 * w, c + 6 * w, 48);
        const InitialCondition u0 = InitialCondition::sample([=](double x) { return bump(x, c, w); }, c - 6 * w, c + 6 * w, 4000);
        OracleConfig cfg;
        cfg.grid = {1e-3, r.x_max, 1024};
        cfg.t_end = 0.5;
        const ConvergenceStudy st = convergence_study(r.p, u0, cfg, {{512, 2e-3}, {1024, 1e-3}, {2048, 5e-4}},
                                                      [&](double x) { return r.exact(r.p, exact0, x); });
        pass = pass && st.l1[1] <= 1e-3;
        for (double q : st.orders) pass = pass && std::fabs(q - 2.0) <= 0.4;
        detail += fmt::format("{}{}: L1 {:.2e} at n=1024, dt=1e-3 (1e-3), orders {:.2f} {:.2f} (2.0 +- 0.4)",
                              detail.empty() ? "" : "; ", r.name, st.l1[1], st.orders[0], st.orders[1]);
    }
    return {pass, detail};
}

Outcome operator_equivalence() {
    const auto xs = quad::uniform_breaks(0.0, 2.5, 500);
    auto f = [](double x) { return std::exp(-8 * (x - 1) * (x - 1)); };
    const GridFunction u0 = GridFunction::sample(f, xs);
    const Profile prof = Profile::smooth(f, 0.0, 2.5, 20);
    double worst = 0.0;
    for (int m = 1; m <= 3; ++m) {
        for (KernelFamily fam : {KernelFamily::exp_neg, KernelFamily::exp_pos}) {
            const SeriesKernel k = build_kernel(fam, m);
            const Direction dir = k.sg > 0 ? Direction::plus : Direction::minus;
            const double t = 0.4;
            const GridFunction lem = lemma21_solution(k, u0, t, dir);
            const GridFunction bin = GridFunction::sample(
                [&](double x) { return dir == Direction::plus ? binomial_power(prof, t, m, dir, x) : brp(prof, t, m, x); },
                xs);
            const GridFunction vol = volterra_oracle(k, u0, t, 256, dir).u;
            worst = std::max({worst, l1_distance(lem, bin), l1_distance(lem, vol), l1_distance(bin, vol)});
        }
    }
    const auto gs = quad::uniform_breaks(0.0, 4.0, 800);
    const GridFunction g = GridFunction::sample([](double x) { return x * std::exp(-2 * x); }, gs);
    double residual = 0.0;
    for (Direction dir : {Direction::plus, Direction::minus}) {
        const double t = 0.5, lambda = 1.0;
        const GridFunction r = resolvent(g, t, lambda, dir);
        const std::vector<double> jr = exp_kernel_J(r, 0.0, dir);
        std::vector<double> lhs(gs.size());
        for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] = lambda * r.values()[i] - t * jr[i];
        residual = std::max(residual, l1_distance(GridFunction(gs, lhs), g));
    }
    return {worst <= 1e-4 && residual < 1e-8,
            fmt::format("m = 1..3, both signs: max pairwise L1 {:.1e} (1e-4); resolvent residual {:.1e} (1e-8)", worst,
                        residual)};
}

Outcome spurious_family() {
    const PhysicalParams p = params(2, -0.5, 1.0, Mode::growth);
    const Profile hat = Profile::smooth([](double m) { return bump(m, 1.0, 0.1); }, 0.5, 1.5, 20);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double x = 0.2 + 0.15 * (i % 10), t = i < 10 ? 0.4 : 0.9;
        worst = std::max(worst, relative_pde_residual(p, [&](double xx, double tt) { return spurious_solution(p, hat, xx, tt); }, x, t));
    }
    const double t = 1.0, m1 = spurious_moment(p, hat, 1.0, t);
    const double transport = std::exp(p.k * t) * spurious_moment(p, hat, 1.0, 0.0);
    const double deviation = std::fabs(m1 - transport) / transport;
    return {worst < 1e-5 && deviation > 0.01,
            fmt::format("20 points: residual {:.1e} (1e-5); mass at t=1 deviates {:.1f}% from transport (> 1%)", worst,
                        100 * deviation)};
}

Outcome figures() {
    using fragsolve::Table;
    bool pass = true;
    std::string detail;
    for (const char* name : {"fig1", "fig2"}) {
        const fragsolve::Figure fig = fragsolve::load_figure(fmt::format("{}/{}.yaml", FRAGSOLVE_SCENARIO_DIR, name));
        int checked = 0;
        for (const fragsolve::Scenario& panel : fig.panels) {
            setenv("FRAGSOLVE_THREADS", "1", 1);
            const Table serial = fragsolve::cmd_moments(panel);
            setenv("FRAGSOLVE_THREADS", "4", 1);
            const std::string again = fragsolve::to_csv(fragsolve::cmd_moments(panel));
            pass = pass && again == fragsolve::to_csv(serial) && again == fragsolve::to_csv(fragsolve::cmd_moments(panel));

            std::vector<std::pair<double, double>> mass;
            std::vector<bool> flags;
            for (const auto& row : serial.rows) {
                if (std::get<double>(row[1]) != 1.0) continue;
                mass.emplace_back(std::get<double>(row[0]), std::get<double>(row[2]));
                flags.push_back(std::get<bool>(row[5]));
            }
            const int s = mode_sign(panel.params.mode);
            bool ok = mass.size() > 2;
            for (std::size_t i = 1; i < mass.size(); ++i) {
                const double prev = mass[i - 1].second, cur = mass[i].second;
                // Decay: strictly falling while mass remains, then identically 0.
                const bool falling = prev > 0.0 ? cur < prev : cur == 0.0;
                if (panel.params.alpha > 0)
                    ok = ok && !flags[i] && (s > 0 ? cur > prev : falling);
                else
                    ok = ok && flags[i] && (s > 0 || falling);
            }
            pass = pass && ok;
            ++checked;
            if (!ok) detail += fmt::format(" [{} {} fails]", name, panel.name);
        }
        detail += fmt::format("{}{}: {} panels", detail.empty() ? "" : ", ", name, checked);
    }
    unsetenv("FRAGSOLVE_THREADS");
    return {pass, detail + "; monotone mass for alpha > 0, shattering drop for alpha < 0, identical CSV across runs"};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"special-function identities", specfun_identities},
        {"no shattering for alpha > 0", no_shattering},
        {"shattering for alpha = -3", shattering},
        {"worked constant-class example", worked_example},
        {"boundary construction", boundary_construction},
        {"oracle cross-validation", oracle_cross_validation},
        {"operator-calculus equivalence", operator_equivalence},
        {"spurious family", spurious_family},
        {"figure tables", figures},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, fmt::format("threw: {}", e.what())};
        }
        failed += !o.pass;
        fmt::print("criterion {} {}: {} | {}\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
