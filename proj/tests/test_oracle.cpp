#include <doctest.h>

#include <cmath>
#include <random>

#include "frag/constant_case.hpp"
#include "frag/errors.hpp"
#include "frag/linear_case.hpp"
#include "frag/oracle.hpp"
#include "frag/validation.hpp"
#include "oracles.hpp"

using namespace frag;

namespace {

PhysicalParams params(double alpha, double nu, double gamma, Mode mode) {
    PhysicalParams p;
    p.alpha = alpha;
    p.nu = nu;
    p.gamma = gamma;
    p.mode = mode;
    return p;
}

double bump(double x, double c, double w) { return std::exp(-0.5 * (x - c) * (x - c) / (w * w)); }

InitialCondition sampled_bump(double c, double w) {
    return InitialCondition::sample([=](double x) { return bump(x, c, w); }, c - 6 * w, c + 6 * w, 4000);
}

// Foot of the characteristic dx/dt = s k x^gamma through (x, t), by RK4 backwards.
double foot(const PhysicalParams& p, double x, double t) {
    const double s = mode_sign(p.mode);
    auto f = [&](double v) { return -s * p.k * std::pow(v, p.gamma); };
    const int steps = 2000;
    const double h = t / steps;
    for (int i = 0; i < steps; ++i) {
        const double k1 = f(x), k2 = f(x + 0.5 * h * k1), k3 = f(x + 0.5 * h * k2), k4 = f(x + h * k3);
        x += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        if (!(x > 0.0) || !std::isfinite(x)) return std::nan("");
    }
    return x;
}

}  // namespace

TEST_CASE("grid and configuration") {
    const LogGrid g{1e-3, 20.0, 128};
    const auto x = g.points();
    CHECK(x.size() == 128);
    CHECK(x.front() == 1e-3);
    CHECK(x.back() == 20.0);
    CHECK(std::log(x[1] / x[0]) == doctest::Approx(g.h()).epsilon(1e-12));

    OracleConfig c;
    CHECK_NOTHROW(c.validate());
    c.grid.n = 32;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("grid.n"), ParamError);
    c = OracleConfig{};
    c.dt = 0.0;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("dt"), ParamError);
    c = OracleConfig{};
    c.times = {0.3, 0.2};
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("times"), ParamError);
    c = OracleConfig{};
    c.grid.x_min = 0.0;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("x_min"), ParamError);

    CHECK_THROWS_AS(integrate_pde(params(1, 0, 1, Mode::growth), InitialCondition::monodisperse(1.0), OracleConfig{}),
                    ParamError);
}

TEST_CASE("transport only") {
    for (const PhysicalParams p : {params(3, -1.5, 1.0, Mode::growth), params(2.0 / 3, -1.0 / 3, 1.0 / 3, Mode::growth),
                                   params(-1.0 / 3, -4.0 / 3, 4.0 / 3, Mode::decay),
                                   params(2.0 / 3, -1.0 / 3, 1.0 / 3, Mode::decay)}) {
        OracleConfig c;
        c.grid = {1e-2, 10.0, 1024};
        c.dt = 1e-3;
        c.t_end = 0.5;
        c.fragmentation = false;
        const OracleRun run = integrate_pde(p, sampled_bump(2.0, 0.2), c);
        const double err = l1_on_grid(run.values.back(), [&](double x) {
            const double X = foot(p, x, 0.5);
            return std::isfinite(X) ? bump(X, 2.0, 0.2) * std::pow(X / x, p.gamma) : 0.0;
        });
        INFO("gamma=", p.gamma);
        CHECK(err < 1e-4);
    }
}

TEST_CASE("fragmentation only conserves mass") {
    const PhysicalParams p = params(1, 0, 1, Mode::growth);
    OracleConfig c;
    c.grid = {1e-4, 60.0, 1024};
    c.dt = 1e-3;
    c.t_end = 1.0;
    c.times = {0.25, 0.5, 1.0};
    c.transport = false;
    const InitialCondition u0 = InitialCondition::sample([](double x) { return std::exp(-x); }, 1e-4, 60.0, 4000);
    const OracleRun run = integrate_pde(p, u0, c);
    for (const GridFunction& g : run.values) {
        double m = 0.0;
        const auto& x = g.grid();
        for (std::size_t i = 0; i < x.size(); ++i)
            m += ((i == 0 || i + 1 == x.size()) ? 0.5 : 1.0) * x[i] * x[i] * g.values()[i];
        m *= c.grid.h();
        CHECK(std::fabs(m - 1.0) < 1e-4);
    }
    CHECK(run.outflow_mass.back() == 0.0);
}

TEST_CASE("nonnegative data stay nonnegative") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uc(0.5, 3.0), uw(0.05, 0.4);
    for (int trial = 0; trial < 6; ++trial) {
        const double c1 = uc(rng), w1 = uw(rng), c2 = uc(rng), w2 = uw(rng);
        const InitialCondition u0 = InitialCondition::sample(
            [=](double x) { return bump(x, c1, w1) + 0.5 * bump(x, c2, w2); }, 0.05, 5.0, 2000);
        const Mode mode = trial % 2 ? Mode::growth : Mode::decay;
        const PhysicalParams p = trial < 3 ? params(2, -0.5, 1.0, mode) : params(2.0 / 3, -1.0 / 3, 1.0 / 3, mode);
        OracleConfig c;
        c.grid = {1e-3, 20.0, 256};
        c.dt = 4e-3;
        c.times = {0.1, 0.5};
        const OracleRun run = integrate_pde(p, u0, c);
        for (const GridFunction& g : run.values)
            for (double v : g.values()) {
                CHECK(std::isfinite(v));
                CHECK(v >= 0.0);
            }
    }
}

TEST_CASE("linear growth against the closed form") {
    const PhysicalParams p = params(3, -1.5, 1.0, Mode::growth);
    const Profile exact0 = Profile::smooth([](double x) { return bump(x, 2.0, 0.2); }, 0.8, 3.2, 48);
    OracleConfig c;
    c.grid = {1e-3, 20.0, 1024};
    c.t_end = 0.5;
    const ConvergenceStudy st = convergence_study(p, sampled_bump(2.0, 0.2), c, {{512, 2e-3}, {1024, 1e-3}, {2048, 5e-4}},
                                                  [&](double x) { return solve_linear(p, exact0, x, 0.5); });
    MESSAGE("L1 ", st.l1[0], " ", st.l1[1], " ", st.l1[2], " orders ", st.orders[0], " ", st.orders[1]);
    CHECK(st.l1[1] <= 1e-3);
    for (double q : st.orders) CHECK(std::fabs(q - 2.0) <= 0.4);
}

TEST_CASE("constant decay against the closed form") {
    const PhysicalParams p = params(2.0 / 3, -1.0 / 3, 1.0 / 3, Mode::decay);
    const Profile exact0 = Profile::smooth([](double x) { return bump(x, 1.5, 0.2); }, 0.3, 2.7, 48);
    OracleConfig c;
    c.grid = {1e-3, 10.0, 1024};
    c.t_end = 0.5;
    const ConvergenceStudy st =
        convergence_study(p, sampled_bump(1.5, 0.2), c, {{512, 2e-3}, {1024, 1e-3}, {2048, 5e-4}},
                          [&](double x) { return solve_constant_decay(p, exact0, x, 0.5); });
    MESSAGE("L1 ", st.l1[0], " ", st.l1[1], " ", st.l1[2], " orders ", st.orders[0], " ", st.orders[1]);
    CHECK(st.l1[1] <= 1e-3);
    for (double q : st.orders) CHECK(std::fabs(q - 2.0) <= 0.4);
}

TEST_CASE("constant growth with inflow from zero against the closed form") {
    // alpha = 1: the region xi < 0 is filled through the boundary construction.
    const PhysicalParams p = params(1, 0, 0, Mode::growth);
    const Profile exact0 = Profile::smooth([](double x) { return bump(x, 1.0, 0.1); }, 0.4, 1.6, 48);
    OracleConfig c;
    c.grid = {1e-5, 10.0, 2048};
    c.t_end = 0.5;
    const ConvergenceStudy st =
        convergence_study(p, sampled_bump(1.0, 0.1), c, {{1024, 4e-3}, {2048, 2e-3}, {4096, 1e-3}},
                          [&](double x) { return solve_constant(p, exact0, x, 0.5); });
    MESSAGE("L1 ", st.l1[0], " ", st.l1[1], " ", st.l1[2], " orders ", st.orders[0], " ", st.orders[1]);
    CHECK(st.l1[1] <= 1e-3);
    for (double q : st.orders) CHECK(std::fabs(q - 2.0) <= 0.4);
    const OracleRun run = integrate_pde(p, sampled_bump(1.0, 0.1), c);
    for (double v : run.values[0].values()) CHECK(v >= 0.0);
}

TEST_CASE("output times") {
    const PhysicalParams p = params(2, -0.5, 1.0, Mode::growth);
    OracleConfig c;
    c.grid = {1e-3, 20.0, 256};
    c.dt = 2e-3;
    c.t_end = 0.5;
    c.times = {0.1, 0.25, 0.5};
    const OracleRun several = integrate_pde(p, sampled_bump(1.0, 0.15), c);
    REQUIRE(several.snapshots.size() == 3);
    CHECK(several.snapshots[1].t == 0.25);
    c.times.clear();
    const OracleRun once = integrate_pde(p, sampled_bump(1.0, 0.15), c);
    REQUIRE(once.snapshots.size() == 1);
    const GridFunction& a = several.values.back();
    const double diff = l1_on_grid(a, [&](double x) { return once.values.back()(x); });
    CHECK(diff < 1e-6 * l1_on_grid(a, [](double) { return 0.0; }));
}

TEST_CASE("domain exit is reported") {
    const PhysicalParams p = params(2.0 / 3, -1.0 / 3, 1.0 / 3, Mode::decay);
    OracleConfig c;
    c.grid = {1e-2, 5.0, 128};
    c.dt = 1e-2;
    c.t_end = 1.5;
    const OracleRun run = integrate_pde(p, sampled_bump(0.6, 0.09), c);
    REQUIRE_FALSE(run.warnings.empty());
    CHECK(run.warnings[0].find("domain exit") != std::string::npos);
    CHECK(run.outflow_mass.back() > 0.0);
}

TEST_CASE("snapshot moments") {
    DensitySnapshot d = DensitySnapshot::zero(0.0);
    d.dirac = Dirac{2.0, 1.0};
    CHECK(moment_of_snapshot(d, 1.0).value == 2.0);

    DensitySnapshot box;
    box.regular = [](double) { return 1.0; };
    box.support_lo = 0.0;
    box.support_hi = 1.0;
    const MomentEstimate m0 = moment_of_snapshot(box, 0.0);
    CHECK(m0.value == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(m0.error < 1e-10);

    PhysicalParams p = params(3, -1.5, 1.0, Mode::growth);
    const MomentEstimate m1 = moment_of_snapshot(solve_linear_monodisperse(p, 2.0, 0.5), 1.0);
    CHECK(oracle::rel(m1.value, 2.0 * std::exp(0.5)) < 1e-6);

    CHECK_THROWS_AS(moment_of_snapshot(box, -0.5), DomainError);
}

TEST_CASE("weighted norms") {
    std::vector<double> grid(2001);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = 40.0 * static_cast<double>(i) / 2000.0;
    const GridFunction f = GridFunction::sample([](double x) { return std::exp(-2 * x); }, grid);
    const WeightedNorm n = weighted_norm(f, 0.0, 1.0, 1);
    CHECK(n.value == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_FALSE(n.diverging);

    std::vector<double> unit(101);
    for (std::size_t i = 0; i < unit.size(); ++i) unit[i] = static_cast<double>(i) / 100.0;
    const GridFunction one = GridFunction::sample([](double) { return 1.0; }, unit);
    CHECK(weighted_norm(one, 1.0, 0.0, 1).value == doctest::Approx(0.5).epsilon(1e-13));

    const GridFunction flat = GridFunction::sample([](double) { return 1.0; }, grid);
    CHECK(weighted_norm(flat, 0.0, 1.0, 1).diverging);
    CHECK_THROWS_AS(weighted_norm(flat, 0.0, 1.0, 0), ParamError);

    // |J+ f| in X_rho is at most |f| / rho.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uc(2.0, 7.0), uw(0.1, 0.6), ua(-1.0, 1.0);
    std::vector<double> g10(801);
    for (std::size_t i = 0; i < g10.size(); ++i) g10[i] = 12.0 * static_cast<double>(i) / 800.0;
    for (int trial = 0; trial < 20; ++trial) {
        const double c1 = uc(rng), w1 = uw(rng), a1 = ua(rng), c2 = uc(rng), w2 = uw(rng), a2 = ua(rng);
        const GridFunction r =
            GridFunction::sample([=](double x) { return a1 * bump(x, c1, w1) + a2 * bump(x, c2, w2); }, g10);
        const GridFunction jr = apply_J_power(r, 1, Direction::plus);
        for (double rho : {0.5, 1.0, 2.0})
            CHECK(weighted_norm(jr, 0.0, rho, 1).value <= weighted_norm(r, 0.0, rho, 1).value / rho * (1 + 1e-9));
    }
}

TEST_CASE("weighted norms along a run") {
    OracleConfig c;
    c.grid = {1e-3, 20.0, 256};
    c.dt = 4e-3;
    c.times = {0.2, 0.5};
    c.weight = NormWeight{1.0, 0.5, 1};
    const OracleRun run = integrate_pde(params(2, -0.5, 1.0, Mode::growth), sampled_bump(1.0, 0.15), c);
    REQUIRE(run.weighted_norms.size() == 2);
    CHECK(run.weighted_norms[1] == doctest::Approx(weighted_norm(run.values[1], 1.0, 0.5, 1).value).epsilon(1e-15));
}
