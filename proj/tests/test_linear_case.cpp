#include <doctest.h>

#include <cmath>
#include <random>

#include "frag/errors.hpp"
#include "frag/linear_case.hpp"
#include "frag/quadrature.hpp"
#include "oracles.hpp"

using namespace frag;

namespace {

PhysicalParams params(double alpha, double nu, Mode mode = Mode::growth, double k = 1.0, double a = 1.0) {
    PhysicalParams p;
    p.alpha = alpha;
    p.nu = nu;
    p.gamma = 1.0;
    p.k = k;
    p.a = a;
    p.mode = mode;
    return p;
}

Profile gaussian(double centre, double width, double half_span, int cells = 40) {
    return Profile::smooth(
        [centre, width](double x) { return std::exp(-0.5 * (x - centre) * (x - centre) / (width * width)); },
        centre - half_span, centre + half_span, cells);
}

// int x^p (Dirac + regular) for a monodisperse snapshot supported on
// [0, x_D]. The regular part behaves like x^nu (alpha > 0) or x^{-alpha-2}
// (alpha < 0) at the origin; x = x_D u^{1/e} absorbs that power.
double snapshot_moment(const DensitySnapshot& s, double alpha, double nu, double pw) {
    const double xd = s.dirac->location, lead = alpha > 0 ? nu : -alpha - 2.0, e = pw + lead + 1.0;
    const double body = oracle::tanh_sinh(
        [&](double u) {
            const double x = xd * std::pow(u, 1.0 / e);
            if (!(x > 1e-100)) return 0.0;
            return s.regular(x) / std::pow(x, lead);
        },
        0.0, 1.0, 1e-12);
    return s.dirac->weight * std::pow(xd, pw) + std::pow(xd, e) / e * body;
}

}  // namespace

TEST_CASE("initial time reproduces the data") {
    const PhysicalParams p = params(3, -1.5);
    const Profile u0 = gaussian(2, 0.2, 1);
    for (double x : {1.2, 1.9, 2.0, 2.7}) CHECK(solve_linear(p, u0, x, 0.0) == u0(x));

    const DensitySnapshot s = solve_linear_monodisperse(p, 2.0, 0.0);
    REQUIRE(s.dirac);
    CHECK(s.dirac->location == 2.0);
    CHECK(s.dirac->weight == 1.0);
    CHECK(s.density(1.0) == 0.0);
    for (double pw : {0.0, 0.5, 1.0, 2.5}) CHECK(moment_linear(p, pw, 0.0, 2.0) == std::pow(2.0, pw));
}

TEST_CASE("monodisperse Dirac part") {
    const DensitySnapshot s = solve_linear_monodisperse(params(3, -1.5), 2.0, 0.3);
    REQUIRE(s.dirac);
    CHECK(s.dirac->location == doctest::Approx(2.0 * std::exp(0.3)).epsilon(1e-15));
    CHECK(s.dirac->weight == doctest::Approx(std::exp(-(8.0 / 3) * (std::exp(0.9) - 1))).epsilon(1e-13));
    CHECK(std::log(s.dirac->weight) == doctest::Approx(-3.8922).epsilon(1e-4));
    CHECK(s.density(s.dirac->location * 1.001) == 0.0);
    CHECK(s.density(s.dirac->location * 0.999) > 0.0);

    const DensitySnapshot d = solve_linear_monodisperse(params(3, -1.5, Mode::decay), 2.0, 0.3);
    CHECK(d.dirac->location == doctest::Approx(2.0 * std::exp(-0.3)).epsilon(1e-15));
    CHECK(d.dirac->weight == doctest::Approx(std::exp(-(8.0 / 3) * (1 - std::exp(-0.9)))).epsilon(1e-13));
}

TEST_CASE("monodisperse regular part against the explicit form") {
    // Reference: the original 1F1(1+q; 2; .) expression summed in 50 digits,
    // kept to arguments where that sum is still exact.
    for (Mode mode : {Mode::growth, Mode::decay}) {
        for (double alpha : {3.0, 1.0, -3.0, -0.75}) {
            const PhysicalParams p = params(alpha, -1.5, mode, 0.8, 1.3);
            const double s = mode_sign(mode), x0 = 1.7, t = 0.4, q = 0.5 / alpha;
            const DensitySnapshot snap = solve_linear_monodisperse(p, x0, t);
            const double xd = snap.dirac->location;
            const double c = s * p.a * (1 - std::exp(-s * p.k * alpha * t)) / (p.k * alpha);
            for (double frac : {0.3, 0.5, 0.8, 0.99}) {
                const double x = frac * xd;
                const double want = 0.5 * s * p.a * (std::exp(s * p.k * alpha * t) - 1) / (p.k * alpha) *
                                    std::pow(x0, alpha + 0.5) * std::pow(x, -1.5) * std::exp(-s * p.k * -0.5 * t) *
                                    snap.dirac->weight *
                                    oracle::hyp1f1_direct(1 + q, 2, c * (std::pow(xd, alpha) - std::pow(x, alpha)));
                CHECK(oracle::rel(snap.density(x), want) < 1e-10);
            }
        }
    }
}

TEST_CASE("moments of a Dirac") {
    CHECK(moment_linear(params(3, -1.5), 1.0, 0.7, 2.0) == doctest::Approx(2 * std::exp(0.7)).epsilon(1e-15));

    const PhysicalParams dec = params(-3, -1.5, Mode::decay);
    const double m1 = moment_linear(dec, 1.0, 1.0, 2.0);
    const DensitySnapshot s = solve_linear_monodisperse(dec, 2.0, 1.0);
    CHECK(oracle::rel(m1, snapshot_moment(s, -3, -1.5, 1.0)) < 1e-6);
    CHECK(m1 < 2 * std::exp(-1.0));

    CHECK_THROWS_AS(moment_linear(dec, 0.5, 1.0, 2.0), DomainError);
    CHECK_THROWS_AS(moment_linear(dec, -2.0, 1.0, 2.0), DomainError);
    CHECK_THROWS_AS(moment_linear(params(3, -1.5), 0.2, 1.0, 2.0), DomainError);
}

TEST_CASE("closed-form moments agree with quadrature of the snapshot") {
    for (Mode mode : {Mode::growth, Mode::decay}) {
        for (double alpha : {3.0, 0.5, -3.0, -0.75}) {
            for (double pw : {0.75, 1.0, 1.5, 2.0, 3.0}) {
                if (alpha < 0 && !(pw > 1 + alpha)) continue;
                const double nu = -1.25;
                if (!(pw + nu + 1 > 0)) continue;
                const PhysicalParams p = params(alpha, nu, mode, 0.9, 1.1);
                const double x0 = 1.4, t = 0.6;
                const double got = moment_linear(p, pw, t, x0);
                const double want = snapshot_moment(solve_linear_monodisperse(p, x0, t), alpha, nu, pw);
                INFO("alpha=", alpha, " p=", pw, " mode=", mode_sign(mode));
                CHECK(oracle::rel(got, want) < 1e-6);
            }
        }
    }
}

TEST_CASE("no shattering for positive alpha") {
    std::mt19937_64 rng(20261016);
    std::uniform_real_distribution<double> ua(0.05, 4.0), un(-1.9, 0.0), uk(0.2, 2.0), uA(0.2, 2.0),
        ux(0.3, 3.0), ut(0.0, 2.0);
    for (int i = 0; i < 20; ++i) {
        const Mode mode = i % 2 ? Mode::growth : Mode::decay;
        const PhysicalParams p = params(ua(rng), un(rng), mode, uk(rng), uA(rng));
        const double x0 = ux(rng), t = ut(rng);
        const double want = std::exp(mode_sign(mode) * p.k * t) * x0;
        CHECK(std::fabs(moment_linear(p, 1.0, t, x0) - want) < 1e-10);
        if (t > 0) CHECK(oracle::rel(snapshot_moment(solve_linear_monodisperse(p, x0, t), p.alpha, p.nu, 1.0), want) < 1e-6);
    }
}

TEST_CASE("shattering for negative alpha") {
    const PhysicalParams dec = params(-3, -1.5, Mode::decay);
    for (double t : {0.06, 0.2, 0.5, 1.0}) {
        const double m1 = moment_linear(dec, 1.0, t, 2.0);
        CHECK(m1 < 2 * std::exp(-t));
        CHECK(oracle::rel(m1, snapshot_moment(solve_linear_monodisperse(dec, 2.0, t), -3, -1.5, 1.0)) < 1e-6);
    }
    const PhysicalParams gro = params(-3, -1.5);
    CHECK(moment_linear(gro, 1.0, 5.0, 2.0) > 20.0);
    CHECK(moment_linear(gro, 1.0, 1.0, 2.0) < 2 * std::exp(1.0));
}

TEST_CASE("pure fragmentation from a Dirac") {
    const DensitySnapshot s0 = pure_fragmentation_monodisperse(2, 1, 1.0, 0.0);
    CHECK(s0.dirac->weight == 1.0);
    CHECK(s0.density(0.5) == 0.0);

    const DensitySnapshot s = pure_fragmentation_monodisperse(2, 1, 1.0, 1.0);
    CHECK(s.density(0.5) == doctest::Approx(std::exp(-0.5) * 2 * 1.25).epsilon(1e-14));
    CHECK(s.density(1.5) == 0.0);

    for (double t : {0.1, 1.0, 3.0}) {
        const DensitySnapshot f = pure_fragmentation_monodisperse(2, 1, 1.3, t);
        const double mass = f.dirac->weight * 1.3 + oracle::kronrod([&](double xi) { return xi * f.density(xi); }, 0, 1.3);
        CHECK(std::fabs(mass - 1.3) < 1e-8);
    }
}

TEST_CASE("pure fragmentation for negative sign against the unreduced form") {
    const double m = 1.5, xi0 = 0.7, t = 0.8;
    const DensitySnapshot s = pure_fragmentation_monodisperse(m, -1, xi0, t);
    CHECK(s.density(0.5) == 0.0);
    for (double xi : {0.8, 1.5, 4.0, 12.0}) {
        const double want = std::exp(-t * xi) * m * t * oracle::hyp1f1_direct(1 + m, 2, t * (xi - xi0));
        CHECK(oracle::rel(s.density(xi), want) < 1e-11);
    }
}

TEST_CASE("vanishing transport rate approaches pure fragmentation") {
    // alpha = 1, nu = 0 gives m = 2; superposing Dirac solutions over u0 = e^{-x}
    // gives (1+t)^2 e^{-(1+t) x}.
    const double t = 1.0;
    const Profile u0 = Profile::smooth([](double x) { return std::exp(-x); }, 0.0, 45.0, 90);
    for (double x : {0.3, 1.0, 2.0, 4.0}) {
        const double superposed =
            std::exp(-x) * std::exp(-t * x) +
            oracle::tanh_sinh(
                [&](double y) { return std::exp(-y) * pure_fragmentation_monodisperse(2, 1, y, t).density(x); }, x,
                60.0);
        const double want = 4 * std::exp(-2 * x);
        CHECK(oracle::rel(superposed, want) < 1e-10);
        CHECK(oracle::rel(solve_linear(params(1, 0, Mode::growth, 1e-6), u0, x, t), want) < 1e-4);
        CHECK(oracle::rel(solve_linear(params(1, 0, Mode::decay, 1e-6), u0, x, t), want) < 1e-4);
    }
}

TEST_CASE("closed form against the operator chain") {
    const double t = 0.5;
    const PhysicalParams p = params(3, -1.5);
    const Profile u0 = gaussian(2, 0.1, 0.5);
    const DerivedParams d = derive(p);
    const SeriesKernel K = build_kernel(KernelFamily::exp_neg, d.m);

    for (double x : {0.5, 1.5, 2.2, 3.0}) {
        const double want = solve_linear(p, u0, x, t);
        CHECK(std::fabs(solve_linear_chain(p, u0, x, t, K) - want) < 1e-9 * std::max(1.0, std::fabs(want)));
    }

    // Volterra marching in (xi, tau) against the closed form carried to the
    // same variables, L1 over xi.
    const CharacteristicMaps cm(p, d);
    const double tau = cm.tau(t);
    const Profile w0 = pushforward_profile(u0, p);
    std::vector<double> grid;
    for (int i = 0; i <= 640; ++i) grid.push_back(16.0 * i / 640);
    const VolterraResult vr = volterra_oracle(K, GridFunction::sample(w0, grid), tau, 128, Direction::plus);
    auto w_closed = [&](double xi) {
        return std::exp(t) * std::pow(xi, 0.5) * std::exp(tau * xi) * solve_linear(p, u0, cm.x_of(xi, t), t);
    };
    const std::vector<double> br = quad::uniform_breaks(0.0, 16.0, 160);
    const double diff = quad::composite([&](double xi) { return std::fabs(vr.u(xi) - w_closed(xi)); }, br);
    const double norm = quad::composite([&](double xi) { return std::fabs(w_closed(xi)); }, br);
    CHECK(diff < 1e-4 * norm);
}

TEST_CASE("chain and closed form in decay with negative alpha") {
    const PhysicalParams p = params(-0.75, -0.5, Mode::decay, 0.7, 1.2);
    const Profile u0 = gaussian(1.5, 0.2, 0.8);
    const DerivedParams d = derive(p);
    const SeriesKernel K = build_kernel(KernelFamily::exp_pos, d.m);
    for (double x : {0.4, 0.9, 1.3, 2.0}) {
        const double want = solve_linear(p, u0, x, 0.6);
        CHECK(std::fabs(solve_linear_chain(p, u0, x, 0.6, K) - want) < 1e-9 * std::max(1.0, std::fabs(want)));
    }
}

TEST_CASE("Green superposition over monodisperse solutions") {
    for (Mode mode : {Mode::growth, Mode::decay}) {
        const PhysicalParams p = params(2, -0.5, mode, 1.0, 1.0);
        const double t = 0.4, e = std::exp(mode_sign(mode) * t);
        const Profile u0 = Profile::smooth([](double x) { return std::pow(std::sin(M_PI * (x - 1)), 2); }, 1, 2, 8);
        auto green = [&](double x) {
            // Dirac part lands at x when x0 = x / e.
            double v = 0.0;
            const double x0 = x / e;
            if (x0 >= 1 && x0 <= 2) v += u0(x0) * solve_linear_monodisperse(p, x0, t).dirac->weight / e;
            const double lo = std::max(1.0, x0);
            if (lo < 2)
                v += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                    [&](double y) { return u0(y) * solve_linear_monodisperse(p, y, t).density(x); }, lo, 2, 3, 1e-10);
            return v;
        };
        const std::vector<double> br = quad::merge_breaks(quad::uniform_breaks(0.02, 2 * e, 24), {e}, 0.02, 2 * e);
        const double diff = quad::composite([&](double x) { return std::fabs(green(x) - solve_linear(p, u0, x, t)); }, br);
        const double norm = quad::composite([&](double x) { return solve_linear(p, u0, x, t); }, br);
        CHECK(diff < 1e-5 * norm);
    }
}

TEST_CASE("closed form stays nonnegative") {
    for (Mode mode : {Mode::growth, Mode::decay}) {
        for (double alpha : {3.0, 0.5, -0.75, -3.0}) {
            const PhysicalParams p = params(alpha, -1.0, mode);
            const Profile u0 = gaussian(1.5, 0.3, 1.0);
            for (double x = 0.1; x < 5; x += 0.37) CHECK(solve_linear(p, u0, x, 0.8) >= 0.0);
        }
    }
}

TEST_CASE("parameter class is enforced") {
    PhysicalParams p = params(3, -1.5);
    p.gamma = 0.5;
    CHECK_THROWS_AS(solve_linear(p, gaussian(2, 0.1, 0.5), 1.0, 0.1), ParamError);
    CHECK_THROWS_AS(moment_linear(p, 1.0, 0.1, 2.0), ParamError);
    CHECK_THROWS_AS(spurious_solution(params(-1, -1), gaussian(1, 0.1, 0.5), 1.0, 0.1), ParamError);
}

namespace {

// u_t + s (k x u)_x + a x^alpha u - int_x^inf a y^alpha ((nu+2)/y) (x/y)^nu u(y) dy,
// divided by the sum of the term magnitudes.
double relative_residual(const PhysicalParams& p, const Profile& uh, double x, double t) {
    const double s = mode_sign(p.mode), h = 1e-3;
    auto u = [&](double xx, double tt) { return spurious_solution(p, uh, xx, tt); };
    auto d5 = [h](double fm2, double fm1, double fp1, double fp2) {
        return (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h);
    };
    const double ut = d5(u(x, t - 2 * h), u(x, t - h), u(x, t + h), u(x, t + 2 * h));
    auto flux = [&](double xx) { return p.k * xx * u(xx, t); };
    const double fx = d5(flux(x - 2 * h), flux(x - h), flux(x + h), flux(x + 2 * h));
    const double loss = p.a * std::pow(x, p.alpha) * u(x, t);
    const double gain = oracle::exp_sinh([&](double r) {
        const double y = x + r;
        return p.a * std::pow(y, p.alpha) * (p.nu + 2) / y * std::pow(x / y, p.nu) * u(y, t);
    }, 1e-11);
    const double res = ut + s * fx + loss - gain;
    return std::fabs(res) / (std::fabs(ut) + std::fabs(fx) + std::fabs(loss) + std::fabs(gain));
}

}  // namespace

TEST_CASE("spurious family solves the equation") {
    const Profile uh = gaussian(1.0, 0.1, 0.5, 20);
    for (Mode mode : {Mode::growth, Mode::decay}) {
        const PhysicalParams p = params(2, -0.5, mode);
        CHECK(relative_residual(p, uh, 1.0, 0.5) < 1e-5);
        CHECK(relative_residual(p, uh, 0.4, 1.2) < 1e-5);
    }
}

TEST_CASE("spurious family at the initial time") {
    const PhysicalParams p = params(2, -0.5, Mode::growth, 1.0, 1.5);
    const Profile uh = gaussian(1.0, 0.1, 0.5, 20);
    for (double x : {0.3, 1.0, 2.5}) {
        const double want = std::pow(x, -0.5) * oracle::kronrod(
                                                    [&](double s) {
                                                        return std::pow(s / 1.5 + x * x, -3.5 / 2.0) * uh(s);
                                                    },
                                                    0.5, 1.5);
        CHECK(oracle::rel(spurious_solution(p, uh, x, 0.0), want) < 1e-12);
    }
}

TEST_CASE("spurious moments and mass anomaly") {
    const Profile uh = gaussian(1.0, 0.1, 0.5, 20);
    for (Mode mode : {Mode::growth, Mode::decay}) {
        for (double alpha : {1.0, 2.0}) {
            const PhysicalParams p = params(alpha, -0.5, mode, 0.8, 1.3);
            for (double t : {0.0, 0.5}) {
                for (double pw : {0.5, 1.0, 1.9}) {
                    if (!(pw < 1 + alpha)) continue;
                    const double quad = oracle::tanh_sinh(
                        [&](double x) { return std::pow(x, pw) * spurious_solution(p, uh, x, t); }, 0.0,
                        std::numeric_limits<double>::infinity(), 1e-10);
                    INFO("alpha=", alpha, " p=", pw, " t=", t);
                    CHECK(oracle::rel(spurious_moment(p, uh, pw, t), quad) < 1e-6);
                }
            }
            const double m0 = spurious_moment(p, uh, 1.0, 0.0), m1 = spurious_moment(p, uh, 1.0, 0.5);
            const double transport = std::exp(mode_sign(mode) * p.k * 0.5) * m0;
            CHECK(std::fabs(m1 - transport) > 0.01 * transport);
        }
    }
    CHECK_THROWS_AS(spurious_moment(params(2, -0.5), uh, 3.0, 0.1), DomainError);
}
