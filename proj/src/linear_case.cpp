#include "frag/linear_case.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

#include "frag/errors.hpp"
#include "frag/quadrature.hpp"
#include "frag/specfun.hpp"

namespace frag {

namespace {

struct Linear {
    double s, alpha, nu, k, a, q;

    explicit Linear(const PhysicalParams& p)
        : s(mode_sign(p.mode)), alpha(p.alpha), nu(p.nu), k(p.k), a(p.a), q((p.nu + 2.0) / p.alpha) {
        p.validate();
        if (classify(p) != CaseClass::linear) throw ParamError("gamma: the linear case requires gamma = 1");
    }

    // c(t) = +-a (1 - e^{-+k alpha t}) / (k alpha) >= 0
    double c(double t) const { return -s * a * std::expm1(-s * k * alpha * t) / (k * alpha); }

    // e^{-c x^alpha} 1F1(1 - q; 2; -c (y^alpha - x^alpha)), always with a
    // nonpositive argument.
    double kernel(double cc, double x, double y) const {
        const double xa = std::pow(x, alpha), ya = std::pow(y, alpha);
        if (alpha > 0) return std::exp(-cc * xa) * kummer_1f1(1.0 - q, 2.0, -cc * (ya - xa));
        return std::exp(-cc * ya) * kummer_1f1(1.0 + q, 2.0, cc * (ya - xa));
    }
};

double signed_lgamma(double v, double& sign) {
    if (v <= 0.0 && v == std::floor(v)) throw DomainError("moment: Gamma factor at a pole");
    int sg = 1;
    const double l = boost::math::lgamma(v, &sg);
    sign = sg;
    return l;
}

}  // namespace

double solve_linear(const PhysicalParams& p, const Profile& u0, double x, double t) {
    const Linear L(p);
    if (!(x > 0.0)) throw DomainError("solve_linear: x must be > 0");
    if (!(t >= 0.0)) throw DomainError("solve_linear: t must be >= 0");
    if (t == 0.0) return u0(x);
    const double e = std::exp(L.s * L.k * t), cc = L.c(t);
    const double head = std::exp(-cc * std::pow(x, L.alpha)) * u0(x / e);
    std::vector<double> br;
    br.reserve(u0.breaks.size());
    for (double b : u0.breaks) br.push_back(b * e);
    const double lo = std::max(x, br.front()), hi = br.back();
    double tail = 0.0;
    if (hi > lo) {
        tail = quad::composite(
            [&](double y) { return L.kernel(cc, x, y) * std::pow(y, L.alpha - L.nu - 1.0) * u0.f(y / e); },
            quad::merge_breaks(br, {}, lo, hi));
    }
    return (head + (L.nu + 2.0) * cc * std::pow(x, L.nu) * tail) / e;
}

double solve_linear(const PhysicalParams& p, const InitialCondition& u0, double x, double t) {
    return solve_linear(p, u0.profile(), x, t);
}

DensitySnapshot solve_linear_monodisperse(const PhysicalParams& p, double x0, double t) {
    const Linear L(p);
    if (!(x0 > 0.0)) throw ParamError("x0: must be > 0");
    if (!(t >= 0.0)) throw DomainError("solve_linear_monodisperse: t must be >= 0");
    DensitySnapshot snap = DensitySnapshot::zero(t);
    if (t == 0.0) {
        snap.dirac = Dirac{x0, 1.0};
        return snap;
    }
    const double xd = x0 * std::exp(L.s * L.k * t), cc = L.c(t);
    const double xda = std::pow(xd, L.alpha);
    const double weight = std::exp(-cc * xda);
    snap.dirac = Dirac{xd, weight};
    const double coef = L.s * L.a * (L.nu + 2.0) / (L.k * L.alpha) * std::expm1(L.s * L.k * L.alpha * t) *
                        std::pow(x0, L.alpha - L.nu - 1.0) * std::exp(-L.s * L.k * (L.nu + 1.0) * t);
    snap.regular = [L, cc, xda, weight, coef](double x) {
        if (!(x > 0.0)) return 0.0;
        const double xa = std::pow(x, L.alpha), y = cc * (xda - xa);
        if (!std::isfinite(y)) return 0.0;
        const double f = L.alpha > 0 ? std::exp(-cc * xa) * kummer_1f1(1.0 - L.q, 2.0, -y)
                                     : weight * kummer_1f1(1.0 + L.q, 2.0, y);
        return coef * std::pow(x, L.nu) * f;
    };
    snap.support_lo = 0.0;
    snap.support_hi = xd;
    return snap;
}

DensitySnapshot solve_linear_snapshot(const PhysicalParams& p, const InitialCondition& u0, double t) {
    if (const auto* m = std::get_if<Monodisperse>(&u0.data)) return solve_linear_monodisperse(p, m->x0, t);
    const Linear L(p);
    const Profile prof = u0.profile();
    DensitySnapshot snap;
    snap.t = t;
    snap.regular = [p, prof, t](double x) { return x > 0.0 ? solve_linear(p, prof, x, t) : 0.0; };
    const double e = std::exp(L.s * L.k * t);
    snap.support_lo = t == 0.0 ? prof.lo() : 0.0;
    snap.support_hi = prof.hi() * e;
    if (t > 0.0) snap.kinks = {prof.lo() * e};
    return snap;
}

double moment_linear(const PhysicalParams& p, double pw, double t, double x0) {
    const Linear L(p);
    if (!(pw >= 0.0)) throw DomainError("moment: p must be >= 0");
    if (!(x0 > 0.0)) throw ParamError("x0: must be > 0");
    if (!(t >= 0.0)) throw DomainError("moment: t must be >= 0");
    if (t == 0.0) return std::pow(x0, pw);
    if (L.alpha < 0 && !(pw > 1.0 + L.alpha)) throw DomainError("moment diverges: alpha < 0 requires p > 1 + alpha");
    if (!(pw + L.nu + 1.0 > 0.0)) throw DomainError("moment diverges: requires p + nu + 1 > 0");
    const double e = std::exp(L.s * L.k * t);
    const double z = L.s * L.a * std::pow(x0, L.alpha) * std::expm1(L.s * L.k * L.alpha * t) / (L.k * L.alpha);
    const double b = (pw + L.nu + 1.0) / L.alpha;
    if (L.alpha > 0) {
        if (pw == 1.0) return e * x0;
        // e^{-z} 1F1(q; b; z) = 1F1(b - q; b; -z)
        return std::exp(L.s * pw * L.k * t) * std::pow(x0, pw) * kummer_1f1(b - L.q, b, -z);
    }
    if (pw == 1.0) return e * x0 * regularized_upper_gamma(1.0 - L.q, z);
    double s1 = 1.0, s2 = 1.0;
    const double lg = signed_lgamma((L.alpha - pw + 1.0) / L.alpha, s1) -
                      signed_lgamma((L.alpha - pw - L.nu - 1.0) / L.alpha, s2);
    return s1 * s2 * std::exp(lg + L.s * pw * L.k * t - z) * std::pow(x0, pw) * tricomi_psi(L.q, b, z);
}

double solve_linear_chain(const PhysicalParams& p, const Profile& u0, double x, double t,
                          const SeriesKernel& kernel) {
    const Linear L(p);
    const DerivedParams d = derive(p);
    if (kernel.sg != d.sg || std::fabs(kernel.m - d.m) > 1e-12 * d.m)
        throw ParamError("kernel: m and sg must match the parameters");
    const CharacteristicMaps cm(p, d);
    const double xi = cm.xi(x, t), tau = cm.tau(t);
    const Profile w0 = pushforward_profile(u0, p);
    const Direction dir = d.sg > 0 ? Direction::plus : Direction::minus;
    // J- acts on a bounded support, where the series needs no radius limit.
    const Lemma21Options opt{std::numeric_limits<double>::infinity()};
    const double w = lemma21_solution(kernel, w0, tau, dir, xi, opt);
    return std::exp(-L.s * L.k * t) * std::pow(xi, L.nu / L.alpha) * std::exp(-tau * xi) * w;
}

DensitySnapshot pure_fragmentation_monodisperse(double m, int sg, double xi0, double t) {
    if (!(m > 0.0)) throw ParamError("m: must be > 0");
    if (sg != 1 && sg != -1) throw ParamError("sg: must be +1 or -1");
    if (!(xi0 > 0.0)) throw ParamError("xi0: must be > 0");
    if (!(t >= 0.0)) throw DomainError("t: must be >= 0");
    DensitySnapshot snap = DensitySnapshot::zero(t);
    snap.dirac = Dirac{xi0, std::exp(-t * xi0)};
    if (t == 0.0) return snap;
    if (sg > 0) {
        snap.regular = [m, xi0, t](double xi) {
            return std::exp(-t * xi) * m * t * kummer_1f1(1.0 - m, 2.0, t * (xi - xi0));
        };
        snap.support_lo = 0.0;
        snap.support_hi = xi0;
    } else {
        // e^{-t xi} 1F1(1+m; 2; t(xi - xi0)) = e^{-t xi0} 1F1(1-m; 2; -t(xi - xi0))
        snap.regular = [m, xi0, t](double xi) {
            return std::exp(-t * xi0) * m * t * kummer_1f1(1.0 - m, 2.0, -t * (xi - xi0));
        };
        snap.support_lo = xi0;
        snap.support_hi = std::numeric_limits<double>::infinity();
    }
    return snap;
}

namespace {

void check_spurious(const PhysicalParams& p, const Profile& u0_hat) {
    p.validate();
    if (!(p.alpha > 0.0)) throw ParamError("alpha: the spurious family needs alpha > 0");
    if (std::fabs(p.gamma - 1.0) > 1e-12) throw ParamError("gamma: the spurious family needs gamma = 1");
    if (u0_hat.lo() < 0.0) throw ParamError("u0_hat: spectral parameter must be >= 0");
}

}  // namespace

double spurious_solution(const PhysicalParams& p, const Profile& u0_hat, double x, double t) {
    check_spurious(p, u0_hat);
    const double s = mode_sign(p.mode), ka = p.k * p.alpha;
    const double ex = (p.alpha + p.nu + 2.0) / p.alpha;
    const double amp = std::expm1(s * ka * t) / ka, xa = std::pow(x, p.alpha) * std::exp(-s * ka * t);
    const double head = -s * p.k * (p.nu + 1.0) * t;
    const double integral = quad::composite(
        [&](double mu) { return std::exp(head + s * mu * amp) * std::pow(mu / p.a + xa, -ex) * u0_hat.f(mu); },
        u0_hat.breaks);
    return std::pow(x, p.nu) * integral;
}

double spurious_moment(const PhysicalParams& p, const Profile& u0_hat, double pw, double t) {
    check_spurious(p, u0_hat);
    if (!(pw > -(1.0 + p.nu) && pw < 1.0 + p.alpha)) throw DomainError("spurious moment needs -(1+nu) < p < 1+alpha");
    const double s = mode_sign(p.mode), ka = p.k * p.alpha;
    const double amp = std::expm1(s * ka * t) / ka;
    const double pre = std::pow(p.a, (p.alpha + 1.0 - pw) / p.alpha) / p.alpha *
                       std::beta((pw + p.nu + 1.0) / p.alpha, (p.alpha - pw + 1.0) / p.alpha);
    const double ex = (pw - p.alpha - 1.0) / p.alpha;
    const double integral = quad::composite(
        [&](double mu) { return std::exp(s * pw * p.k * t + s * mu * amp) * std::pow(mu, ex) * u0_hat.f(mu); },
        u0_hat.breaks);
    return pre * integral;
}

}  // namespace frag
