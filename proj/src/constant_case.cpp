#include "frag/constant_case.hpp"

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

#include "frag/errors.hpp"
#include "frag/linear_case.hpp"
#include "frag/quadrature.hpp"

namespace frag {

namespace {

double binom(int n, int k) { return boost::math::binomial_coefficient<double>(n, k); }

double factorial(int n) { return boost::math::factorial<double>(n); }

bool is_integer(double m) { return std::fabs(m - std::round(m)) < 1e-12 * std::max(1.0, m); }

struct Constant {
    ConstantCase c;
    DerivedParams d;
    double s;

    explicit Constant(const PhysicalParams& p) : c(constant_case(p)), d(derive(p)), s(mode_sign(p.mode)) {}
};

void check_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("t: must be finite and >= 0");
}

}  // namespace

ConstantCase constant_case(const PhysicalParams& p) {
    p.validate();
    if (classify(p) != CaseClass::constant)
        throw ParamError("gamma: the constant case requires alpha = 1 - gamma and gamma = -nu");
    const bool growth = p.mode == Mode::growth;
    if (p.alpha < 0) return growth ? ConstantCase::growth_negative_alpha : ConstantCase::decay_negative_alpha;
    return growth ? ConstantCase::growth_positive_alpha : ConstantCase::decay_positive_alpha;
}

bool needs_boundary(ConstantCase c) {
    return c == ConstantCase::decay_negative_alpha || c == ConstantCase::growth_positive_alpha;
}

GaussPoly GaussPoly::derivative() const {
    GaussPoly out{std::vector<double>(poly.size() + 1, 0.0), gauss_sign};
    for (std::size_t j = 1; j < poly.size(); ++j) out.poly[j - 1] += j * poly[j];
    for (std::size_t j = 0; j < poly.size(); ++j) out.poly[j + 1] += 2.0 * gauss_sign * poly[j];
    while (out.poly.size() > 1 && out.poly.back() == 0.0) out.poly.pop_back();
    return out;
}

double GaussPoly::poly_value(double zeta) const {
    double v = 0.0;
    for (auto it = poly.rbegin(); it != poly.rend(); ++it) v = v * zeta + *it;
    return v;
}

double GaussPoly::operator()(double zeta) const { return poly_value(zeta) * std::exp(gauss_sign * zeta * zeta); }

BoundaryCorrection::BoundaryCorrection(int m, double beta, std::vector<double> moments)
    : m_(m), beta_(beta), moments_(std::move(moments)) {
    if (m < 1 || m > 10) throw ParamError("m: boundary construction supports 1 <= m <= 10");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ParamError("beta: must be > 0");
    if (static_cast<int>(moments_.size()) != m) throw ParamError("moments: need exactly m moments of w0");
    for (double mu : moments_)
        if (!std::isfinite(mu)) throw DomainError("moments: w0 has a divergent moment");
    he_ = hermite_basis(m);

    // g(s) = -beta^{m/2} F(sqrt(beta) s, -s / sqrt(beta)) as a polynomial of degree 2m - 1.
    std::vector<double> P(2 * m, 0.0);
    const double bh = std::pow(beta, 0.5 * m);
    for (int r = 1; r <= m; ++r) {
        for (int j = 0; j < r; ++j) {
            const double c = binom(m, r) * binom(r - 1, j) * moments_[j] / factorial(r - 1) *
                             ((j % 2 == 0) ? -1.0 : 1.0) * std::pow(beta, -0.5 * (1 + j));
            P[2 * r - 1 - j] += -bh * c;
        }
    }
    h_ = GaussPoly{P, 0.5};
    h_derivatives_.push_back(h_);
    for (int j = 1; j < m; ++j) h_derivatives_.push_back(h_derivatives_.back().derivative());
    gauss_derivatives_.push_back(GaussPoly{{1.0}, -0.5});
    for (int n = 1; n <= m; ++n) gauss_derivatives_.push_back(gauss_derivatives_.back().derivative());
}

BoundaryCorrection BoundaryCorrection::from_profile(int m, double beta, const Profile& w0) {
    std::vector<double> mu(m);
    for (int j = 0; j < m; ++j)
        mu[j] = quad::composite([&](double eta) { return std::pow(eta, j) * w0(eta); }, w0.breaks);
    return BoundaryCorrection(m, beta, std::move(mu));
}

double BoundaryCorrection::F(double xi, double t) const {
    double sum = 0.0;
    for (int r = 1; r <= m_; ++r) {
        double inner = 0.0;
        for (int j = 0; j < r; ++j) inner += binom(r - 1, j) * std::pow(-xi, r - 1 - j) * moments_[j];
        sum += binom(m_, r) * std::pow(t, r) / factorial(r - 1) * inner;
    }
    return sum;
}

double BoundaryCorrection::g(double zeta) const { return h_.poly_value(zeta); }

double BoundaryCorrection::damped_integral(int i, double zeta) const {
    if (zeta == 0.0) return 0.0;
    const double lam = he_.roots[i];
    const double len = std::fabs(zeta);
    const double width = std::min(0.25, 1.0 / (std::fabs(lam - zeta) + 1.0));
    const int cells = std::max(1, static_cast<int>(std::ceil(len / width)));
    const std::vector<double> br = quad::uniform_breaks(0.0, len, cells);
    if (zeta > 0) {
        return quad::composite(
            [&](double v) { return std::exp(v * (lam - zeta + 0.5 * v)) * h_.poly_value(zeta - v); }, br);
    }
    return -quad::composite(
        [&](double u) { return std::exp(-u * (lam - zeta) + 0.5 * u * u) * h_.poly_value(zeta + u); }, br);
}

double BoundaryCorrection::y_derivative(int n, double zeta) const {
    if (n < 0 || n > m_) throw ParamError("y_derivative: order must lie in [0, m]");
    const double grow = std::exp(0.5 * zeta * zeta);
    double sum = 0.0;
    for (int i = 0; i < m_; ++i) {
        const double lam = he_.roots[i];
        double term = std::pow(lam, n) * grow * damped_integral(i, zeta);
        for (int j = 0; j < n; ++j) term += std::pow(lam, n - 1 - j) * h_derivatives_[j](zeta);
        sum += term / he_.derivative_at_roots[i];
    }
    return sum;
}

double BoundaryCorrection::hermite_residual(double zeta) const {
    double lhs = 0.0;
    for (int k = 0; k <= m_; ++k) {
        const double c = static_cast<double>(he_.coefficients[k]);
        if (c != 0.0) lhs += c * y_derivative(k, zeta);
    }
    return lhs - h_(zeta);
}

double BoundaryCorrection::z_derivative(int n, double zeta) const {
    if (n < 0 || n > m_) throw ParamError("z_derivative: order must lie in [0, m]");
    // Products e^{-zeta^2/2} e^{+zeta^2/2} cancel, so only polynomials and the
    // damped integrals A_i remain.
    std::vector<double> A(m_);
    for (int i = 0; i < m_; ++i) A[i] = damped_integral(i, zeta);
    double sum = 0.0;
    for (int k = 0; k <= n; ++k) {
        double yk = 0.0;  // e^{-zeta^2/2} y^{(k)}
        for (int i = 0; i < m_; ++i) {
            const double lam = he_.roots[i];
            double term = std::pow(lam, k) * A[i];
            for (int j = 0; j < k; ++j) term += std::pow(lam, k - 1 - j) * h_derivatives_[j].poly_value(zeta);
            yk += term / he_.derivative_at_roots[i];
        }
        sum += binom(n, k) * gauss_derivatives_[n - k].poly_value(zeta) * yk;
    }
    return sum;
}

double BoundaryCorrection::psi(double xi) const {
    if (xi >= 0.0) return 0.0;
    return std::pow(beta_, -0.5 * m_) * z_derivative(m_, xi / std::sqrt(beta_));
}

double BoundaryCorrection::correction(double xi, double t) const {
    if (xi > 0.0) throw DomainError("correction: defined for xi <= 0");
    // J^n psi = (-1)^n Z^{(m-n)}, Z(xi) = z(xi / sqrt(beta)).
    const double zeta = xi / std::sqrt(beta_);
    double sum = 0.0;
    for (int n = 0; n <= m_; ++n) {
        sum += binom(m_, n) * std::pow(-t, n) * std::pow(beta_, -0.5 * (m_ - n)) * z_derivative(m_ - n, zeta);
    }
    return sum;
}

double solve_constant_interior(const PhysicalParams& p, const Profile& w0, double xi, double t) {
    const Constant C(p);
    check_time(t);
    const double m = C.d.m;
    const Direction dir = C.d.sg > 0 ? Direction::plus : Direction::minus;
    if (is_integer(m)) {
        const int mi = static_cast<int>(std::lround(m));
        return C.d.sg > 0 ? binomial_power(w0, t, mi, dir, xi) : brp(w0, t, mi, xi);
    }
    const SeriesKernel K = build_kernel(C.d.sg > 0 ? KernelFamily::exp_neg : KernelFamily::exp_pos, m);
    // Bounded support: J^dir is quasinilpotent there and F is entire.
    return lemma21_solution(K, w0, t, dir, xi, Lemma21Options{std::numeric_limits<double>::infinity()});
}

double solve_constant_growth_boundary(const PhysicalParams& p, const Profile& w0, const BoundaryCorrection& bc,
                                      double xi, double t) {
    const Constant C(p);
    if (C.c != ConstantCase::growth_positive_alpha) throw ParamError("mode: boundary construction is for case (iv)");
    check_time(t);
    if (xi > 0.0) return solve_constant_interior(p, w0, xi, t);
    return bc.F(xi, t) + bc.correction(xi, t);
}

double solve_constant(const PhysicalParams& p, const Profile& u0, double x, double t) {
    const Constant C(p);
    if (!(x > 0.0)) throw DomainError("x: must be > 0");
    check_time(t);
    if (C.c == ConstantCase::growth_negative_alpha)
        throw UnsupportedConfig("constant growth with alpha < 0 has a moving integration limit in the "
                                "characteristic variables; no closed form is provided");
    if (t == 0.0) return u0(x);
    const double z = p.a * std::pow(x, p.alpha), beta = C.d.beta;
    const double xi = z - C.s * beta * t;
    const Profile w0 = pushforward_profile(u0, p);
    double w = 0.0;
    switch (C.c) {
        case ConstantCase::decay_negative_alpha:
            if (xi <= 0.0) return 0.0;
            w = solve_constant_interior(p, w0, xi, t);
            break;
        case ConstantCase::decay_positive_alpha:
            w = solve_constant_interior(p, w0, xi, t);
            break;
        case ConstantCase::growth_positive_alpha: {
            if (!is_integer(C.d.m)) throw UnsupportedConfig("m: the boundary construction needs integer m");
            if (xi > 0.0) {
                w = solve_constant_interior(p, w0, xi, t);
            } else {
                const BoundaryCorrection bc =
                    BoundaryCorrection::from_profile(static_cast<int>(std::lround(C.d.m)), beta, w0);
                w = bc.F(xi, t) + bc.correction(xi, t);
            }
            break;
        }
        case ConstantCase::growth_negative_alpha:
            break;
    }
    return std::pow(z, p.nu / p.alpha) * std::exp(-C.s * beta * t * t / 2 - xi * t) * w;
}

DensitySnapshot solve_constant_monodisperse(const PhysicalParams& p, double x0, double t) {
    const Constant C(p);
    if (!(x0 > 0.0)) throw ParamError("x0: must be > 0");
    check_time(t);
    if (C.c != ConstantCase::decay_negative_alpha && C.c != ConstantCase::decay_positive_alpha)
        throw UnsupportedConfig("monodisperse constant-case solutions are provided for decay only");
    DensitySnapshot snap = DensitySnapshot::zero(t);
    if (t == 0.0) {
        snap.dirac = Dirac{x0, 1.0};
        return snap;
    }
    const double beta = C.d.beta, shift = C.s * beta * t;
    const double xi0 = p.a * std::pow(x0, p.alpha), W = dirac_weight_to_z(p, x0);
    // e^{-xi t} w(xi, t) for a unit Dirac in xi.
    const DensitySnapshot pf = pure_fragmentation_monodisperse(C.d.m, C.d.sg, xi0, t);
    const double damp = std::exp(-C.s * beta * t * t / 2);
    const double zd = xi0 + shift;
    if (zd > 0.0) {
        snap.dirac = Dirac{std::pow(zd / p.a, 1.0 / p.alpha), dirac_weight_to_x(p, zd, W * damp * pf.dirac->weight)};
    } else {
        return snap;
    }
    const double e = p.nu / p.alpha, a = p.a;
    snap.regular = [pf, W, damp, e, shift, a, alpha = p.alpha](double x) {
        if (!(x > 0.0)) return 0.0;
        const double z = a * std::pow(x, alpha);
        if (!std::isfinite(z)) return 0.0;
        return std::pow(z, e) * damp * W * pf.density(z - shift);
    };
    snap.support_lo = 0.0;
    snap.support_hi = snap.dirac->location;
    return snap;
}

double solve_constant_decay(const PhysicalParams& p, const Profile& u0, double x, double t) {
    const Constant C(p);
    if (p.mode != Mode::decay) throw ParamError("mode: the unified formula is for decay");
    if (!(x > 0.0)) throw DomainError("x: must be > 0");
    check_time(t);
    const double al = p.alpha, k = p.k, a = p.a;
    const double xa = std::pow(x, al);
    if (xa < -k * al * t) return 0.0;
    if (t == 0.0) return u0(x);
    const double shifted = xa + k * al * t;
    const double X = std::pow(shifted, 1.0 / al);
    const double head = std::exp(-a * xa * t) * std::pow(shifted / xa, (1.0 - al) / al) * u0(X);
    const double lo = std::max(X, u0.lo()), hi = u0.hi();
    double tail = 0.0;
    if (hi > lo) {
        auto kernel = [&](double y) {
            const double A = a * t * (shifted - std::pow(y, al));
            if (al > 0) return std::exp(-a * xa * t) * kummer_1f1(-1.0 / al, 2.0, A);
            // e^{-a x^alpha t} 1F1(-1/alpha; 2; A) = e^{A - a x^alpha t} 1F1(2 + 1/alpha; 2; -A)
            return std::exp(A - a * xa * t) * kummer_1f1(2.0 + 1.0 / al, 2.0, -A);
        };
        tail = quad::composite([&](double y) { return kernel(y) * u0.f(y); }, quad::merge_breaks(u0.breaks, {}, lo, hi));
    }
    return std::exp(-0.5 * k * a * al * t * t) * (head + a * (al + 1.0) * std::pow(x, al - 1.0) * t * tail);
}

DensitySnapshot solve_constant_decay_monodisperse(const PhysicalParams& p, double x0, double t) {
    const Constant C(p);
    if (p.mode != Mode::decay) throw ParamError("mode: the unified formula is for decay");
    if (!(x0 > 0.0)) throw ParamError("x0: must be > 0");
    check_time(t);
    DensitySnapshot snap = DensitySnapshot::zero(t);
    const double al = p.alpha, k = p.k, a = p.a;
    const double x0a = std::pow(x0, al);
    if (x0a < k * al * t) return snap;
    if (t == 0.0) {
        snap.dirac = Dirac{x0, 1.0};
        return snap;
    }
    const double xda = x0a - k * al * t;
    const double xd = std::pow(xda, 1.0 / al), damp = std::exp(-0.5 * k * a * al * t * t);
    snap.dirac = Dirac{xd, damp * std::exp(-a * xda * t)};
    snap.regular = [al, a, t, xda, damp](double x) {
        if (!(x > 0.0)) return 0.0;
        const double xa = std::pow(x, al), A = a * t * (xa - xda);
        if (!std::isfinite(A)) return 0.0;
        const double f = al > 0 ? std::exp(-a * xa * t) * kummer_1f1(-1.0 / al, 2.0, A)
                                : std::exp(-a * xda * t) * kummer_1f1(2.0 + 1.0 / al, 2.0, -A);
        return damp * a * (al + 1.0) * std::pow(x, al - 1.0) * t * f;
    };
    snap.support_lo = 0.0;
    snap.support_hi = xd;
    return snap;
}

double moments_constant_decay(const PhysicalParams& p, double pw, double t, double x0) {
    const Constant C(p);
    if (p.mode != Mode::decay) throw ParamError("mode: the decay moments need decay");
    if (!(x0 > 0.0)) throw ParamError("x0: must be > 0");
    check_time(t);
    const double al = p.alpha, k = p.k, a = p.a;
    if (!(pw >= 0.0)) throw DomainError("moment: p must be >= 0");
    if (t == 0.0) return std::pow(x0, pw);
    if (al < 0 && !(pw > 1.0 + al)) throw DomainError("moment diverges: alpha < 0 requires p > 1 + alpha");
    const double x0a = std::pow(x0, al);
    if (x0a < k * al * t) return 0.0;
    const double xda = x0a - k * al * t, xd = std::pow(xda, 1.0 / al);
    const double damp = std::exp(-0.5 * k * a * al * t * t), Z = a * t * xda;
    if (al > 0) {
        if (pw == 1.0) return damp * xd;
        return damp * std::pow(xd, pw) * kummer_1f1((pw - 1.0) / al, (pw + al) / al, -Z);
    }
    if (pw == 1.0) return damp * xd * regularized_upper_gamma(-1.0 / al, Z);
    const double lg = boost::math::lgamma((al - pw + 1.0) / al) - boost::math::lgamma(pw / -al);
    return std::exp(lg - 0.5 * k * a * al * t * t - Z) * std::pow(xd, pw) *
           tricomi_psi((al + 1.0) / al, (al + pw) / al, Z);
}

}  // namespace frag
