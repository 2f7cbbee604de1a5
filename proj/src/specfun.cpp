#include "frag/specfun.hpp"

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>
#include <algorithm>
#include <cmath>
#include <limits>

#include "frag/errors.hpp"
#include "frag/quadrature.hpp"

namespace frag {

namespace {

constexpr int kMaxTerms = 200000;
constexpr double kRescale = 1e250;
const double kLogRescale = std::log(kRescale);

bool nonpositive_integer(double v) { return v <= 0.0 && v == std::floor(v); }

// ln|Gamma(v)|, sign of Gamma(v) in `sign`.
double lgamma_signed(double v, double& sign) {
    int sg = 1;
    const double l = boost::math::lgamma(v, &sg);
    sign = sg;
    return l;
}

// Maclaurin sum of 1F1 returned as mant * exp(lscale).
struct Scaled {
    double mant;
    double lscale;
};

Scaled maclaurin(double a, double b, double z) {
    double term = 1.0, sum = 1.0, lscale = 0.0;
    int small = 0;
    for (int n = 0; n < kMaxTerms; ++n) {
        term *= (a + n) * z / ((b + n) * (n + 1.0));
        sum += term;
        if (term == 0.0) return {sum, lscale};
        if (std::fabs(sum) > kRescale) {
            sum /= kRescale;
            term /= kRescale;
            lscale += kLogRescale;
        }
        // Only trust the size test once the terms are shrinking.
        const bool shrinking = std::fabs((a + n + 1) * z) < std::fabs((b + n + 1) * (n + 2.0));
        if (shrinking && std::fabs(term) < 1e-16 * std::fabs(sum)) {
            if (++small == 3) return {sum, lscale};
        } else {
            small = 0;
        }
    }
    throw NumericError("1F1 series did not converge");
}

// Terminating series for a = -n: exactly n + 1 terms.
double polynomial_1f1(int n, double b, double z) {
    double term = 1.0, sum = 1.0;
    for (int k = 0; k < n; ++k) {
        term *= (k - n) * z / ((b + k) * (k + 1.0));
        sum += term;
    }
    return sum;
}

// U(a;b;z) = 1/Gamma(a) int_0^inf e^{-zt} t^{a-1} (1+t)^{b-a-1} dt, a > 0.
double psi_integral(double a, double b, double z) {
    const double lg = std::lgamma(a);
    auto log_g = [&](double t) { return -z * t + (b - a - 1.0) * std::log1p(t) - lg; };

    // First cell [0, h0]: t = h0 u^{1/a} absorbs t^{a-1}.
    const double h0 = 1e-6 * std::min(1.0, 1.0 / z);
    double sum = quad::cell(
        [&](double u) {
            const double t = h0 * std::pow(u, 1.0 / a);
            return std::exp(log_g(t) + a * std::log(h0) - std::log(a));
        },
        0.0, 1.0);

    auto f = [&](double t) { return std::exp(log_g(t) + (a - 1.0) * std::log(t)); };
    // Geometric cells, width capped where e^{-zt} dominates.
    const double hmax = 4.0 / z;
    double lo = h0, h = h0;
    for (int c = 0; c < 20000; ++c) {
        const double hi = lo + h;
        const double part = quad::cell(f, lo, hi);
        sum += part;
        if (z * hi > 40.0 + 2.0 * (std::fabs(a) + std::fabs(b)) && std::fabs(part) < 1e-18 * std::fabs(sum)) {
            return sum;
        }
        lo = hi;
        h = std::min(2.0 * h, hmax);
    }
    throw NumericError("Tricomi integral did not converge");
}

// Large negative argument: 1F1(a;b;-x) ~ Gamma(b)/Gamma(b-a) x^{-a}
// sum_s (a)_s (a-b+1)_s / s! x^{-s}; the e^{-x} branch is below double
// precision once x > 60. Returns NaN when the series does not settle.
double asymptotic_negative(double a, double b, double x) {
    double term = 1.0, sum = 1.0;
    for (int s = 0; s < 200; ++s) {
        const double next = term * (a + s) * (a - b + 1.0 + s) / ((s + 1.0) * x);
        if (std::fabs(next) >= std::fabs(term) && s > 0) break;
        term = next;
        sum += term;
        if (std::fabs(term) < 1e-17 * std::fabs(sum)) {
            double sg = 1.0;
            const double lg = std::lgamma(b) - lgamma_signed(b - a, sg);
            return sg * std::exp(lg - a * std::log(x)) * sum;
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double pochhammer(double x, int n) {
    double p = 1.0;
    for (int k = 0; k < n; ++k) p *= x + k;
    return p;
}

}  // namespace

double kummer_1f1(double a, double b, double z) {
    if (nonpositive_integer(b)) throw DomainError("1F1: b is a nonpositive integer");
    if (std::isnan(a) || std::isnan(b) || std::isnan(z)) throw DomainError("1F1: NaN argument");
    if (z == 0.0 || a == 0.0) return 1.0;
    if (nonpositive_integer(a) && a > -1e6) return polynomial_1f1(static_cast<int>(-a), b, z);
    if (z < -60.0 && b > 0.0 && !nonpositive_integer(b - a)) {
        const double v = asymptotic_negative(a, b, -z);
        if (std::isfinite(v)) return v;
    }
    if (z < 0.0) {
        const Scaled s = maclaurin(b - a, b, -z);
        return s.mant * std::exp(z + s.lscale);
    }
    const Scaled s = maclaurin(a, b, z);
    const double v = s.mant * std::exp(s.lscale);
    if (!std::isfinite(v)) throw OverflowError("1F1 exceeds double range");
    return v;
}

double tricomi_psi(double a, double b, double z) {
    if (!(z > 0.0)) throw DomainError("U(a;b;z) requires z > 0");
    if (a == 0.0) return 1.0;
    if (nonpositive_integer(a)) {
        const int n = static_cast<int>(-a);
        const double sgn = (n % 2) ? -1.0 : 1.0;
        return sgn * pochhammer(b, n) * kummer_1f1(a, b, z);
    }
    if (a > 0.0) return psi_integral(a, b, z);
    // Kummer reflection U(a;b;z) = z^{1-b} U(a-b+1; 2-b; z).
    const double a2 = a - b + 1.0;
    if (a2 == 0.0) return std::pow(z, 1.0 - b);
    if (a2 > 0.0) return std::pow(z, 1.0 - b) * psi_integral(a2, 2.0 - b, z);
    if (nonpositive_integer(a2)) return std::pow(z, 1.0 - b) * tricomi_psi(a2, 2.0 - b, z);
    throw DomainError("U(a;b;z): a < 0 and a-b+1 < 0 not supported");
}

double regularized_upper_gamma(double s, double x) {
    if (!(s > 0.0)) throw DomainError("incomplete gamma requires s > 0");
    if (!(x >= 0.0)) throw DomainError("incomplete gamma requires x >= 0");
    if (x == 0.0) return 1.0;
    const double lpre = -x + s * std::log(x) - std::lgamma(s);
    if (x < s + 1.0) {
        double term = 1.0 / s, sum = term;
        for (int n = 1; n < kMaxTerms; ++n) {
            term *= x / (s + n);
            sum += term;
            if (std::fabs(term) < 1e-17 * sum) return 1.0 - std::exp(lpre) * sum;
        }
        throw NumericError("incomplete gamma series did not converge");
    }
    // Modified Lentz evaluation of the continued fraction for Gamma(s;x).
    const double tiny = 1e-300;
    double bq = x + 1.0 - s, c = 1.0 / tiny, d = 1.0 / bq, h = d;
    for (int i = 1; i < kMaxTerms; ++i) {
        const double an = -i * (i - s);
        bq += 2.0;
        d = an * d + bq;
        if (std::fabs(d) < tiny) d = tiny;
        c = bq + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) return std::exp(lpre) * h;
    }
    throw NumericError("incomplete gamma continued fraction did not converge");
}

double upper_incomplete_gamma(double s, double x) {
    if (!(s > 0.0)) throw DomainError("incomplete gamma requires s > 0");
    if (!(x >= 0.0)) throw DomainError("incomplete gamma requires x >= 0");
    if (x == 0.0) return std::tgamma(s);
    if (x >= s + 1.0) {
        // Direct continued fraction keeps full relative accuracy in the tail.
        return regularized_upper_gamma(s, x) * std::tgamma(s);
    }
    double term = 1.0 / s, sum = term;
    for (int n = 1; n < kMaxTerms; ++n) {
        term *= x / (s + n);
        sum += term;
        if (std::fabs(term) < 1e-17 * sum) break;
    }
    return std::tgamma(s) - std::exp(-x + s * std::log(x)) * sum;
}

namespace {

long double he_long(int n, long double zeta) {
    if (n == 0) return 1.0L;
    long double prev = 1.0L, cur = zeta;
    for (int k = 1; k < n; ++k) {
        const long double next = zeta * cur - k * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

}  // namespace

double hermite_he(int n, double zeta) { return static_cast<double>(he_long(n, zeta)); }

double HermiteBasis::value(double zeta) const { return hermite_he(degree, zeta); }

double HermiteBasis::derivative(double zeta) const {
    return degree == 0 ? 0.0 : degree * hermite_he(degree - 1, zeta);
}

HermiteBasis hermite_basis(int m) {
    if (m < 1 || m > 30) throw ParamError("hermite_basis supports 1 <= m <= 30");
    HermiteBasis hb;
    hb.degree = m;
    hb.coefficients.assign(m + 1, 0);
    // Coefficient of zeta^{m-2i}: (-1)^i C(m,2i) (2i-1)!!
    for (int i = 0; 2 * i <= m; ++i) {
        exact_int binom = 1;
        for (int j = 0; j < 2 * i; ++j) binom = binom * (m - j) / (j + 1);
        exact_int dfact = 1;
        for (int j = 2 * i - 1; j > 1; j -= 2) dfact *= j;
        hb.coefficients[m - 2 * i] = ((i % 2) ? -1 : 1) * binom * dfact;
    }

    // Jacobi matrix of the monic recurrence: zero diagonal, sqrt(k) off it.
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m, m);
    for (int k = 1; k < m; ++k) jac(k, k - 1) = jac(k - 1, k) = std::sqrt(static_cast<double>(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac, Eigen::EigenvaluesOnly);
    std::vector<double> r(es.eigenvalues().data(), es.eigenvalues().data() + m);
    std::sort(r.begin(), r.end());
    for (double& x : r) {
        const long double xl = x;
        x = static_cast<double>(xl - he_long(m, xl) / (m * he_long(m - 1, xl)));
    }
    for (int i = 0; i < m / 2; ++i) {
        const double s = 0.5 * (r[m - 1 - i] - r[i]);
        r[i] = -s;
        r[m - 1 - i] = s;
    }
    if (m % 2) r[m / 2] = 0.0;
    hb.roots = r;
    hb.derivative_at_roots.resize(m);
    for (int i = 0; i < m; ++i) hb.derivative_at_roots[i] = hb.derivative(r[i]);
    return hb;
}

}  // namespace frag
