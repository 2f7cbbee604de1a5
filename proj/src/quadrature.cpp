#include "frag/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace frag::quad {

const Rule& gauss16() {
    static const Rule rule = [] {
        using G = boost::math::quadrature::gauss<double, kNodes>;
        const auto& ab = G::abscissa();  // non-negative half, ascending
        const auto& wt = G::weights();
        Rule r{};
        const int half = kNodes / 2;
        for (int j = 0; j < half; ++j) {
            r.x[half - 1 - j] = -ab[j];
            r.w[half - 1 - j] = wt[j];
            r.x[half + j] = ab[j];
            r.w[half + j] = wt[j];
        }
        return r;
    }();
    return rule;
}

std::vector<double> uniform_breaks(double lo, double hi, int n) {
    std::vector<double> b(n + 1);
    for (int i = 0; i <= n; ++i) b[i] = lo + (hi - lo) * i / n;
    b[n] = hi;
    return b;
}

std::vector<double> graded_breaks(double lo, double hi, int levels, int uniform_cells) {
    // Geometric cells in the first uniform cell, uniform elsewhere.
    const double d = (hi - lo) / uniform_cells;
    std::vector<double> b{lo};
    for (int k = levels; k >= 1; --k) b.push_back(lo + d * std::ldexp(1.0, -k));
    for (int i = 1; i <= uniform_cells; ++i) b.push_back(i == uniform_cells ? hi : lo + d * i);
    return b;
}

std::vector<double> merge_breaks(const std::vector<double>& a, const std::vector<double>& b, double lo,
                                 double hi) {
    std::vector<double> out{lo, hi};
    for (double x : a)
        if (x > lo && x < hi) out.push_back(x);
    for (double x : b)
        if (x > lo && x < hi) out.push_back(x);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](double p, double q) { return std::fabs(p - q) <= 1e-14 * std::max(1.0, std::fabs(p)); }),
              out.end());
    return out;
}

double adaptive(const std::function<double(double)>& f, double lo, double hi, double rel_tol, double* err) {
    boost::math::quadrature::tanh_sinh<double> ts(15);
    double e = 0.0, l1 = 0.0;
    double v = ts.integrate(f, lo, hi, rel_tol, &e, &l1);
    if (!std::isfinite(v)) throw NumericError("adaptive quadrature produced a non-finite value");
    if (err) *err = e;
    return v;
}

}  // namespace frag::quad
