#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "frag/errors.hpp"
#include "frag/kernels.hpp"

namespace frag::quad {

constexpr int kNodes = 16;

/// 16-point Gauss-Legendre rule on [-1, 1], nodes ascending.
struct Rule {
    std::array<double, kNodes> x;
    std::array<double, kNodes> w;
};
const Rule& gauss16();

/// Gauss-Legendre on a single cell.
template <class F>
double cell(F&& f, double lo, double hi) {
    const Rule& r = gauss16();
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    std::array<double, kNodes> v;
    for (int j = 0; j < kNodes; ++j) v[j] = f(c + h * r.x[j]);
    return h * kernels::dot(v.data(), r.w.data(), kNodes);
}

/// Composite rule over consecutive breakpoints; all node values go through
/// a single weighted reduction.
template <class F>
double composite(F&& f, const std::vector<double>& breaks) {
    if (breaks.size() < 2) return 0.0;
    const Rule& r = gauss16();
    const std::size_t cells = breaks.size() - 1;
    std::vector<double> vals(cells * kNodes), wts(cells * kNodes);
    for (std::size_t c = 0; c < cells; ++c) {
        const double lo = breaks[c], hi = breaks[c + 1];
        const double m = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        for (int j = 0; j < kNodes; ++j) {
            vals[c * kNodes + j] = f(m + h * r.x[j]);
            wts[c * kNodes + j] = h * r.w[j];
        }
    }
    return kernels::dot(vals.data(), wts.data(), vals.size());
}

/// Uniform split of [lo, hi] into n cells.
std::vector<double> uniform_breaks(double lo, double hi, int n);

/// Geometric refinement toward lo (for integrable endpoint singularities):
/// cells [lo + d*2^-k, lo + d*2^-(k-1)] down to relative size 2^-levels.
std::vector<double> graded_breaks(double lo, double hi, int levels, int uniform_cells);

/// Merge two sorted breakpoint lists restricted to [lo, hi].
std::vector<double> merge_breaks(const std::vector<double>& a, const std::vector<double>& b, double lo,
                                 double hi);

/// int_lo^inf f. Cells grow geometrically from width h0 (capped at hmax);
/// marching stops once |f| at the cell ends stays below 1e-14 of the running
/// maximum for two consecutive cells.
template <class F>
double to_infinity(F&& f, double lo, double h0, double hmax = std::numeric_limits<double>::infinity(),
                   int max_cells = 4000) {
    double sum = 0.0, fmax = std::fabs(f(lo)), a = lo, h = h0;
    int quiet = 0;
    for (int c = 0; c < max_cells; ++c) {
        const double b = a + h;
        sum += cell(f, a, b);
        const double fb = std::fabs(f(b));
        fmax = std::max(fmax, fb);
        if (fb <= 1e-14 * fmax) {
            if (++quiet >= 2) return sum;
        } else {
            quiet = 0;
        }
        a = b;
        h = std::min(2.0 * h, hmax);
    }
    throw NumericError("quadrature tail not resolved before the cell budget ran out");
}

/// Adaptive tanh-sinh quadrature on [lo, hi] (hi may be +inf); handles
/// integrable endpoint singularities. Returns the estimate, error via *err.
double adaptive(const std::function<double(double)>& f, double lo, double hi, double rel_tol,
                double* err = nullptr);

}  // namespace frag::quad
