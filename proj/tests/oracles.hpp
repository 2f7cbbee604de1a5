#pragma once

// Independent reference implementations used only by tests.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <random>

namespace oracle {

using big = boost::multiprecision::cpp_bin_float_50;

/// Straight Maclaurin sum of 1F1 in 50-digit arithmetic, no transformations.
inline double hyp1f1_direct(double a, double b, double z) {
    big term = 1, sum = 1, A = a, B = b, Z = z;
    for (int n = 0; n < 5000; ++n) {
        term *= (A + n) * Z / ((B + n) * (n + 1));
        sum += term;
        if (term == 0 || (n > std::fabs(z) + std::fabs(a) && abs(term) < abs(sum) * big("1e-40"))) break;
    }
    return static_cast<double>(sum);
}

template <class F>
double tanh_sinh(F f, double lo, double hi, double tol = 1e-13) {
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(f, lo, hi, tol);
}

template <class F>
double exp_sinh(F f, double tol = 1e-13) {
    boost::math::quadrature::exp_sinh<double> es;
    return es.integrate(f, tol);
}

template <class F>
double kronrod(F f, double lo, double hi, double tol = 1e-13) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 20, tol);
}

inline double rel(double got, double want) {
    return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}

}  // namespace oracle
