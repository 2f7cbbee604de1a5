#pragma once

#include <vector>

namespace frag {

/// Exact integer type for Hermite coefficients (He_30 needs more than 64 bits).
using exact_int = __int128;

/// Kummer's function 1F1(a;b;z). Negative z goes through the Kummer
/// transformation, so the summed series never alternates.
double kummer_1f1(double a, double b, double z);

/// Tricomi's function U(a;b;z), z > 0.
double tricomi_psi(double a, double b, double z);

/// Gamma(s;x) = int_x^inf e^{-t} t^{s-1} dt.
double upper_incomplete_gamma(double s, double x);

/// Gamma(s;x) / Gamma(s), safe for large s.
double regularized_upper_gamma(double s, double x);

/// Probabilists' Hermite polynomial He_m with its roots.
struct HermiteBasis {
    int degree = 0;
    /// coefficients[j] multiplies zeta^j.
    std::vector<exact_int> coefficients;
    /// Ascending.
    std::vector<double> roots;
    std::vector<double> derivative_at_roots;

    double value(double zeta) const;
    double derivative(double zeta) const;
};

HermiteBasis hermite_basis(int m);

/// He_n(zeta) by the three-term recurrence.
double hermite_he(int n, double zeta);

}  // namespace frag
