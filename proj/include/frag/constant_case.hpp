#pragma once

#include <vector>

#include "frag/model.hpp"
#include "frag/operator_core.hpp"
#include "frag/specfun.hpp"

namespace frag {

/// The four constant-rate configurations, keyed by mode and sign of alpha.
enum class ConstantCase {
    decay_negative_alpha,   // (i)
    growth_negative_alpha,  // (ii)
    decay_positive_alpha,   // (iii)
    growth_positive_alpha,  // (iv)
};

/// Throws ParamError outside the constant class.
ConstantCase constant_case(const PhysicalParams& p);

/// True for (i) and (iv), where the characteristics from t = 0 leave part of
/// the quadrant uncovered.
bool needs_boundary(ConstantCase c);

/// p(zeta) e^{s zeta^2} with s = +-1/2.
struct GaussPoly {
    /// poly[j] multiplies zeta^j.
    std::vector<double> poly;
    double gauss_sign = 0.5;

    GaussPoly derivative() const;
    double poly_value(double zeta) const;
    double operator()(double zeta) const;
};

/// The initial extension psi on xi < 0 that enforces w+(xi, -xi/beta) = 0
/// in case (iv), for integer m.
class BoundaryCorrection {
public:
    /// moments[j] = int_0^inf eta^j w0(eta) d eta, j = 0..m-1.
    BoundaryCorrection(int m, double beta, std::vector<double> moments);
    static BoundaryCorrection from_profile(int m, double beta, const Profile& w0);

    int m() const { return m_; }
    double beta() const { return beta_; }
    const std::vector<double>& moments() const { return moments_; }
    const HermiteBasis& hermite() const { return he_; }

    /// (I + t J+)^m [w0](xi) - w0(xi) for xi <= 0, polynomial in xi and t.
    double F(double xi, double t) const;
    /// Right-hand side g(zeta) = -beta^{m/2} F(zeta sqrt(beta), -zeta/sqrt(beta)).
    double g(double zeta) const;
    /// n-th derivative of y, 0 <= n <= m. Grows like e^{zeta^2/2}.
    double y_derivative(int n, double zeta) const;
    /// He_m(d/dzeta)[y](zeta) - e^{zeta^2/2} g(zeta).
    double hermite_residual(double zeta) const;
    /// n-th derivative of z = e^{-zeta^2/2} y, 0 <= n <= m.
    double z_derivative(int n, double zeta) const;
    /// psi(xi); zero for xi >= 0.
    double psi(double xi) const;
    /// (I + t J)^m [psi](xi) with J[f](xi) = int_xi^0 f, for xi <= 0.
    double correction(double xi, double t) const;

private:
    // e^{-zeta^2/2} int_0^zeta e^{lambda_i (zeta - s) + s^2/2} P(s) ds
    double damped_integral(int i, double zeta) const;

    int m_;
    double beta_;
    std::vector<double> moments_;
    HermiteBasis he_;
    GaussPoly h_;  // e^{s^2/2} g(s)
    std::vector<GaussPoly> h_derivatives_;
    std::vector<GaussPoly> gauss_derivatives_;  // d^n e^{-zeta^2/2}
};

/// w in the characteristic variables away from the boundary:
/// (I + sg t J^sg)^{sg m}[w0](xi) for xi > 0. Integer m goes through the
/// binomial or resolvent expansion, other m through lemma21_solution.
double solve_constant_interior(const PhysicalParams& p, const Profile& w0, double xi, double t);

/// Case (iv): interior solution for xi > 0, F + (I + t J)^m[psi] for xi < 0.
double solve_constant_growth_boundary(const PhysicalParams& p, const Profile& w0, const BoundaryCorrection& bc,
                                      double xi, double t);

/// u(x, t) through pushforward, the characteristic-variable solution and the
/// inverse transform. Cases (i), (iii) and (iv); case (ii) raises
/// UnsupportedConfig because its interval of integration moves with t.
double solve_constant(const PhysicalParams& p, const Profile& u0, double x, double t);

/// Monodisperse data through the same chain; cases (i) and (iii).
DensitySnapshot solve_constant_monodisperse(const PhysicalParams& p, double x0, double t);

/// The unified decay formula, evaluated by quadrature; zero for
/// x^alpha < -k alpha t.
double solve_constant_decay(const PhysicalParams& p, const Profile& u0, double x, double t);

/// Monodisperse decay formula; an empty snapshot after extinction.
DensitySnapshot solve_constant_decay_monodisperse(const PhysicalParams& p, double x0, double t);

/// M_p(t) of the monodisperse decay solution. alpha > 0 needs p >= 0,
/// alpha < 0 needs p > 1 + alpha; otherwise DomainError.
double moments_constant_decay(const PhysicalParams& p, double pw, double t, double x0);

}  // namespace frag
