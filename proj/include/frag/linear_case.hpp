#pragma once

#include "frag/model.hpp"
#include "frag/operator_core.hpp"

namespace frag {

/// u(x, t) for gamma = 1 and a regular initial density, by quadrature of the
/// closed form. Throws ParamError outside the linear class.
double solve_linear(const PhysicalParams& p, const Profile& u0, double x, double t);
double solve_linear(const PhysicalParams& p, const InitialCondition& u0, double x, double t);

/// Dirac at x0 e^{+-kt} plus the Kummer-function daughter density on
/// [0, x0 e^{+-kt}].
DensitySnapshot solve_linear_monodisperse(const PhysicalParams& p, double x0, double t);

/// Snapshot for either kind of initial condition.
DensitySnapshot solve_linear_snapshot(const PhysicalParams& p, const InitialCondition& u0, double t);

/// M_p(t) for a unit Dirac at x0. Throws DomainError when the moment diverges
/// (alpha < 0 with p <= 1 + alpha, or p + nu + 1 <= 0).
double moment_linear(const PhysicalParams& p, double pw, double t, double x0);

/// Same solution through the operator calculus: pushforward, lemma21_solution
/// in (xi, tau), back-transform.
double solve_linear_chain(const PhysicalParams& p, const Profile& u0, double x, double t,
                          const SeriesKernel& kernel);

/// Pure fragmentation in the transformed variable (k = 0 limit), unit Dirac at
/// xi0: weight e^{-t xi0} at xi0 plus e^{-t xi} m t 1F1(1 -+ m; 2; t(xi - xi0))
/// on [0, xi0] (sg = +1) or [xi0, inf) (sg = -1).
DensitySnapshot pure_fragmentation_monodisperse(double m, int sg, double xi0, double t);

/// Member of the non-uniqueness family built from a density u0_hat of the
/// spectral parameter (alpha > 0 only).
double spurious_solution(const PhysicalParams& p, const Profile& u0_hat, double x, double t);

/// Closed-form p-th moment of spurious_solution, -(1+nu) < p < 1+alpha.
double spurious_moment(const PhysicalParams& p, const Profile& u0_hat, double pw, double t);

}  // namespace frag
