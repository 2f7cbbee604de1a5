#pragma once

#include <functional>
#include <string>
#include <vector>

#include "frag/model.hpp"
#include "frag/oracle.hpp"

// Closed form against the direct integrator.

namespace frag {

/// int |u - exact| dx over the grid of u, trapezoid in ln x.
double l1_on_grid(const GridFunction& u, const std::function<double(double)>& exact);

struct Refinement {
    int n;
    double dt;
};

struct ConvergenceStudy {
    std::vector<Refinement> levels;
    /// L1 distance at t_end for each level.
    std::vector<double> l1;
    /// log2 of successive L1 ratios; one fewer than levels.
    std::vector<double> orders;
    std::vector<std::string> warnings;
};

/// Runs integrate_pde at each level (grid.n and dt replaced) and compares
/// the t_end snapshot with exact(x).
ConvergenceStudy convergence_study(const PhysicalParams& p, const InitialCondition& u0, const OracleConfig& base,
                                   const std::vector<Refinement>& levels,
                                   const std::function<double(double)>& exact);

/// |u_t + s(k x^gamma u)_x + a x^alpha u - gain| divided by the sum of the
/// four term magnitudes. Derivatives by 5-point differences with step h, the
/// gain integral by adaptive quadrature to infinity.
double relative_pde_residual(const PhysicalParams& p, const std::function<double(double, double)>& u, double x,
                             double t, double h = 1e-3);

/// Case (iv): max |w+(xi, -xi/beta)| over `samples` points of [xi_lo, 0].
double boundary_residual(const PhysicalParams& p, const Profile& u0, double xi_lo, int samples);

}  // namespace frag
