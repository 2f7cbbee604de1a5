#pragma once

#include <string>
#include <vector>

#include "frag/model.hpp"
#include "frag/operator_core.hpp"

// Direct numerical integration of the governing equation. Nothing here
// depends on the closed-form solvers.

namespace frag {

struct LogGrid {
    double x_min = 1e-3;
    double x_max = 20.0;
    int n = 256;

    std::vector<double> points() const;
    /// Spacing in ln x.
    double h() const;
};

/// Weight x^{sign sigma} e^{sign rho x}.
struct NormWeight {
    double sigma = 0.0;
    double rho = 0.0;
    int sign = 1;
};

struct OracleConfig {
    LogGrid grid;
    double dt = 1e-3;
    double t_end = 0.5;
    /// Output times in (0, t_end]; t_end alone when empty.
    std::vector<double> times;
    std::optional<NormWeight> weight;
    /// Switch off one half of the operator (the a -> 0 and k -> 0 limits).
    bool transport = true;
    bool fragmentation = true;

    /// Throws ParamError naming the offending field.
    void validate() const;
};

struct OracleRun {
    std::vector<DensitySnapshot> snapshots;
    /// Nodal values behind each snapshot, on grid.points().
    std::vector<GridFunction> values;
    /// Mass int x u dx carried out through x_min and x_max up to each output time.
    std::vector<double> outflow_mass;
    /// Weighted norm of each snapshot when a weight is configured.
    std::vector<double> weighted_norms;
    std::vector<std::string> warnings;
};

/// Strang splitting: exact-characteristic semi-Lagrangian transport, and a
/// fragmentation step that treats the sink exactly and the gain integral
/// (trapezoid in ln y) implicitly. Second order in dt and in the grid spacing.
OracleRun integrate_pde(const PhysicalParams& p, const InitialCondition& u0, const OracleConfig& cfg);

struct MomentEstimate {
    double value = 0.0;
    double error = 0.0;
};

/// Dirac weight * location^p plus adaptive quadrature of x^p * regular.
/// Throws NumericError when the quadrature misses rel_tol.
MomentEstimate moment_of_snapshot(const DensitySnapshot& s, double pw, double rel_tol = 1e-10);

struct WeightedNorm {
    double value = 0.0;
    /// The last grid cell carries more than 1e-6 of the total.
    bool diverging = false;
};

/// int |f| x^{sign sigma} e^{sign rho x} dx over the grid of f.
WeightedNorm weighted_norm(const GridFunction& f, double sigma, double rho, int sign);

}  // namespace frag
