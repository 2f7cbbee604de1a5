#pragma once

#include <functional>
#include <string>
#include <vector>

#include "frag/model.hpp"

namespace frag {

/// plus: J+[f](x) = int_x^inf f;  minus: J-[f](x) = int_0^x f.
enum class Direction { plus, minus };

inline int direction_sign(Direction d) { return d == Direction::plus ? 1 : -1; }

/// exp_neg: varphi(z) = e^{-z} (sg = +1); exp_pos: varphi(z) = e^{z} (sg = -1).
enum class KernelFamily { exp_neg, exp_pos };

/// Taylor data of phi(z) = (1 + sg z)^{sg m}, Phi(z) = 1/(1 + sg z) and the
/// solution kernel F(z) = sum_n phi_{n+1} z^n / (n! (n+1)!).
struct SeriesKernel {
    double m = 0.0;
    int sg = 1;
    int order = 64;
    /// phi(z) = sum phi_coeffs[n] z^n / n!
    std::vector<double> phi_coeffs;
    /// Phi(z) = sum Phi_coeffs[n] z^n
    std::vector<double> Phi_coeffs;
    /// F(z) = sum F_coeffs[n] z^n
    std::vector<double> F_coeffs;
    /// Coefficients of F for the opposite sign, used through Kummer's relation.
    std::vector<double> F_dual;

    /// Throws NumericError when the truncated tail exceeds 1e-12 of the sum.
    double F(double z) const;
    double phi(double z) const;
};

SeriesKernel build_kernel(KernelFamily family, double m, int order = 64);

/// Samples on a strictly increasing grid, read through local cubic Lagrange
/// interpolation and zero outside [grid.front(), grid.back()].
class GridFunction {
public:
    GridFunction(std::vector<double> grid, std::vector<double> values);
    static GridFunction sample(const std::function<double(double)>& f, std::vector<double> grid);

    double operator()(double x) const;
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return grid_.size(); }
    Profile profile() const;

    /// Interpolant at the 16 Gauss nodes of every grid cell.
    std::vector<double> node_values() const;
    /// Matching node abscissae and weights.
    void nodes(std::vector<double>& x, std::vector<double>& w) const;

private:
    std::vector<double> grid_;
    std::vector<double> values_;
};

/// int |f - g| over the common grid (both interpolants, Gauss-Legendre per cell).
double l1_distance(const GridFunction& f, const GridFunction& g);
double l1_norm(const GridFunction& f);

/// (J^dir)^n[f](x) in the single-integral form
/// ((+-1)^{n-1}/(n-1)!) J^dir[(. - x)^{n-1} f](x).
double apply_J_power(const Profile& f, int n, Direction dir, double x);
GridFunction apply_J_power(const GridFunction& f, int n, Direction dir);

struct Lemma21Options {
    /// Weight of the space X_rho; for sg = -1 the series needs t < rho.
    double rho = 1.0;
};

/// u(x) = u0(x) + t J^dir[F(dir t (. - x)) u0](x).
double lemma21_solution(const SeriesKernel& kernel, const Profile& u0, double t, Direction dir, double x,
                        const Lemma21Options& opt = {});
GridFunction lemma21_solution(const SeriesKernel& kernel, const GridFunction& u0, double t, Direction dir,
                              const Lemma21Options& opt = {});

struct VolterraResult {
    GridFunction u;
    int max_iterations = 0;
    std::vector<std::string> warnings;
};

/// Trapezoidal time marching of u(t) = u0 + m int_0^t Phi(s J) J u(s) ds
/// with Picard iteration of each implicit step.
VolterraResult volterra_oracle(const SeriesKernel& kernel, const GridFunction& u0, double t_end, int steps,
                               Direction dir);

/// (lambda - t J^dir)^{-1}[g](x) = g(x)/lambda + (t/lambda^2) J^dir[e^{dir (t/lambda)(. - x)} g](x).
/// Throws DomainError unless rho lambda^2 - t lambda > 0.
double resolvent(const Profile& g, double t, double lambda, Direction dir, double x, double rho = 1.0);
GridFunction resolvent(const GridFunction& g, double t, double lambda, Direction dir, double rho = 1.0);

/// Same inverse for J[f](xi) = int_xi^0 f on xi < 0.
double resolvent_interval(const Profile& g, double t, double lambda, double xi, double rho = 1.0);

/// (I + t J^dir)^m [g](x) for integer m >= 0 by binomial expansion.
double binomial_power(const Profile& g, double t, int m, Direction dir, double x);

/// (I - t J-)^{-m}[g](x) for integer m >= 0 in its explicit form.
double brp(const Profile& g, double t, int m, double x);

/// J^dir[e^{-kappa (. - x_i)} u](x_i) at every grid point, O(n) by recursion
/// over cells. kappa = 0 gives J^dir u.
std::vector<double> exp_kernel_J(const GridFunction& u, double kappa, Direction dir);

}  // namespace frag
