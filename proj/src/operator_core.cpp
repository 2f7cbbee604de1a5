#include "frag/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "frag/errors.hpp"
#include "frag/kernels.hpp"
#include "frag/quadrature.hpp"

namespace frag {

namespace {

constexpr double kTail = 1e-12;

double horner_with_tail(const std::vector<double>& c, double z, double ratio_scale, const char* what) {
    double sum = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) sum = sum * z + c[i];
    const std::size_t n = c.size();
    const double last = std::fabs(c[n - 1]) * std::pow(std::fabs(z), static_cast<double>(n - 1));
    if (last == 0.0) return sum;
    const double r = std::fabs(z) * ratio_scale;
    const double tail = r < 1.0 ? last * r / (1.0 - r) : std::numeric_limits<double>::infinity();
    if (!(tail <= kTail * std::fabs(sum))) throw NumericError(std::string(what) + ": series truncated too early");
    return sum;
}

double binom(int m, int n) {
    double b = 1.0;
    for (int j = 0; j < n; ++j) b = b * (m - j) / (j + 1);
    return b;
}

// Integral of h over [lo, hi], split at the profile breaks.
template <class H>
double integrate(const H& h, const std::vector<double>& breaks, double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    return quad::composite(h, quad::merge_breaks(breaks, {}, lo, hi));
}

// Integration range of J^dir at x for a profile supported on [lo, hi].
std::pair<double, double> j_range(const Profile& f, Direction dir, double x) {
    if (dir == Direction::plus) return {std::max(x, f.lo()), f.hi()};
    return {std::max(0.0, f.lo()), std::min(x, f.hi())};
}

void check_lemma21(const SeriesKernel& k, double t, const Lemma21Options& opt) {
    if (!(t >= 0.0)) throw DomainError("lemma21: t must be >= 0");
    if (k.sg < 0 && !(t < opt.rho)) throw DomainError("lemma21: t outside the validity radius of the series");
}

void check_spectral(double t, double lambda, double rho) {
    if (lambda == 0.0) throw DomainError("resolvent: lambda must be nonzero");
    if (!(rho * lambda * lambda - t * lambda > 0.0))
        throw DomainError("resolvent: spectral condition rho lambda^2 - t lambda > 0 fails");
}

// Sum over the cells on the J^dir side of grid point i of w * kern(y) * V.
template <class K>
double grid_j_sum(const std::vector<double>& y, const std::vector<double>& w, const std::vector<double>& v,
                  std::size_t cells, std::size_t i, Direction dir, const K& kern) {
    const std::size_t c0 = dir == Direction::plus ? i : 0;
    const std::size_t c1 = dir == Direction::plus ? cells : i;
    if (c1 <= c0) return 0.0;
    const std::size_t a = c0 * quad::kNodes, b = c1 * quad::kNodes;
    std::vector<double> prod(b - a);
    for (std::size_t j = a; j < b; ++j) prod[j - a] = kern(y[j]) * v[j];
    return kernels::dot(prod.data(), w.data() + a, prod.size());
}

void require_nonnegative_grid(const GridFunction& f, Direction dir) {
    if (dir == Direction::minus && f.grid().front() < 0.0)
        throw ParamError("J-: grid must lie in [0, inf)");
}

}  // namespace

double SeriesKernel::F(double z) const {
    // For sg z > 0 the direct series alternates; F_sg(z) = e^{-sg z} F_{-sg}(z)
    // has terms of one sign.
    if (sg * z > 0.0) return std::exp(-sg * z) * horner_with_tail(F_dual, z, 1.0 / order, "kernel F");
    return horner_with_tail(F_coeffs, z, 1.0 / order, "kernel F");
}

double SeriesKernel::phi(double z) const {
    std::vector<double> c(phi_coeffs.size());
    double fact = 1.0;
    for (std::size_t n = 0; n < c.size(); ++n) {
        if (n > 0) fact *= static_cast<double>(n);
        c[n] = phi_coeffs[n] / fact;
    }
    return horner_with_tail(c, z, 1.0, "kernel phi");
}

SeriesKernel build_kernel(KernelFamily family, double m, int order) {
    if (!(m > 0.0) || !std::isfinite(m)) throw ParamError("m: must be finite and > 0");
    if (order < 8 || order > 160) throw ParamError("order: must lie in [8, 160]");
    SeriesKernel k;
    k.m = m;
    k.sg = family == KernelFamily::exp_neg ? 1 : -1;
    k.order = order;
    const int n_max = order;
    k.Phi_coeffs.resize(n_max + 1);
    for (int n = 0; n <= n_max; ++n) k.Phi_coeffs[n] = (n % 2 == 0 || k.sg < 0) ? 1.0 : -1.0;

    // c_n = phi_n / n!, from phi' = m Phi phi: (n+1) c_{n+1} = m sum_j Phi_j c_{n-j}.
    auto taylor = [&](int sg) {
        std::vector<double> c(n_max + 2, 0.0);
        c[0] = 1.0;
        for (int n = 0; n <= n_max; ++n) {
            double s = 0.0;
            for (int j = 0; j <= n; ++j) s += ((j % 2 == 0 || sg < 0) ? 1.0 : -1.0) * c[n - j];
            c[n + 1] = m * s / (n + 1);
        }
        return c;
    };
    const std::vector<double> c = taylor(k.sg), dual = taylor(-k.sg);
    k.phi_coeffs.resize(n_max + 1);
    double fact = 1.0;
    for (int n = 0; n <= n_max; ++n) {
        if (n > 0) fact *= n;
        k.phi_coeffs[n] = c[n] * fact;
    }
    k.F_coeffs.resize(order);
    k.F_dual.resize(order);
    fact = 1.0;
    for (int n = 0; n < order; ++n) {
        if (n > 0) fact *= n;
        k.F_coeffs[n] = c[n + 1] / fact;
        k.F_dual[n] = dual[n + 1] / fact;
    }
    return k;
}

GridFunction::GridFunction(std::vector<double> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (grid_.size() < 4) throw ParamError("grid: needs at least 4 points");
    if (grid_.size() != values_.size()) throw ParamError("values: length differs from grid");
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        if (!std::isfinite(grid_[i]) || !std::isfinite(values_[i])) throw ParamError("grid function: non-finite entry");
        if (i > 0 && !(grid_[i] > grid_[i - 1])) throw ParamError("grid: must be strictly increasing");
    }
}

GridFunction GridFunction::sample(const std::function<double(double)>& f, std::vector<double> grid) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid[i]);
    return GridFunction(std::move(grid), std::move(v));
}

double GridFunction::operator()(double x) const {
    const auto& g = grid_;
    if (x < g.front() || x > g.back()) return 0.0;
    const std::size_t n = g.size();
    std::size_t i = static_cast<std::size_t>(std::upper_bound(g.begin(), g.end(), x) - g.begin());
    i = std::min(std::max<std::size_t>(i, 1), n - 1) - 1;  // x in [g[i], g[i+1]]
    const std::size_t s = std::min(i > 0 ? i - 1 : 0, n - 4);
    double sum = 0.0;
    for (std::size_t a = s; a < s + 4; ++a) {
        double l = 1.0;
        for (std::size_t b = s; b < s + 4; ++b)
            if (b != a) l *= (x - g[b]) / (g[a] - g[b]);
        sum += l * values_[a];
    }
    return sum;
}

Profile GridFunction::profile() const {
    GridFunction copy = *this;
    return Profile{[copy](double x) { return copy(x); }, grid_};
}

void GridFunction::nodes(std::vector<double>& x, std::vector<double>& w) const {
    const quad::Rule& r = quad::gauss16();
    const std::size_t cells = grid_.size() - 1;
    x.resize(cells * quad::kNodes);
    w.resize(cells * quad::kNodes);
    for (std::size_t c = 0; c < cells; ++c) {
        const double m = 0.5 * (grid_[c] + grid_[c + 1]), h = 0.5 * (grid_[c + 1] - grid_[c]);
        for (int j = 0; j < quad::kNodes; ++j) {
            x[c * quad::kNodes + j] = m + h * r.x[j];
            w[c * quad::kNodes + j] = h * r.w[j];
        }
    }
}

std::vector<double> GridFunction::node_values() const {
    std::vector<double> x, w;
    nodes(x, w);
    std::vector<double> v(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) v[j] = (*this)(x[j]);
    return v;
}

double l1_norm(const GridFunction& f) {
    std::vector<double> x, w;
    f.nodes(x, w);
    const std::vector<double> v = f.node_values();
    return kernels::abs_dot(w.data(), v.data(), v.size());
}

double l1_distance(const GridFunction& f, const GridFunction& g) {
    if (f.grid() != g.grid()) throw ParamError("l1_distance: grids differ");
    std::vector<double> d(f.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = f.values()[i] - g.values()[i];
    return l1_norm(GridFunction(f.grid(), std::move(d)));
}

double apply_J_power(const Profile& f, int n, Direction dir, double x) {
    if (n < 1) throw ParamError("apply_J_power: n must be >= 1");
    double scale = 1.0;
    for (int j = 2; j < n; ++j) scale /= j;
    if (dir == Direction::minus && (n - 1) % 2) scale = -scale;
    const auto [lo, hi] = j_range(f, dir, x);
    return scale * integrate([&](double y) { return std::pow(y - x, n - 1) * f.f(y); }, f.breaks, lo, hi);
}

GridFunction apply_J_power(const GridFunction& f, int n, Direction dir) {
    if (n < 1) throw ParamError("apply_J_power: n must be >= 1");
    require_nonnegative_grid(f, dir);
    double scale = 1.0;
    for (int j = 2; j < n; ++j) scale /= j;
    if (dir == Direction::minus && (n - 1) % 2) scale = -scale;
    std::vector<double> y, w;
    f.nodes(y, w);
    const std::vector<double> v = f.node_values();
    const std::size_t cells = f.size() - 1;
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double x = f.grid()[i];
        out[i] = scale * grid_j_sum(y, w, v, cells, i, dir, [&](double s) { return std::pow(s - x, n - 1); });
    }
    if (dir == Direction::plus && std::fabs(f.values().back()) > 1e-10 * std::max(1.0, l1_norm(f)))
        throw NumericError("apply_J_power: integrand tail not resolved by the grid");
    return GridFunction(f.grid(), std::move(out));
}

double lemma21_solution(const SeriesKernel& kernel, const Profile& u0, double t, Direction dir, double x,
                        const Lemma21Options& opt) {
    check_lemma21(kernel, t, opt);
    if (t == 0.0) return u0(x);
    const double d = direction_sign(dir);
    const auto [lo, hi] = j_range(u0, dir, x);
    const double integral =
        integrate([&](double y) { return kernel.F(d * t * (y - x)) * u0.f(y); }, u0.breaks, lo, hi);
    return u0(x) + t * integral;
}

GridFunction lemma21_solution(const SeriesKernel& kernel, const GridFunction& u0, double t, Direction dir,
                              const Lemma21Options& opt) {
    check_lemma21(kernel, t, opt);
    require_nonnegative_grid(u0, dir);
    if (t == 0.0) return u0;
    const double d = direction_sign(dir);
    std::vector<double> y, w;
    u0.nodes(y, w);
    const std::vector<double> v = u0.node_values();
    const std::size_t cells = u0.size() - 1;
    std::vector<double> out(u0.size());
    for (std::size_t i = 0; i < u0.size(); ++i) {
        const double x = u0.grid()[i];
        out[i] = u0.values()[i] +
                 t * grid_j_sum(y, w, v, cells, i, dir, [&](double s) { return kernel.F(d * t * (s - x)); });
    }
    return GridFunction(u0.grid(), std::move(out));
}

std::vector<double> exp_kernel_J(const GridFunction& u, double kappa, Direction dir) {
    require_nonnegative_grid(u, dir);
    const auto& g = u.grid();
    const std::size_t n = g.size();
    std::vector<double> y, w;
    u.nodes(y, w);
    const std::vector<double> v = u.node_values();
    std::vector<double> out(n, 0.0), prod(quad::kNodes);
    // Integral over cell c of e^{-kappa (y - anchor)} u(y).
    auto cell = [&](std::size_t c, double anchor) {
        for (int j = 0; j < quad::kNodes; ++j) {
            const std::size_t k = c * quad::kNodes + j;
            prod[j] = std::exp(-kappa * (y[k] - anchor)) * v[k];
        }
        return kernels::dot(prod.data(), w.data() + c * quad::kNodes, quad::kNodes);
    };
    if (dir == Direction::plus) {
        for (std::size_t i = n - 1; i-- > 0;)
            out[i] = cell(i, g[i]) + std::exp(-kappa * (g[i + 1] - g[i])) * out[i + 1];
    } else {
        for (std::size_t i = 0; i + 1 < n; ++i)
            out[i + 1] = std::exp(kappa * (g[i + 1] - g[i])) * out[i] + cell(i, g[i + 1]);
    }
    return out;
}

VolterraResult volterra_oracle(const SeriesKernel& kernel, const GridFunction& u0, double t_end, int steps,
                               Direction dir) {
    if (steps < 8) throw ParamError("steps: must be >= 8");
    if (!(t_end >= 0.0)) throw ParamError("t_end: must be >= 0");
    VolterraResult res{u0, 0, {}};
    if (t_end == 0.0) return res;
    const double h = t_end / steps, m = kernel.m;
    const double orient = kernel.sg * direction_sign(dir);
    const auto& grid = u0.grid();
    std::vector<double> u = u0.values();
    auto apply = [&](const std::vector<double>& vals, double s) {
        return exp_kernel_J(GridFunction(grid, vals), orient * s, dir);
    };
    for (int n = 0; n < steps; ++n) {
        const double s0 = n * h, s1 = (n + 1) * h;
        const std::vector<double> k0 = apply(u, s0);
        std::vector<double> base(u.size()), next(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) {
            base[i] = u[i] + 0.5 * h * m * k0[i];
            next[i] = u[i] + h * m * k0[i];
        }
        double prev_res = std::numeric_limits<double>::infinity();
        bool done = false;
        int it = 0;
        for (; it < 50 && !done; ++it) {
            const std::vector<double> k1 = apply(next, s1);
            double diff = 0.0, scale = 1.0;
            for (std::size_t i = 0; i < u.size(); ++i) {
                const double v = base[i] + 0.5 * h * m * k1[i];
                diff = std::max(diff, std::fabs(v - next[i]));
                scale = std::max(scale, std::fabs(v));
                next[i] = v;
            }
            const double r = diff / scale;
            if (r < 1e-12) done = true;
            if (!done && it > 0 && r >= prev_res) {
                res.warnings.push_back("Picard residual stopped decreasing at step " + std::to_string(n));
                break;
            }
            prev_res = r;
        }
        if (!done && it == 50) res.warnings.push_back("Picard iteration hit 50 sweeps at step " + std::to_string(n));
        res.max_iterations = std::max(res.max_iterations, it);
        u = std::move(next);
    }
    res.u = GridFunction(grid, std::move(u));
    return res;
}

double resolvent(const Profile& g, double t, double lambda, Direction dir, double x, double rho) {
    check_spectral(t, lambda, rho);
    if (t == 0.0) return g(x) / lambda;
    const double c = direction_sign(dir) * t / lambda;
    const auto [lo, hi] = j_range(g, dir, x);
    const double integral = integrate([&](double y) { return std::exp(c * (y - x)) * g.f(y); }, g.breaks, lo, hi);
    return g(x) / lambda + t / (lambda * lambda) * integral;
}

GridFunction resolvent(const GridFunction& g, double t, double lambda, Direction dir, double rho) {
    check_spectral(t, lambda, rho);
    const std::vector<double> j = exp_kernel_J(g, -direction_sign(dir) * t / lambda, dir);
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = g.values()[i] / lambda + t / (lambda * lambda) * j[i];
    return GridFunction(g.grid(), std::move(out));
}

double resolvent_interval(const Profile& g, double t, double lambda, double xi, double rho) {
    check_spectral(t, lambda, rho);
    if (xi > 0.0) throw DomainError("resolvent_interval: xi must be <= 0");
    const double c = t / lambda;
    const double lo = std::max(xi, g.lo()), hi = std::min(0.0, g.hi());
    const double integral = integrate([&](double y) { return std::exp(c * (y - xi)) * g.f(y); }, g.breaks, lo, hi);
    return g(xi) / lambda + t / (lambda * lambda) * integral;
}

double binomial_power(const Profile& g, double t, int m, Direction dir, double x) {
    if (m < 0) throw ParamError("binomial_power: m must be >= 0");
    if (m == 0 || t == 0.0) return g(x);
    // sum_{n>=1} C(m,n) t^n (J^dir)^n in single-integral form.
    std::vector<double> coef(m);
    double fact = 1.0;
    for (int n = 1; n <= m; ++n) {
        if (n > 2) fact *= n - 1;
        double c = binom(m, n) * std::pow(t, n) / fact;
        if (dir == Direction::minus && (n - 1) % 2) c = -c;
        coef[n - 1] = c;
    }
    const auto [lo, hi] = j_range(g, dir, x);
    const double integral = integrate(
        [&](double y) {
            double p = 0.0;
            for (int n = m; n >= 1; --n) p = p * (y - x) + coef[n - 1];
            return p * g.f(y);
        },
        g.breaks, lo, hi);
    return g(x) + integral;
}

double brp(const Profile& g, double t, int m, double x) {
    if (m < 0) throw ParamError("brp: m must be >= 0");
    if (m == 0 || t == 0.0) return g(x);
    std::vector<double> coef(m);
    double fact = 1.0;
    for (int n = 1; n <= m; ++n) {
        if (n > 2) fact *= n - 1;
        coef[n - 1] = ((n - 1) % 2 ? -1.0 : 1.0) * binom(m, n) * std::pow(t, n) / fact;
    }
    const auto [lo, hi] = j_range(g, Direction::minus, x);
    const double integral = integrate(
        [&](double s) {
            double p = 0.0;
            for (int n = m; n >= 1; --n) p = p * (s - x) + coef[n - 1];
            return std::exp(-t * (s - x)) * p * g.f(s);
        },
        g.breaks, lo, hi);
    return g(x) + integral;
}

}  // namespace frag
