#include "frag/oracle.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "frag/errors.hpp"
#include "frag/kernels.hpp"
#include "frag/quadrature.hpp"

namespace frag {

std::vector<double> LogGrid::points() const {
    std::vector<double> x(static_cast<std::size_t>(n));
    const double l0 = std::log(x_min), step = h();
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = std::exp(l0 + step * i);
    x.front() = x_min;
    x.back() = x_max;
    return x;
}

double LogGrid::h() const { return std::log(x_max / x_min) / (n - 1); }

void OracleConfig::validate() const {
    auto require = [](bool ok, const char* field, const char* what) {
        if (!ok) throw ParamError(fmt::format("{}: {}", field, what));
    };
    require(std::isfinite(grid.x_min) && grid.x_min > 0.0, "grid.x_min", "must be > 0");
    require(std::isfinite(grid.x_max) && grid.x_max > grid.x_min, "grid.x_max", "must exceed x_min");
    require(grid.n >= 64, "grid.n", "must be >= 64");
    require(std::isfinite(dt) && dt > 0.0, "dt", "must be > 0");
    require(std::isfinite(t_end) && t_end > 0.0, "t_end", "must be > 0");
    for (std::size_t i = 0; i < times.size(); ++i) {
        require(times[i] > 0.0 && times[i] <= t_end, "times", "must lie in (0, t_end]");
        require(i == 0 || times[i] > times[i - 1], "times", "must be strictly increasing");
    }
    if (weight) {
        require(weight->sigma >= 0.0 && weight->rho >= 0.0, "weight", "sigma and rho must be >= 0");
        require(weight->sign == 1 || weight->sign == -1, "weight.sign", "must be +1 or -1");
    }
}

namespace {

constexpr int kWidth = 6;

// Quintic Lagrange weights on nodes 0..5 at fractional position q.
void lagrange6(double q, double w[kWidth]) {
    for (int j = 0; j < kWidth; ++j) {
        double l = 1.0;
        for (int k = 0; k < kWidth; ++k)
            if (k != j) l *= (q - k) / (j - k);
        w[j] = l;
    }
}

struct Stencil {
    int start = -1;  // -1: value is zero, -2: power law below x_min
    double w[kWidth] = {};
    double factor = 0.0;
    bool extrapolate = false;
    bool ghost = false;  // may go negative; not clamped
    double q = 0.0;  // ghost: g(x) / g[start]; power law: grid coordinate of the foot
};

// One transport step of length tau on g = x u: g_new(x) = g(X) (X/x)^{gamma-1}.
class TransportMap {
public:
    // `lag`: time by which the incoming state trails the true solution (Strang half step).
    TransportMap(const PhysicalParams& p, const std::vector<double>& x, double h, double tau, double lag)
        : st_(x.size()) {
        const int s = mode_sign(p.mode), n = static_cast<int>(x.size());
        const double l0 = std::log(x.front());
        // Reference node for the ghost slope, clear of the band that enters during tau.
        int ref = 0;
        double zero = 0.0;  // zeta at which the incoming x^gamma u vanishes
        if (p.gamma < 1.0 && s > 0) {
            const double e = 1.0 - p.gamma;
            zero = -p.k * e * lag;
            const double z = std::pow(x.front(), e) + 2.0 * p.k * e * tau;
            while (ref < n - 1 && std::pow(x[static_cast<std::size_t>(ref)], e) < z) ++ref;
        }
        for (int i = 0; i < n; ++i) {
            const double xi = x[static_cast<std::size_t>(i)];
            Stencil& c = st_[static_cast<std::size_t>(i)];
            double X;
            if (std::fabs(p.gamma - 1.0) < 1e-14) {
                X = xi * std::exp(-s * p.k * tau);
            } else {
                const double e = 1.0 - p.gamma;
                const double base = std::pow(xi, e) - s * p.k * e * tau;
                if (e > 0.0 && base < std::pow(x.front(), e)) {
                    // Foot left of x_min, possibly through 0. x^gamma u is carried rigidly in
                    // zeta = x^(1-gamma); continue it linearly through its zero.
                    // Negative ghost values are kept so the gain step restores them.
                    c.extrapolate = true;
                    c.ghost = true;
                    const double xr = x[static_cast<std::size_t>(ref)];
                    c.q = std::pow(xi / xr, e) * (base - zero) / (std::pow(xr, e) - zero);
                    c.factor = 1.0;
                    c.start = ref;
                    continue;
                }
                if (!(base > 0.0)) continue;  // characteristic enters from infinity
                X = std::pow(base, 1.0 / e);
            }
            c.factor = std::pow(X / xi, p.gamma - 1.0);
            const double q = (std::log(X) - l0) / h;
            if (q > n - 1 + 1e-9) continue;
            if (q < -1e-9) {
                // Feet in (0, x_min): power law through the two smallest nodes.
                c.extrapolate = true;
                c.q = q;
                c.start = -2;
                continue;
            }
            const int cell = std::clamp(static_cast<int>(std::floor(q)), 0, n - 2);
            c.start = std::clamp(cell - 2, 0, n - kWidth);
            lagrange6(q - c.start, c.w);
        }
    }

    void apply(const std::vector<double>& g, std::vector<double>& out) const {
        for (std::size_t i = 0; i < st_.size(); ++i) {
            const Stencil& c = st_[i];
            if (c.start == -1) {
                out[i] = 0.0;
                continue;
            }
            double v;
            if (c.extrapolate) {
                if (c.start >= 0) v = g[static_cast<std::size_t>(c.start)] * c.q;
                else v = g[0] > 0.0 && g[1] > 0.0 ? g[0] * std::pow(g[1] / g[0], c.q) : 0.0;
            } else {
                const auto s = static_cast<std::size_t>(c.start);
                v = 0.0;
                for (int j = 0; j < kWidth; ++j) v += c.w[j] * g[s + static_cast<std::size_t>(j)];
            }
            out[i] = c.ghost ? v * c.factor : std::max(0.0, v * c.factor);
        }
    }

private:
    std::vector<Stencil> st_;
};

// Loss a x^alpha u and gain int_x^{x_max} a y^alpha b(x, y) u(y) dy over one step.
class FragmentationStep {
public:
    FragmentationStep(const PhysicalParams& p, const std::vector<double>& x, double h, double dt)
        : dt_(dt), decay_(x.size()), c_(x.size()), e_(x.size()) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            decay_[i] = std::exp(-p.a * std::pow(x[i], p.alpha) * dt);
            c_[i] = (p.nu + 2.0) * std::pow(x[i], p.nu) * h;
            e_[i] = p.a * std::pow(x[i], p.alpha - p.nu);
        }
    }

    void apply(std::vector<double>& u) const {
        const std::size_t n = u.size();
        std::vector<double> b(n);
        // Explicit half: e^{-A dt} (u + dt/2 G u).
        double S = 0.0;
        const double tail_old = 0.5 * e_[n - 1] * u[n - 1];
        b[n - 1] = decay_[n - 1] * u[n - 1];
        S = e_[n - 1] * u[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) {
            S += e_[i] * u[i];
            const double gain = c_[i] * (S - 0.5 * e_[i] * u[i] - tail_old);
            b[i] = decay_[i] * (u[i] + 0.5 * dt_ * gain);
        }
        // Implicit half by back substitution from x_max.
        u[n - 1] = b[n - 1];
        const double tail_new = 0.5 * e_[n - 1] * u[n - 1];
        S = e_[n - 1] * u[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) {
            const double known = c_[i] * (S - tail_new);
            const double denom = 1.0 - 0.25 * dt_ * c_[i] * e_[i];
            if (!(denom > 0.0)) throw NumericError("integrate_pde: gain term too stiff for dt; reduce dt");
            u[i] = (b[i] + 0.5 * dt_ * known) / denom;
            S += e_[i] * u[i];
        }
    }

private:
    double dt_;
    std::vector<double> decay_, c_, e_;
};

// Trapezoid in ln x of x^2 u.
double grid_mass(const std::vector<double>& x, const std::vector<double>& u, double h) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = (i == 0 || i + 1 == x.size()) ? 0.5 : 1.0;
        m += w * x[i] * x[i] * u[i];
    }
    return m * h;
}

DensitySnapshot make_snapshot(const GridFunction& gf, double t) {
    auto held = std::make_shared<GridFunction>(gf);
    DensitySnapshot s;
    s.t = t;
    s.support_lo = gf.grid().front();
    s.support_hi = gf.grid().back();
    s.regular = [held](double x) { return std::max(0.0, (*held)(x)); };
    return s;
}

}  // namespace

OracleRun integrate_pde(const PhysicalParams& p, const InitialCondition& u0, const OracleConfig& cfg) {
    p.validate();
    cfg.validate();
    if (u0.is_monodisperse()) throw ParamError("initial: integrate_pde needs a sampled initial condition");

    const std::vector<double> x = cfg.grid.points();
    const double h = cfg.grid.h();
    const std::size_t n = x.size();
    std::vector<double> u(n), g(n), tmp(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = u0.density(x[i]);

    std::vector<double> times = cfg.times;
    if (times.empty()) times.push_back(cfg.t_end);

    OracleRun run;
    const double mass0 = grid_mass(x, u, h);
    const int s = mode_sign(p.mode);
    const double xb = s > 0 ? x.back() : x.front();
    const double rb = p.k * std::pow(xb, p.gamma);
    const std::size_t ib = s > 0 ? n - 1 : 0;
    double outflow = 0.0;
    bool warned = false;

    auto transport = [&](const TransportMap& T) {
        for (std::size_t i = 0; i < n; ++i) g[i] = x[i] * u[i];
        T.apply(g, tmp);
        for (std::size_t i = 0; i < n; ++i) u[i] = tmp[i] / x[i];
    };

    double t = 0.0;
    for (const double target : times) {
        const double span = target - t;
        const int steps = std::max(1, static_cast<int>(std::ceil(span / cfg.dt - 1e-9)));
        const double step = span / steps;
        const TransportMap open(p, x, h, 0.5 * step, 0.0), full(p, x, h, step, 0.5 * step),
            close(p, x, h, 0.5 * step, 0.5 * step);
        const FragmentationStep frag(p, x, h, step);

        if (cfg.transport) transport(open);
        for (int k = 0; k < steps; ++k) {
            if (cfg.fragmentation) frag.apply(u);
            if (cfg.transport) {
                outflow += step * rb * u[ib] * xb;
                transport(k + 1 == steps ? close : full);
            }
        }
        t = target;
        for (double& v : u) v = std::max(0.0, v);  // ghost band left of the inflow

        if (!warned && cfg.transport && outflow > 1e-3 * std::fabs(mass0)) {
            run.warnings.push_back(fmt::format(
                "domain exit: mass {:.3e} has left through x = {:g} by t = {:g}", outflow, xb, t));
            warned = true;
        }
        GridFunction gf(x, u);
        run.snapshots.push_back(make_snapshot(gf, t));
        run.outflow_mass.push_back(outflow);
        if (cfg.weight) run.weighted_norms.push_back(weighted_norm(gf, cfg.weight->sigma, cfg.weight->rho, cfg.weight->sign).value);
        run.values.push_back(std::move(gf));
    }
    return run;
}

MomentEstimate moment_of_snapshot(const DensitySnapshot& s, double pw, double rel_tol) {
    if (!(pw >= 0.0)) throw DomainError("moment_of_snapshot: p must be >= 0");
    MomentEstimate m;
    if (s.dirac) m.value = s.dirac->weight * std::pow(s.dirac->location, pw);
    if (!(s.support_hi > s.support_lo)) return m;

    std::vector<double> cuts{s.support_lo};
    for (double k : s.kinks)
        if (k > s.support_lo && k < s.support_hi) cuts.push_back(k);
    cuts.push_back(s.support_hi);
    std::sort(cuts.begin(), cuts.end());

    double body = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double e = 0.0;
        const double lo = cuts[i];
        auto f = [&](double x) {
            const double v = std::pow(x, pw) * s.regular(x);
            // Abscissae can underflow onto an integrable singularity at the lower end.
            return std::isfinite(v) || x - lo > 1e-150 ? v : 0.0;
        };
        body += quad::adaptive(f, lo, cuts[i + 1], rel_tol, &e);
        err += e;
    }
    m.value += body;
    m.error = err / std::max(std::fabs(m.value), 1e-300);
    if (m.error > 1e3 * rel_tol) throw NumericError(fmt::format("moment_of_snapshot: relative error {:.2e}", m.error));
    return m;
}

WeightedNorm weighted_norm(const GridFunction& f, double sigma, double rho, int sign) {
    if (sign != 1 && sign != -1) throw ParamError("sign: must be +1 or -1");
    std::vector<double> xs, ws;
    f.nodes(xs, ws);
    std::vector<double> fv(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        fv[i] = f(xs[i]);
        ws[i] *= std::pow(xs[i], sign * sigma) * std::exp(sign * rho * xs[i]);
        if (!std::isfinite(ws[i] * fv[i])) throw DomainError("weighted_norm: integrand is not finite on the grid");
    }
    WeightedNorm r;
    r.value = kernels::abs_dot(ws.data(), fv.data(), xs.size());
    const std::size_t last = xs.size() - quad::kNodes;
    const double tail = kernels::abs_dot(ws.data() + last, fv.data() + last, quad::kNodes);
    r.diverging = tail > 1e-6 * r.value;
    return r;
}

}  // namespace frag
