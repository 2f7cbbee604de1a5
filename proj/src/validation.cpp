#include "frag/validation.hpp"

#include <cmath>
#include <limits>

#include "frag/constant_case.hpp"
#include "frag/errors.hpp"
#include "frag/quadrature.hpp"

namespace frag {

double l1_on_grid(const GridFunction& u, const std::function<double(double)>& exact) {
    const auto& x = u.grid();
    const auto& v = u.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = (i == 0 || i + 1 == x.size()) ? 0.5 : 1.0;
        sum += w * x[i] * std::fabs(v[i] - exact(x[i]));
    }
    return sum * std::log(x.back() / x.front()) / static_cast<double>(x.size() - 1);
}

ConvergenceStudy convergence_study(const PhysicalParams& p, const InitialCondition& u0, const OracleConfig& base,
                                   const std::vector<Refinement>& levels,
                                   const std::function<double(double)>& exact) {
    if (levels.empty()) throw ParamError("levels: need at least one refinement level");
    ConvergenceStudy out;
    out.levels = levels;
    for (const Refinement& r : levels) {
        OracleConfig cfg = base;
        cfg.grid.n = r.n;
        cfg.dt = r.dt;
        cfg.times.clear();
        const OracleRun run = integrate_pde(p, u0, cfg);
        out.l1.push_back(l1_on_grid(run.values.back(), exact));
        out.warnings.insert(out.warnings.end(), run.warnings.begin(), run.warnings.end());
    }
    for (std::size_t i = 1; i < out.l1.size(); ++i) out.orders.push_back(std::log2(out.l1[i - 1] / out.l1[i]));
    return out;
}

double relative_pde_residual(const PhysicalParams& p, const std::function<double(double, double)>& u, double x,
                             double t, double h) {
    const double s = mode_sign(p.mode);
    auto d5 = [h](double fm2, double fm1, double fp1, double fp2) { return (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h); };
    const double ut = d5(u(x, t - 2 * h), u(x, t - h), u(x, t + h), u(x, t + 2 * h));
    auto flux = [&](double y) { return p.k * std::pow(y, p.gamma) * u(y, t); };
    const double fx = d5(flux(x - 2 * h), flux(x - h), flux(x + h), flux(x + 2 * h));
    const double loss = p.a * std::pow(x, p.alpha) * u(x, t);
    const double gain = quad::adaptive(
        [&](double y) {
            if (!(y > x) || !std::isfinite(y)) return 0.0;
            return p.a * std::pow(y, p.alpha) * (p.nu + 2) / y * std::pow(x / y, p.nu) * u(y, t);
        },
        x, std::numeric_limits<double>::infinity(), 1e-11);
    const double res = ut + s * fx + loss - gain;
    return std::fabs(res) / (std::fabs(ut) + std::fabs(fx) + std::fabs(loss) + std::fabs(gain));
}

double boundary_residual(const PhysicalParams& p, const Profile& u0, double xi_lo, int samples) {
    if (constant_case(p) != ConstantCase::growth_positive_alpha)
        throw ParamError("params: the boundary residual applies to constant growth with alpha > 0");
    const DerivedParams d = derive(p);
    const int m = static_cast<int>(std::lround(d.m));
    if (std::fabs(d.m - m) > 1e-12) throw UnsupportedConfig("params: the boundary construction needs integer m");
    if (samples < 2) throw ParamError("samples: need at least 2");
    const Profile w0 = pushforward_profile(u0, p);
    const BoundaryCorrection bc = BoundaryCorrection::from_profile(m, d.beta, w0);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double xi = xi_lo * (1.0 - static_cast<double>(i) / (samples - 1));
        if (xi == 0.0) continue;
        worst = std::max(worst, std::fabs(solve_constant_growth_boundary(p, w0, bc, xi, -xi / d.beta)));
    }
    return worst;
}

}  // namespace frag
