#include "frag/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "frag/errors.hpp"

namespace frag {

namespace {

constexpr double kExact = 1e-12;

void require(bool ok, const std::string& field, const std::string& why) {
    if (!ok) throw ParamError(field + ": " + why);
}

}  // namespace

void PhysicalParams::validate() const {
    require(std::isfinite(alpha) && alpha != 0.0, "alpha", "must be finite and nonzero");
    require(std::isfinite(nu) && nu > -2.0 && nu <= 0.0, "nu", "must lie in (-2, 0]");
    require(std::isfinite(gamma) && gamma >= 0.0, "gamma", "must be >= 0");
    require(std::isfinite(k) && k > 0.0, "k", "must be > 0");
    require(std::isfinite(a) && a > 0.0, "a", "must be > 0");
}

CaseClass classify(const PhysicalParams& p) {
    if (std::fabs(p.gamma - 1.0) < kExact) return CaseClass::linear;
    const bool mu0 = std::fabs(p.gamma + p.alpha - 1.0) < kExact;
    const bool theta0 = std::fabs(p.gamma + p.nu) < kExact;
    if (mu0 && theta0 && p.gamma < 2.0 && p.alpha > -1.0 && p.alpha <= 1.0) return CaseClass::constant;
    return CaseClass::unsupported;
}

DerivedParams derive(const PhysicalParams& p) {
    p.validate();
    DerivedParams d;
    const double scale = std::pow(p.a, (1.0 - p.gamma) / p.alpha) * p.k;
    d.beta = scale * p.alpha;
    d.theta = scale * (p.gamma + p.nu);
    d.m = (p.nu + 2.0) / std::fabs(p.alpha);
    d.mu = (p.gamma + p.alpha - 1.0) / p.alpha;
    d.sg = p.alpha > 0 ? 1 : -1;
    d.cls = classify(p);
    switch (d.cls) {
        case CaseClass::linear:
            d.mu = 1.0;
            break;
        case CaseClass::constant:
            d.mu = 0.0;
            d.theta = 0.0;
            break;
        case CaseClass::unsupported:
            throw UnsupportedConfig("parameters are neither linear (gamma = 1) nor constant "
                                    "(alpha = 1 - gamma, gamma = -nu)");
    }
    return d;
}

CharacteristicMaps::CharacteristicMaps(const PhysicalParams& p, const DerivedParams& d)
    : p_(p), d_(d), s_(mode_sign(p.mode)) {
    if (d.cls == CaseClass::unsupported) throw UnsupportedConfig("no characteristic maps for this class");
}

double CharacteristicMaps::xi(double x, double t) const {
    const double z = p_.a * std::pow(x, p_.alpha);
    if (d_.cls == CaseClass::linear) return z * std::exp(-s_ * d_.beta * t);
    return z - s_ * d_.beta * t;
}

double CharacteristicMaps::z_of(double xi, double t) const {
    if (d_.cls == CaseClass::linear) return xi * std::exp(s_ * d_.beta * t);
    return xi + s_ * d_.beta * t;
}

double CharacteristicMaps::x_of(double xi, double t) const {
    const double z = z_of(xi, t);
    if (!(z > 0.0)) throw DomainError("characteristic leaves the physical domain (z <= 0)");
    return std::pow(z / p_.a, 1.0 / p_.alpha);
}

double CharacteristicMaps::tau(double t) const {
    if (d_.cls != CaseClass::linear) return t;
    const double sb = s_ * d_.beta;
    return std::expm1(sb * t) / sb;
}

double CharacteristicMaps::t_of(double tau) const {
    if (d_.cls != CaseClass::linear) return tau;
    const double sb = s_ * d_.beta;
    if (!(tau >= 0.0) || !(1.0 + sb * tau > 0.0)) throw DomainError("tau outside its validity interval");
    return std::log1p(sb * tau) / sb;
}

double CharacteristicMaps::tau_limit() const {
    if (d_.cls == CaseClass::linear && s_ * d_.beta < 0) return 1.0 / std::fabs(d_.beta);
    return std::numeric_limits<double>::infinity();
}

double Profile::operator()(double x) const {
    if (breaks.empty() || x < breaks.front() || x > breaks.back()) return 0.0;
    return f(x);
}

Profile Profile::smooth(std::function<double(double)> f, double lo, double hi, int cells) {
    Profile p{std::move(f), {}};
    p.breaks.resize(cells + 1);
    for (int i = 0; i <= cells; ++i) p.breaks[i] = lo + (hi - lo) * i / cells;
    p.breaks[cells] = hi;
    return p;
}

InitialCondition InitialCondition::monodisperse(double x0) {
    if (!(x0 > 0.0) || !std::isfinite(x0)) throw ParamError("x0: must be finite and > 0");
    return {Monodisperse{x0}};
}

InitialCondition InitialCondition::sampled(std::vector<double> grid, std::vector<double> values) {
    if (grid.size() < 2) throw ParamError("initial.grid: needs at least 2 points");
    if (grid.size() != values.size()) throw ParamError("initial.values: length differs from grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) throw ParamError("initial.grid: points must be positive");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw ParamError("initial.grid: must be strictly increasing");
        if (!(values[i] >= 0.0) || !std::isfinite(values[i]))
            throw ParamError("initial.values: must be finite and nonnegative");
    }
    return {Sampled{std::move(grid), std::move(values)}};
}

InitialCondition InitialCondition::sample(const std::function<double(double)>& f, double lo, double hi, int n) {
    std::vector<double> g(n), v(n);
    const double l0 = std::log(lo), l1 = std::log(hi);
    for (int i = 0; i < n; ++i) {
        g[i] = i == n - 1 ? hi : std::exp(l0 + (l1 - l0) * i / (n - 1));
        v[i] = f(g[i]);
    }
    g[0] = lo;
    v[0] = f(lo);
    return sampled(std::move(g), std::move(v));
}

double InitialCondition::density(double x) const {
    const auto* s = std::get_if<Sampled>(&data);
    if (!s) throw ParamError("initial: density of a Dirac is not a function");
    const auto& g = s->grid;
    if (x < g.front() || x > g.back()) return 0.0;
    auto it = std::upper_bound(g.begin(), g.end(), x);
    if (it == g.end()) return s->values.back();
    const std::size_t i = static_cast<std::size_t>(it - g.begin()) - 1;
    const double w = std::log(x / g[i]) / std::log(g[i + 1] / g[i]);
    return (1.0 - w) * s->values[i] + w * s->values[i + 1];
}

Profile InitialCondition::profile() const {
    const auto* s = std::get_if<Sampled>(&data);
    if (!s) throw ParamError("initial: a Dirac has no regular profile");
    InitialCondition copy = *this;
    return Profile{[copy](double x) { return copy.density(x); }, s->grid};
}

double DensitySnapshot::density(double x) const {
    if (!regular || x < support_lo || x > support_hi) return 0.0;
    return regular(x);
}

DensitySnapshot DensitySnapshot::zero(double t) {
    DensitySnapshot s;
    s.t = t;
    s.regular = [](double) { return 0.0; };
    return s;
}

double dirac_weight_to_z(const PhysicalParams& p, double x0) {
    return std::pow(p.a, 1.0 - p.nu / p.alpha) * std::fabs(p.alpha) * std::pow(x0, p.alpha - p.nu - 1.0);
}

double dirac_weight_to_x(const PhysicalParams& p, double z_location, double z_weight) {
    const double x = std::pow(z_location / p.a, 1.0 / p.alpha);
    return z_weight * std::pow(z_location, p.nu / p.alpha) / (std::fabs(p.alpha) * p.a * std::pow(x, p.alpha - 1.0));
}

Profile pushforward_profile(const Profile& u0, const PhysicalParams& p) {
    std::vector<double> br;
    br.reserve(u0.breaks.size());
    for (double x : u0.breaks) br.push_back(p.a * std::pow(x, p.alpha));
    std::sort(br.begin(), br.end());
    const double e = -p.nu / p.alpha, inv = 1.0 / p.alpha, a = p.a;
    return Profile{[u0, e, inv, a](double xi) {
                       if (!(xi > 0.0)) return 0.0;
                       return std::pow(xi, e) * u0(std::pow(xi / a, inv));
                   },
                   br};
}

Pushforward pushforward_initial(const InitialCondition& u0, const PhysicalParams& p) {
    p.validate();
    Pushforward out;
    if (const auto* m = std::get_if<Monodisperse>(&u0.data)) {
        const double z0 = p.a * std::pow(m->x0, p.alpha);
        out.dirac = Dirac{z0, dirac_weight_to_z(p, m->x0)};
        out.regular = Profile{[](double) { return 0.0; }, {z0, z0}};
        return out;
    }
    out.regular = pushforward_profile(u0.profile(), p);
    return out;
}

}  // namespace frag
