#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

namespace frag {

enum class Mode { growth, decay };

/// +1 for growth, -1 for decay: the upper/lower sign of every +- formula.
inline int mode_sign(Mode m) { return m == Mode::growth ? 1 : -1; }

enum class CaseClass { linear, constant, unsupported };

/// Power-law coefficients r(x) = k x^gamma, a(x) = a x^alpha,
/// b(x,y) = ((nu+2)/y)(x/y)^nu.
struct PhysicalParams {
    double alpha = 1.0;
    double nu = 0.0;
    double gamma = 1.0;
    double k = 1.0;
    double a = 1.0;
    Mode mode = Mode::growth;

    /// Throws ParamError naming the offending field.
    void validate() const;
};

struct DerivedParams {
    double beta = 0.0;
    double theta = 0.0;
    double m = 0.0;
    /// Transport exponent in the z variable (not the spectral parameter).
    double mu = 0.0;
    /// sign(alpha): picks J+ (alpha > 0) or J- (alpha < 0).
    int sg = 1;
    CaseClass cls = CaseClass::unsupported;
};

/// Throws UnsupportedConfig if neither the linear nor the constant class applies.
DerivedParams derive(const PhysicalParams& p);

/// Classification without throwing.
CaseClass classify(const PhysicalParams& p);

/// Maps between physical (x, t) and characteristic variables. In the linear
/// class xi = a x^alpha e^{-+beta t} with the rescaled time tau; in the
/// constant class xi = a x^alpha -+ beta t and time is unchanged.
class CharacteristicMaps {
public:
    CharacteristicMaps(const PhysicalParams& p, const DerivedParams& d);

    double xi(double x, double t) const;
    double x_of(double xi, double t) const;
    /// Identity in the constant class.
    double tau(double t) const;
    double t_of(double tau) const;
    /// Supremum of the tau range (infinity when unbounded).
    double tau_limit() const;
    /// z(xi, t), the transformed size along a characteristic.
    double z_of(double xi, double t) const;

private:
    PhysicalParams p_;
    DerivedParams d_;
    int s_;
};

/// A function that vanishes outside [breaks.front(), breaks.back()] and is
/// smooth between consecutive breaks. Every quadrature over a Profile splits
/// at the breaks.
struct Profile {
    std::function<double(double)> f;
    std::vector<double> breaks;

    double operator()(double x) const;
    double lo() const { return breaks.front(); }
    double hi() const { return breaks.back(); }

    /// f on [lo, hi] with `cells` uniform cells.
    static Profile smooth(std::function<double(double)> f, double lo, double hi, int cells);
};

struct Monodisperse {
    double x0;
};

/// Samples on a positive, strictly increasing grid; piecewise linear in ln x,
/// zero outside the grid.
struct Sampled {
    std::vector<double> grid;
    std::vector<double> values;
};

struct InitialCondition {
    std::variant<Monodisperse, Sampled> data;

    static InitialCondition monodisperse(double x0);
    static InitialCondition sampled(std::vector<double> grid, std::vector<double> values);
    /// Samples f on n log-spaced points of [lo, hi].
    static InitialCondition sample(const std::function<double(double)>& f, double lo, double hi, int n);

    bool is_monodisperse() const { return std::holds_alternative<Monodisperse>(data); }
    /// Density of a sampled condition; throws for a Dirac.
    double density(double x) const;
    /// Sampled density as a Profile whose breaks are the grid.
    Profile profile() const;
};

struct Dirac {
    double location;
    double weight;
};

/// Solution at fixed t: an optional Dirac plus a regular part supported on
/// [support_lo, support_hi].
struct DensitySnapshot {
    double t = 0.0;
    std::optional<Dirac> dirac;
    std::function<double(double)> regular;
    double support_lo = 0.0;
    double support_hi = 0.0;
    /// Interior points where the regular part is not smooth.
    std::vector<double> kinks;

    double density(double x) const;
    bool empty() const { return !dirac && !(support_hi > support_lo); }
    static DensitySnapshot zero(double t);
};

/// Transformed initial datum w0(xi) = xi^{-nu/alpha} u0((xi/a)^{1/alpha}).
struct Pushforward {
    std::optional<Dirac> dirac;
    /// Zero for a monodisperse datum.
    Profile regular;
};

Pushforward pushforward_initial(const InitialCondition& u0, const PhysicalParams& p);

/// Regular datum pushed forward from an arbitrary Profile in x.
Profile pushforward_profile(const Profile& u0, const PhysicalParams& p);

/// Dirac weight in z = a x^alpha for a unit Dirac at x0 (and the reverse map).
double dirac_weight_to_z(const PhysicalParams& p, double x0);
double dirac_weight_to_x(const PhysicalParams& p, double z_location, double z_weight);

}  // namespace frag
