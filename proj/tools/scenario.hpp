#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "frag/model.hpp"
#include "frag/oracle.hpp"
#include "frag/validation.hpp"

namespace fragsolve {

/// Invalid scenario file; the message starts with the offending field.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Initial datum: a unit Dirac, a Gaussian bump, or explicit samples.
struct InitialSpec {
    std::optional<double> x0;
    std::function<double(double)> density;
    double lo = 0.0, hi = 0.0;
    int samples = 2000;
    std::optional<frag::Sampled> table;

    bool is_dirac() const { return x0.has_value(); }
    /// Smooth representation for the closed forms.
    frag::Profile profile() const;
    /// Sampled representation for the oracle.
    frag::InitialCondition condition() const;
};

struct XEval {
    double lo = 0.01, hi = 5.0;
    int n = 100;
    bool log = true;
    std::vector<double> points() const;
};

struct ValidationSpec {
    frag::OracleConfig oracle;
    std::vector<frag::Refinement> levels;
    double tolerance = 1e-3;
    double order_tolerance = 0.4;
    double moment_tolerance = 1e-6;
    double residual_tolerance = 1e-5;
    double boundary_tolerance = 1e-6;
    /// Points (x, t) for the residual check of the spurious family.
    std::vector<std::pair<double, double>> residual_points;
};

enum class Format { csv, json };

struct Scenario {
    std::string name;
    frag::PhysicalParams params;
    InitialSpec initial;
    /// Spectral datum of the spurious family; replaces `initial` when set.
    std::optional<frag::Profile> spurious_hat;
    std::vector<double> times;
    XEval x_eval;
    std::vector<double> moments;
    bool validate = false;
    ValidationSpec validation;
    std::string output_path;
    Format format = Format::csv;
    std::vector<std::string> warnings;
};

struct Figure {
    std::string name;
    std::vector<Scenario> panels;
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& yaml_text);
Figure load_figure(const std::string& path);

Format parse_format(const std::string& s);

}  // namespace fragsolve
