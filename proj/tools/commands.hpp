#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "scenario.hpp"

namespace fragsolve {

/// Empty cells (no Dirac, inadmissible value) are written as "" in CSV and null in JSON.
using Cell = std::variant<std::monostate, double, bool>;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::string> warnings;
};

std::string to_csv(const Table& t);
nlohmann::ordered_json to_json(const Table& t);
std::string render(const Table& t, Format f);

/// Worker cap from FRAGSOLVE_THREADS (default: hardware concurrency).
unsigned thread_cap();

/// Rows t, x, density, dirac_location, dirac_weight.
Table cmd_solve(const Scenario& s);
/// Rows t, p, closed_form, quadrature, abs_diff, shattering_flag.
Table cmd_moments(const Scenario& s);

struct ValidationReport {
    nlohmann::ordered_json json;
    bool pass = true;
};

/// `tolerance` overrides the scenario's L1 tolerance.
ValidationReport cmd_validate(const Scenario& s, std::optional<double> tolerance);

}  // namespace fragsolve
