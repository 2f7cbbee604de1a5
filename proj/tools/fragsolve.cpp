#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "commands.hpp"
#include "frag/errors.hpp"

#ifndef FRAGSOLVE_SCENARIO_DIR
#define FRAGSOLVE_SCENARIO_DIR "scenarios"
#endif

namespace {

enum Exit { ok = 0, config = 2, numeric = 3, validation = 4 };

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw fragsolve::ConfigError(fmt::format("out: cannot write '{}'", path));
    out << text;
}

void warn(const std::vector<std::string>& ws) {
    for (const auto& w : ws) fmt::print(stderr, "warning: {}\n", w);
}

}  // namespace

int main(int argc, char** argv) {
    using namespace fragsolve;
    CLI::App app{"Closed-form solutions, moments and cross-validation for fragmentation with growth or decay"};
    app.require_subcommand(1);

    std::string config_path, out_path, format_name;
    double tolerance = 0.0;
    auto common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", config_path, "Scenario file (YAML)");
        if (needs_config) c->required();
        sub->add_option("--out", out_path, "Output path (stdout when omitted)");
        sub->add_option("--format", format_name, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    };
    auto* solve = app.add_subcommand("solve", "Density table t,x,density,dirac_location,dirac_weight");
    common(solve, true);
    auto* moments = app.add_subcommand("moments", "Moment table t,p,closed_form,quadrature,abs_diff,shattering_flag");
    common(moments, true);
    auto* validate = app.add_subcommand("validate", "JSON report of closed form against the oracle");
    common(validate, true);
    auto* tol_opt = validate->add_option("--tolerance", tolerance, "L1 tolerance for the oracle comparison");
    auto* figure = app.add_subcommand("figure", "Moment tables behind fig1 or fig2, one file per panel");
    std::string figure_name;
    figure->add_option("name", figure_name, "fig1 or fig2")->required()->check(CLI::IsMember({"fig1", "fig2"}));
    common(figure, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? Exit::ok : Exit::config;
    }

    try {
        if (figure->parsed()) {
            const std::string path =
                config_path.empty() ? fmt::format("{}/{}.yaml", FRAGSOLVE_SCENARIO_DIR, figure_name) : config_path;
            const Figure fig = load_figure(path);
            const Format f = format_name.empty() ? Format::csv : parse_format(format_name);
            const std::filesystem::path dir = out_path.empty() ? "." : out_path;
            std::filesystem::create_directories(dir);
            for (const Scenario& panel : fig.panels) {
                const Table t = cmd_moments(panel);
                warn(t.warnings);
                const auto file = dir / fmt::format("{}_{}.{}", fig.name, panel.name, f == Format::csv ? "csv" : "json");
                emit(render(t, f), file.string());
                fmt::print("{}\n", file.string());
            }
            return Exit::ok;
        }

        const Scenario s = load_scenario(config_path);
        warn(s.warnings);
        const Format f = format_name.empty() ? s.format : parse_format(format_name);
        const std::string dest = out_path.empty() ? s.output_path : out_path;
        if (solve->parsed()) {
            const Table t = cmd_solve(s);
            warn(t.warnings);
            emit(render(t, f), dest);
        } else if (moments->parsed()) {
            const Table t = cmd_moments(s);
            warn(t.warnings);
            emit(render(t, f), dest);
        } else {
            const ValidationReport r = cmd_validate(s, tol_opt->count() ? std::optional<double>(tolerance) : std::nullopt);
            emit(r.json.dump(2) + "\n", dest);
            if (!r.pass) {
                fmt::print(stderr, "validation failed\n");
                return Exit::validation;
            }
        }
        return Exit::ok;
    } catch (const ConfigError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return Exit::config;
    } catch (const frag::ParamError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return Exit::config;
    } catch (const std::exception& e) {
        fmt::print(stderr, "numeric error: {}\n", e.what());
        return Exit::numeric;
    }
}
