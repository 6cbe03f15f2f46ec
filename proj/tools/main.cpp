// ctns command-line tool: run a configured scenario, sweep it over initial
// masses, audit a config or checkpoint against the reference implementations,
// or dump plot-ready columns from a recorded series.
//
// Exit codes: 0 success, 1 invariant failure, 2 solver error,
// 3 configuration error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "ctns/errors.hpp"
#include "ctns/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvariantFailure = 1;
constexpr int kExitSolverError = 2;
constexpr int kExitConfigError = 3;

void print_fit_line(const std::string& name, const ctns::FitOutcome& f) {
    if (f.ok)
        std::printf("  %-12s kappa_hat = %-12.6g R^2 = %.6f  window [%g, %g]\n",
                    name.c_str(), f.fit.kappa_hat, f.fit.r2, f.fit.t_a, f.fit.t_b);
    else
        std::printf("  %-12s (no fit: %s)\n", name.c_str(), f.error.c_str());
}

int cmd_run(const std::string& config_path) {
    const ctns::ScenarioConfig cfg = ctns::ScenarioConfig::load(config_path);
    const ctns::RunResult result = ctns::run(cfg);

    std::printf("run: %zu samples to t = %g, outputs in %s\n", result.series.size(),
                result.series.back().t, result.output_dir.c_str());
    std::printf("  mass drift     %.3e\n",
                std::abs(result.series.back().mass_n - result.meta.mass0) /
                    result.meta.mass0);
    std::printf("  max |div u|    %.3e\n", result.max_div_u);
    std::printf("  v-floor clamps %ld\n", result.total_clamps);
    for (const auto& [name, fit] : result.fits) print_fit_line(name, fit);
    std::fputs(result.invariants.to_string().c_str(), stdout);
    return result.invariants.all_pass() ? kExitOk : kExitInvariantFailure;
}

int cmd_sweep(const std::string& config_path, const std::vector<double>& masses) {
    const ctns::ScenarioConfig cfg = ctns::ScenarioConfig::load(config_path);
    const ctns::SweepReport report = ctns::sweep(cfg, masses);

    std::printf("%-12s %-10s %-10s %-12s %-12s %s\n", "mass", "completed", "invariants",
                "F-monotone", "kappa_v", "error");
    bool all_ok = !report.entries.empty() || masses.empty();
    for (const auto& e : report.entries) {
        std::printf("%-12g %-10s %-10s %-12s %-12s %s\n", e.mass,
                    e.completed ? "yes" : "no", e.invariants_pass ? "pass" : "FAIL",
                    e.f_monotone_after_entry ? "yes" : "no",
                    e.kappa_v ? std::to_string(*e.kappa_v).c_str() : "-",
                    e.error.c_str());
        if (!e.completed || !e.invariants_pass) all_ok = false;
    }
    std::printf("sweep summary: %s\n", report.summary_path.c_str());
    return all_ok ? kExitOk : kExitInvariantFailure;
}

int cmd_check(const std::string& target) {
    ctns::CheckReport report;
    if (std::filesystem::path(target).extension() == ".ckpt")
        report = ctns::check_checkpoint(target);
    else
        report = ctns::check_config(ctns::ScenarioConfig::load(target));

    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& c : report.checks) {
        std::printf("%s  %-32s worst %.3e (threshold %.3e)%s%s\n",
                    c.pass ? "pass" : "FAIL", c.name.c_str(), c.worst, c.threshold,
                    c.detail.empty() ? "" : "  ", c.detail.c_str());
        j.push_back({{"name", c.name},
                     {"pass", c.pass},
                     {"worst", c.worst},
                     {"threshold", c.threshold}});
    }
    std::ofstream("check_report.json") << j.dump(2) << "\n";
    std::printf("machine-readable report: check_report.json\n");
    return report.all_pass() ? kExitOk : kExitInvariantFailure;
}

int cmd_plot_data(const std::string& input, std::string out_dir) {
    namespace fs = std::filesystem;
    std::string csv = input;
    if (fs::is_directory(input)) csv = (fs::path(input) / "series.csv").string();
    if (out_dir.empty()) out_dir = (fs::path(csv).parent_path() / "plot").string();
    const auto files = ctns::plot_data(csv, out_dir);
    for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chemotaxis-fluid simulator with decay diagnostics"};
    app.require_subcommand(1);

    std::string config_path, check_target, plot_input, plot_out;
    std::vector<double> masses;

    auto* run_cmd = app.add_subcommand("run", "integrate one configured scenario");
    run_cmd->add_option("config", config_path, "scenario config file")->required();

    auto* sweep_cmd = app.add_subcommand("sweep", "run the scenario across masses");
    sweep_cmd->add_option("config", config_path, "scenario config file")->required();
    sweep_cmd->add_option("--masses", masses, "initial masses to run")
        ->required()
        ->expected(-1);

    auto* check_cmd =
        app.add_subcommand("check", "cross-validate against the reference stepper");
    check_cmd->add_option("target", check_target, "config file or .ckpt checkpoint")
        ->required();

    auto* plot_cmd =
        app.add_subcommand("plot-data", "emit two-column files per tracked quantity");
    plot_cmd->add_option("input", plot_input, "run directory or series.csv")->required();
    plot_cmd->add_option("--out", plot_out, "output directory for .dat files");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(config_path);
        if (sweep_cmd->parsed()) return cmd_sweep(config_path, masses);
        if (check_cmd->parsed()) return cmd_check(check_target);
        if (plot_cmd->parsed()) return cmd_plot_data(plot_input, plot_out);
    } catch (const ctns::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kExitConfigError;
    } catch (const ctns::SolverError& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return kExitSolverError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitSolverError;
    }
    return kExitOk;
}
