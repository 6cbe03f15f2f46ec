#pragma once

// Scenario configuration, the run/sweep/check entry points behind the CLI,
// and the on-disk artifacts: a CSV time series per run, a JSON summary, and
// a binary checkpoint of the final state.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctns/diagnostics.hpp"
#include "ctns/model.hpp"
#include "ctns/solver.hpp"

namespace ctns {

struct ScenarioConfig {
    int nx = 64, ny = 64;
    double Lx = 1.0, Ly = 1.0;
    std::string preset = "uniform";
    double mass = 0.1;
    double K = 1.0;
    double w0_level = 0.0;  // 0 = auto (twice the homogeneous cell density)
    double u_amp = 0.05;
    std::string sensitivity = "logarithmic";
    double sensitivity_theta = 0.5;
    double sensitivity_alpha = 0.0;
    double sensitivity_c = 1.0;
    double mollifier_eps = 0.1;
    std::string phi = "linear-gravity";  // or file:<path> with nx*ny values
    double gravity = 1.0;
    double T_end = 20.0;
    double sample_interval = 0.05;
    double dt_safety = 0.4;
    double dt_fixed = 0.0;  // 0 = adaptive
    double v_floor = 1e-14;
    double lyapunov_delta = 1e-3;
    bool convective_term = true;
    std::string output_dir = "out/run";
    std::uint64_t seed = 12345;

    void validate() const;
    Grid make_grid() const;
    ModelParams make_params(const Grid& grid) const;
    SensitivitySpec make_sensitivity() const;
    InitialData make_initial_data(const Grid& grid) const;
    RunMetadata make_metadata(const Grid& grid, const InitialData& data) const;

    /// Canonical key = value rendering; parse(to_string(c)) == c.
    std::string to_string() const;

    static ScenarioConfig parse(const std::string& text);
    static ScenarioConfig load(const std::string& path);

    bool operator==(const ScenarioConfig&) const = default;
};

// ---- checkpoints ----

struct Checkpoint {
    SystemState state;
    double mass0 = 0.0;
    int nx = 0, ny = 0;
    double Lx = 0.0, Ly = 0.0;
};

/// Self-describing container: magic, JSON header, then the six arrays
/// (n, v, w, ux, uy, p) as little-endian 64-bit floats in row-major order.
void write_checkpoint(const std::string& path, const SystemState& state, double mass0);
Checkpoint read_checkpoint(const std::string& path);

// ---- run ----

struct FitOutcome {
    bool ok = false;
    RateFit fit;
    std::string error;
};

struct RunResult {
    ScenarioConfig config;
    RunMetadata meta;
    std::vector<DiagnosticsRecord> series;
    std::map<std::string, FitOutcome> fits;  // keyed by record column name
    InvariantReport invariants;
    double max_div_u = 0.0;
    long total_clamps = 0;
    std::string output_dir;
    std::string csv_path;
    std::string summary_path;
    std::string checkpoint_path;
};

/// Integrate the configured scenario to T_end, sampling diagnostics every
/// sample_interval; writes series.csv, summary.json, and final.ckpt under
/// the scenario's output directory. Solver failures persist the last good
/// checkpoint before rethrowing.
RunResult run(const ScenarioConfig& config);

// ---- sweep ----

struct SweepEntry {
    double mass = 0.0;
    bool completed = false;
    bool invariants_pass = false;
    bool f_monotone_after_entry = false;
    std::optional<double> kappa_v;
    std::optional<double> kappa_n;
    std::string error;
    std::string output_dir;
};

struct SweepReport {
    std::vector<SweepEntry> entries;
    std::string summary_path;
};

/// Run the base scenario once per mass (duplicates dropped with a warning),
/// scenarios fanned out across a small worker pool, outputs scenario-scoped.
SweepReport sweep(const ScenarioConfig& base, std::vector<double> masses);

// ---- check ----

struct CheckReport {
    std::vector<InvariantCheck> checks;
    bool all_pass() const;
};

/// Oracle cross-validation plus invariant audit for a config, or a
/// consistency audit of a stored checkpoint.
CheckReport check_config(const ScenarioConfig& config);
CheckReport check_checkpoint(const std::string& path);

/// Expand output_dir under the CTNS_OUTPUT_ROOT environment override.
std::string resolve_output_dir(const std::string& dir);

/// Emit two-column gnuplot-style files, one per tracked quantity, from a
/// run's series.csv.
std::vector<std::string> plot_data(const std::string& csv_path,
                                   const std::string& out_dir);

}  // namespace ctns
