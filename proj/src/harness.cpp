#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ctns/errors.hpp"
#include "ctns/harness.hpp"
#include "ctns/oracle.hpp"

namespace ctns {

namespace fs = std::filesystem;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<double> record_row(const DiagnosticsRecord& r) {
    return {r.t,          r.mass_n,     r.sup_v,      r.l1_w,       r.mean_w,
            r.F_value,    r.F_entropy,  r.F_gradz,    r.F_wdev,     r.F_u,
            r.sup_dev_n,  r.sup_v_norm, r.sup_dev_w,  r.grad_z_l2,  r.grad_z_l4,
            r.grad_z_sup, r.u_l2,       r.grad_u_l2,  r.div_u_sup,
            r.gradn_weighted_l2, static_cast<double>(r.clamp_count)};
}

void write_csv(const std::string& path, const std::vector<DiagnosticsRecord>& series) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw SolverError("run: cannot open '" + path + "' for writing");
    const auto& cols = DiagnosticsRecord::column_names();
    for (size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
    out << "\n";
    for (const auto& r : series) {
        const auto row = record_row(r);
        for (size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << fmt17(row[k]);
        out << "\n";
    }
}

nlohmann::ordered_json fits_to_json(const std::map<std::string, FitOutcome>& fits) {
    nlohmann::ordered_json j;
    for (const auto& [name, f] : fits) {
        nlohmann::ordered_json e;
        e["ok"] = f.ok;
        if (f.ok) {
            e["kappa_hat"] = f.fit.kappa_hat;
            e["intercept"] = f.fit.intercept;
            e["window"] = {f.fit.t_a, f.fit.t_b};
            e["r2"] = f.fit.r2;
            e["n_samples"] = f.fit.n_samples;
        } else {
            e["error"] = f.error;
        }
        j[name] = e;
    }
    return j;
}

nlohmann::ordered_json invariants_to_json(const InvariantReport& rep) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& c : rep.checks) {
        nlohmann::ordered_json e;
        e["name"] = c.name;
        e["pass"] = c.pass;
        e["worst"] = c.worst;
        e["worst_t"] = c.worst_t;
        e["threshold"] = c.threshold;
        if (!c.detail.empty()) e["detail"] = c.detail;
        arr.push_back(e);
    }
    return arr;
}

// Quantities fitted for exponential decay at the end of a run.
const std::vector<std::string>& fitted_quantities() {
    static const std::vector<std::string> q = {
        "sup_dev_n", "sup_v_norm", "sup_dev_w", "grad_z_l2", "grad_z_sup", "u_l2"};
    return q;
}

double record_value(const DiagnosticsRecord& r, const std::string& name) {
    if (name == "sup_dev_n") return r.sup_dev_n;
    if (name == "sup_v_norm") return r.sup_v_norm;
    if (name == "sup_dev_w") return r.sup_dev_w;
    if (name == "grad_z_l2") return r.grad_z_l2;
    if (name == "grad_z_sup") return r.grad_z_sup;
    if (name == "u_l2") return r.u_l2;
    throw DiagnosticError("unknown record quantity '" + name + "'");
}

}  // namespace

std::string resolve_output_dir(const std::string& dir) {
    const char* root = std::getenv("CTNS_OUTPUT_ROOT");
    fs::path p(dir);
    if (root && *root && p.is_relative()) p = fs::path(root) / p;
    return p.string();
}

RunResult run(const ScenarioConfig& config) {
    config.validate();
    const Grid grid = config.make_grid();
    const ModelParams params = config.make_params(grid);
    const InitialData data = config.make_initial_data(grid);

    const ValidationReport validation = validate_initial_data(data);
    if (!validation.pass())
        throw ConfigError("run: inadmissible initial data:\n" + validation.to_string());

    RunResult result;
    result.config = config;
    result.meta = config.make_metadata(grid, data);
    result.output_dir = resolve_output_dir(config.output_dir);
    fs::create_directories(result.output_dir);

    Stepper stepper(grid, params);
    SystemState state = make_state(data);

    long clamps = 0;
    result.series.push_back(
        make_record(state, result.meta, clamps, sup_norm(divergence(state.u))));
    result.max_div_u = result.series.back().div_u_sup;

    const std::string last_good = (fs::path(result.output_dir) / "last_good.ckpt").string();
    try {
        long sample_index = 1;
        while (state.t < config.T_end - 1e-12) {
            const double target =
                std::min(config.T_end, sample_index * config.sample_interval);
            while (state.t < target - 1e-12) {
                double cap = target - state.t;
                if (config.dt_fixed > 0.0) cap = std::min(cap, config.dt_fixed);
                const StepReport rep = stepper.step(state, cap);
                clamps += rep.clamp_count;
                result.max_div_u = std::max(result.max_div_u, rep.div_u_sup);
            }
            result.series.push_back(make_record(state, result.meta, clamps,
                                                sup_norm(divergence(state.u))));
            ++sample_index;
        }
    } catch (const std::exception&) {
        write_checkpoint(last_good, state, result.meta.mass0);
        throw;
    }
    result.total_clamps = clamps;

    // decay-rate fits on the last half of the run (positive tails only)
    const double t_a = 0.5 * config.T_end, t_b = config.T_end;
    for (const auto& name : fitted_quantities()) {
        FitOutcome out;
        try {
            std::vector<std::pair<double, double>> pts;
            for (const auto& r : result.series)
                pts.emplace_back(r.t, record_value(r, name));
            out.fit = fit_decay_rate(pts, t_a, t_b);
            out.ok = true;
        } catch (const std::exception& e) {
            out.error = e.what();
        }
        result.fits[name] = out;
    }

    result.invariants = check_invariants(result.series, result.meta);

    result.csv_path = (fs::path(result.output_dir) / "series.csv").string();
    write_csv(result.csv_path, result.series);

    result.checkpoint_path = (fs::path(result.output_dir) / "final.ckpt").string();
    write_checkpoint(result.checkpoint_path, state, result.meta.mass0);

    nlohmann::ordered_json summary;
    summary["config"] = config.to_string();
    summary["metadata"] = {{"mass0", result.meta.mass0},
                           {"n_bar0", result.meta.n_bar0},
                           {"v0_sup", result.meta.v0_sup},
                           {"w0_l1", result.meta.w0_l1},
                           {"w0_mean", result.meta.w0_mean},
                           {"z0_l1", result.meta.z0_l1},
                           {"area", result.meta.area},
                           {"s0_at_K", result.meta.s0_at_K},
                           {"lyapunov_delta", result.meta.lyapunov_delta}};
    summary["samples"] = result.series.size();
    summary["t_final"] = result.series.back().t;
    summary["max_div_u"] = result.max_div_u;
    summary["total_clamps"] = result.total_clamps;
    summary["fits"] = fits_to_json(result.fits);
    summary["invariants"] = invariants_to_json(result.invariants);
    summary["invariants_pass"] = result.invariants.all_pass();
    result.summary_path = (fs::path(result.output_dir) / "summary.json").string();
    std::ofstream(result.summary_path) << summary.dump(2) << "\n";
    return result;
}

SweepReport sweep(const ScenarioConfig& base, std::vector<double> masses) {
    std::sort(masses.begin(), masses.end());
    std::vector<double> unique_masses;
    for (double m : masses) {
        if (!unique_masses.empty() && m == unique_masses.back()) {
            std::cerr << "sweep: duplicate mass " << m << " dropped\n";
            continue;
        }
        unique_masses.push_back(m);
    }

    SweepReport report;
    report.entries.resize(unique_masses.size());
    const std::string root = resolve_output_dir(base.output_dir);
    fs::create_directories(root);

    const unsigned workers = std::max(
        1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                               static_cast<unsigned>(unique_masses.size())));
    std::mutex next_mutex;
    size_t next = 0;

    auto worker = [&]() {
        for (;;) {
            size_t k;
            {
                std::lock_guard<std::mutex> lock(next_mutex);
                if (next >= unique_masses.size()) return;
                k = next++;
            }
            SweepEntry& e = report.entries[k];
            e.mass = unique_masses[k];
            char tag[48];
            std::snprintf(tag, sizeof(tag), "mass_%.12g", e.mass);
            ScenarioConfig cfg = base;
            cfg.mass = e.mass;
            cfg.output_dir = (fs::path(base.output_dir) / tag).string();
            e.output_dir = resolve_output_dir(cfg.output_dir);
            try {
                RunResult r = run(cfg);
                e.completed = true;
                e.invariants_pass = r.invariants.all_pass();
                for (const auto& c : r.invariants.checks)
                    if (c.name == "conditional-F-decay") e.f_monotone_after_entry = c.pass;
                if (r.fits.at("sup_v_norm").ok)
                    e.kappa_v = r.fits.at("sup_v_norm").fit.kappa_hat;
                if (r.fits.at("sup_dev_n").ok)
                    e.kappa_n = r.fits.at("sup_dev_n").fit.kappa_hat;
            } catch (const std::exception& ex) {
                e.error = ex.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < workers; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& e : report.entries) {
        nlohmann::ordered_json item;
        item["mass"] = e.mass;
        item["completed"] = e.completed;
        item["invariants_pass"] = e.invariants_pass;
        item["f_monotone_after_entry"] = e.f_monotone_after_entry;
        if (e.kappa_v) item["kappa_v"] = *e.kappa_v;
        if (e.kappa_n) item["kappa_n"] = *e.kappa_n;
        if (!e.error.empty()) item["error"] = e.error;
        item["output_dir"] = e.output_dir;
        j.push_back(item);
    }
    report.summary_path = (fs::path(root) / "sweep_summary.json").string();
    std::ofstream(report.summary_path) << j.dump(2) << "\n";
    return report;
}

bool CheckReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const InvariantCheck& c) { return c.pass; });
}

namespace {

InvariantCheck make_check(const std::string& name, double worst, double threshold,
                          const std::string& detail = "") {
    InvariantCheck c;
    c.name = name;
    c.worst = worst;
    c.threshold = threshold;
    c.pass = worst <= threshold;
    c.detail = detail;
    return c;
}

// Flat state whose spatial terms are inert: exercises the coupled step
// ordering and the reaction integrators against a brute-force stepper.
SystemState flat_state(const Grid& g, double n_level, double w_level, double v_level) {
    InitialData d;
    d.n0 = ScalarField(g, n_level);
    d.v0 = ScalarField(g, v_level);
    d.w0 = ScalarField(g, w_level);
    d.u0 = VectorField(g, 0.0);
    return make_state(d);
}

double max_rel_diff(const ScalarField& a, const ScalarField& b) {
    double scale = std::max(sup_norm(a), sup_norm(b));
    if (scale == 0.0) scale = 1.0;
    double m = 0.0;
    for (size_t k = 0; k < a.values.size(); ++k)
        m = std::max(m, std::abs(a.values[k] - b.values[k]));
    return m / scale;
}

}  // namespace

CheckReport check_config(const ScenarioConfig& config) {
    config.validate();
    CheckReport report;

    // 1. coupled flat-state equivalence against the reference stepper
    {
        const Grid g(16, 16, 1.0, 1.0);
        ModelParams p;
        p.phi = linear_gravity_potential(g, 1.0);
        p.eps = 0.1;
        p.sensitivity = config.make_sensitivity();
        p.dt_safety = 0.9;
        SystemState a = flat_state(g, 0.098, 0.1, 1.0);
        SystemState b = a;
        Stepper stepper(g, p);
        const double h = std::min(g.hx, g.hy);
        const double dt = h * h / 8.0;  // the reference stepper's stability limit
        for (int k = 0; k < 200; ++k) {
            stepper.step(a, dt);
            b = oracle::explicit_reference_step(b, p, dt);
        }
        const double worst = std::max(
            {max_rel_diff(a.n, b.n), max_rel_diff(a.v, b.v), max_rel_diff(a.w, b.w)});
        report.checks.push_back(
            make_check("oracle-coupled-flat-200-steps", worst, 1e-6));
    }

    // 2. pure-diffusion equivalence (no drift, no transport)
    {
        const Grid g(16, 16, 1.0, 1.0);
        ModelParams p;
        p.phi = ScalarField(g, 0.0);
        p.eps = 0.1;
        p.dt_safety = 0.9;
        InitialData d;
        d.n0 = ScalarField(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                d.n0(i, j) = 1.0 + 0.5 * std::cos(3.14159265358979323846 * g.xc(i) / g.Lx);
        d.v0 = ScalarField(g, 1.0);
        d.w0 = ScalarField(g, 1.0);
        d.u0 = VectorField(g, 0.0);
        SystemState a = make_state(d);
        SystemState b = a;
        Stepper stepper(g, p);
        const double dt = std::min(g.hx, g.hy) * std::min(g.hx, g.hy) / 8.0;
        for (int k = 0; k < 200; ++k) {
            ScalarField na = stepper.advance_n(a, dt);
            a.n = na;
            b = oracle::explicit_reference_step(b, p, dt);
        }
        report.checks.push_back(
            make_check("oracle-pure-diffusion-200-steps", max_rel_diff(a.n, b.n), 1e-8));
    }

    // 3. flat run against the closed-form reduction
    {
        const Grid g(16, 16, 2.0, 2.0);
        ModelParams p;
        p.phi = linear_gravity_potential(g, 1.0);
        p.eps = 0.1;
        p.dt_safety = 0.9;
        SystemState s = flat_state(g, 0.1, 0.2, 1.0);
        Stepper stepper(g, p);
        double worst = 0.0;
        while (s.t < 5.0 - 1e-12) {
            stepper.step(s, std::min(1e-3, 5.0 - s.t));
            const auto [wc, vc] = oracle::homogeneous_closed_form(0.1, 0.2, 1.0, s.t);
            worst = std::max(worst, std::abs(field_max(s.w) - wc));
            worst = std::max(worst, std::abs(field_max(s.v) - vc));
        }
        report.checks.push_back(make_check("oracle-homogeneous-closed-form", worst, 1e-6));
    }

    // 4. invariant audit on a short run of the provided configuration
    {
        ScenarioConfig short_cfg = config;
        short_cfg.T_end = std::min(config.T_end, 2.0);
        short_cfg.output_dir = config.output_dir + "/check_run";
        const RunResult r = run(short_cfg);
        for (const auto& c : r.invariants.checks) report.checks.push_back(c);
    }
    return report;
}

CheckReport check_checkpoint(const std::string& path) {
    Checkpoint ck = read_checkpoint(path);
    CheckReport report;
    const SystemState& s = ck.state;

    const bool finite = all_finite(s.n) && all_finite(s.v) && all_finite(s.w) &&
                        all_finite(s.u) && all_finite(s.p);
    report.checks.push_back(make_check("fields-finite", finite ? 0.0 : 1.0, 0.5));
    if (!finite) return report;

    report.checks.push_back(make_check(
        "mass-conservation", std::abs(integrate(s.n) - ck.mass0) / ck.mass0, 1e-10));
    report.checks.push_back(
        make_check("n-nonnegative", -field_min(s.n), 1e-14 * sup_norm(s.n)));
    report.checks.push_back(
        make_check("v-positive", field_min(s.v) > 0.0 ? 0.0 : 1.0, 0.5));
    report.checks.push_back(
        make_check("w-positive", field_min(s.w) > 0.0 ? 0.0 : 1.0, 0.5));
    report.checks.push_back(
        make_check("max-principle-v", field_max(s.v) - s.v0_sup, 1e-12));
    report.checks.push_back(
        make_check("divergence-free", sup_norm(divergence(s.u)), 1e-8));
    return report;
}

std::vector<std::string> plot_data(const std::string& csv_path,
                                   const std::string& out_dir) {
    std::ifstream in(csv_path);
    if (!in) throw ConfigError("plot-data: cannot open '" + csv_path + "'");
    std::string header;
    if (!std::getline(in, header)) throw ConfigError("plot-data: empty series file");

    std::vector<std::string> cols;
    {
        std::istringstream hs(header);
        std::string c;
        while (std::getline(hs, c, ',')) cols.push_back(c);
    }
    if (cols.empty() || cols[0] != "t")
        throw ConfigError("plot-data: series file does not start with a t column");

    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != cols.size())
            throw ConfigError("plot-data: ragged row in series file");
        rows.push_back(std::move(row));
    }

    fs::create_directories(out_dir);
    std::vector<std::string> written;
    for (size_t c = 1; c < cols.size(); ++c) {
        const std::string path = (fs::path(out_dir) / (cols[c] + ".dat")).string();
        std::ofstream out(path, std::ios::trunc);
        for (const auto& row : rows)
            out << fmt17(row[0]) << " " << fmt17(row[c]) << "\n";
        written.push_back(path);
    }
    return written;
}

}  // namespace ctns
