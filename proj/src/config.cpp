#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ctns/errors.hpp"
#include "ctns/harness.hpp"

namespace ctns {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' has non-numeric value '" + value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    const double v = parse_double(key, value);
    if (v != std::floor(v)) throw ConfigError("config: key '" + key + "' must be an integer");
    return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "on" || value == "true" || value == "1") return true;
    if (value == "off" || value == "false" || value == "0") return false;
    throw ConfigError("config: key '" + key + "' must be on/off");
}

}  // namespace

void ScenarioConfig::validate() const {
    if (nx < 4 || ny < 4) throw ConfigError("config: nx, ny must be >= 4");
    if (!(Lx > 0.0 && Ly > 0.0)) throw ConfigError("config: Lx, Ly must be positive");
    if (!(mass > 0.0)) throw ConfigError("config: mass must be positive");
    if (!(K > 0.0)) throw ConfigError("config: K must be positive");
    if (w0_level < 0.0) throw ConfigError("config: w0_level must be >= 0");
    if (!(T_end >= 0.0)) throw ConfigError("config: T_end must be >= 0");
    if (!(sample_interval > 0.0)) throw ConfigError("config: sample_interval must be positive");
    if (!(dt_safety > 0.0 && dt_safety < 1.0))
        throw ConfigError("config: dt_safety must lie in (0,1)");
    if (dt_fixed < 0.0) throw ConfigError("config: dt_fixed must be >= 0");
    if (!(v_floor > 0.0)) throw ConfigError("config: v_floor must be positive");
    if (!(lyapunov_delta > 0.0)) throw ConfigError("config: lyapunov_delta must be positive");
    if (!(mollifier_eps > 0.0) || mollifier_eps >= 0.5 * std::min(Lx, Ly))
        throw ConfigError("config: mollifier_eps out of range");
    const auto names = scenario_names();
    if (std::find(names.begin(), names.end(), preset) == names.end())
        throw ConfigError("config: unknown preset '" + preset + "'");
    make_sensitivity();  // validates variant-specific parameters
    if (phi != "linear-gravity" && phi.rfind("file:", 0) != 0)
        throw ConfigError("config: phi must be 'linear-gravity' or 'file:<path>'");
}

Grid ScenarioConfig::make_grid() const { return Grid(nx, ny, Lx, Ly); }

SensitivitySpec ScenarioConfig::make_sensitivity() const {
    if (sensitivity == "logarithmic") return SensitivitySpec::logarithmic();
    if (sensitivity == "sub-logarithmic")
        return SensitivitySpec::sub_logarithmic(sensitivity_theta);
    if (sensitivity == "rotated-logarithmic")
        return SensitivitySpec::rotated_logarithmic(sensitivity_alpha);
    if (sensitivity == "scaled-logarithmic")
        return SensitivitySpec::scaled_logarithmic(sensitivity_c);
    throw ConfigError("config: unknown sensitivity '" + sensitivity + "'");
}

ModelParams ScenarioConfig::make_params(const Grid& grid) const {
    ModelParams p;
    if (phi == "linear-gravity") {
        p.phi = linear_gravity_potential(grid, gravity);
    } else {
        const std::string path = phi.substr(5);
        std::ifstream in(path);
        if (!in) throw ConfigError("config: cannot open phi file '" + path + "'");
        p.phi = ScalarField(grid);
        for (double& v : p.phi.values)
            if (!(in >> v)) throw ConfigError("config: phi file too short: " + path);
        double extra;
        if (in >> extra) throw ConfigError("config: phi file has trailing values: " + path);
    }
    p.eps = mollifier_eps;
    p.sensitivity = make_sensitivity();
    p.dt_safety = dt_safety;
    p.v_floor = v_floor;
    p.convective_term = convective_term;
    return p;
}

InitialData ScenarioConfig::make_initial_data(const Grid& grid) const {
    ScenarioOptions opts;
    opts.w0_level = w0_level > 0.0 ? w0_level : -1.0;
    opts.u_amp = u_amp;
    return make_scenario(preset, grid, mass, K, opts);
}

RunMetadata ScenarioConfig::make_metadata(const Grid& grid, const InitialData& data) const {
    RunMetadata meta;
    meta.mass0 = integrate(data.n0);
    meta.area = grid.area();
    meta.n_bar0 = meta.mass0 / meta.area;
    meta.v0_sup = field_max(data.v0);
    meta.w0_l1 = integrate(data.w0);
    meta.w0_mean = mean(data.w0);
    ScalarField z0 = z_field(data.v0, meta.v0_sup, v_floor);
    meta.z0_l1 = integrate(z0);
    meta.s0_at_K = s0_bound(make_sensitivity(), K);
    meta.lyapunov_delta = lyapunov_delta;
    return meta;
}

std::string ScenarioConfig::to_string() const {
    std::ostringstream os;
    os << "# ctns scenario configuration\n";
    os << "nx = " << nx << "\n";
    os << "ny = " << ny << "\n";
    os << "Lx = " << fmt_double(Lx) << "\n";
    os << "Ly = " << fmt_double(Ly) << "\n";
    os << "preset = " << preset << "\n";
    os << "mass = " << fmt_double(mass) << "\n";
    os << "K = " << fmt_double(K) << "\n";
    os << "w0_level = " << fmt_double(w0_level) << "\n";
    os << "u_amp = " << fmt_double(u_amp) << "\n";
    os << "sensitivity = " << sensitivity << "\n";
    os << "sensitivity_theta = " << fmt_double(sensitivity_theta) << "\n";
    os << "sensitivity_alpha = " << fmt_double(sensitivity_alpha) << "\n";
    os << "sensitivity_c = " << fmt_double(sensitivity_c) << "\n";
    os << "mollifier_eps = " << fmt_double(mollifier_eps) << "\n";
    os << "phi = " << phi << "\n";
    os << "gravity = " << fmt_double(gravity) << "\n";
    os << "T_end = " << fmt_double(T_end) << "\n";
    os << "sample_interval = " << fmt_double(sample_interval) << "\n";
    os << "dt_safety = " << fmt_double(dt_safety) << "\n";
    os << "dt_fixed = " << fmt_double(dt_fixed) << "\n";
    os << "v_floor = " << fmt_double(v_floor) << "\n";
    os << "lyapunov_delta = " << fmt_double(lyapunov_delta) << "\n";
    os << "convective_term = " << (convective_term ? "on" : "off") << "\n";
    os << "output_dir = " << output_dir << "\n";
    os << "seed = " << seed << "\n";
    return os.str();
}

ScenarioConfig ScenarioConfig::parse(const std::string& text) {
    ScenarioConfig c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) +
                              " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "nx") c.nx = parse_int(key, value);
        else if (key == "ny") c.ny = parse_int(key, value);
        else if (key == "Lx") c.Lx = parse_double(key, value);
        else if (key == "Ly") c.Ly = parse_double(key, value);
        else if (key == "preset") c.preset = value;
        else if (key == "mass") c.mass = parse_double(key, value);
        else if (key == "K") c.K = parse_double(key, value);
        else if (key == "w0_level") c.w0_level = parse_double(key, value);
        else if (key == "u_amp") c.u_amp = parse_double(key, value);
        else if (key == "sensitivity") c.sensitivity = value;
        else if (key == "sensitivity_theta") c.sensitivity_theta = parse_double(key, value);
        else if (key == "sensitivity_alpha") c.sensitivity_alpha = parse_double(key, value);
        else if (key == "sensitivity_c") c.sensitivity_c = parse_double(key, value);
        else if (key == "mollifier_eps") c.mollifier_eps = parse_double(key, value);
        else if (key == "phi") c.phi = value;
        else if (key == "gravity") c.gravity = parse_double(key, value);
        else if (key == "T_end") c.T_end = parse_double(key, value);
        else if (key == "sample_interval") c.sample_interval = parse_double(key, value);
        else if (key == "dt_safety") c.dt_safety = parse_double(key, value);
        else if (key == "dt_fixed") c.dt_fixed = parse_double(key, value);
        else if (key == "v_floor") c.v_floor = parse_double(key, value);
        else if (key == "lyapunov_delta") c.lyapunov_delta = parse_double(key, value);
        else if (key == "convective_term") c.convective_term = parse_bool(key, value);
        else if (key == "output_dir") c.output_dir = value;
        else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_double(key, value));
        else
            throw ConfigError("config: unknown key '" + key + "' (line " +
                              std::to_string(lineno) + ")");
    }
    c.validate();
    return c;
}

ScenarioConfig ScenarioConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

}  // namespace ctns
