#include "ctns/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ctns/errors.hpp"

namespace ctns {

SensitivitySpec SensitivitySpec::logarithmic() { return {}; }

SensitivitySpec SensitivitySpec::sub_logarithmic(double theta) {
    if (!(theta > 0.0 && theta < 1.0))
        throw ConfigError("sensitivity: sub-logarithmic theta must lie in (0,1)");
    SensitivitySpec s;
    s.variant = SensitivityVariant::SubLogarithmic;
    s.theta = theta;
    return s;
}

SensitivitySpec SensitivitySpec::rotated_logarithmic(double alpha) {
    SensitivitySpec s;
    s.variant = SensitivityVariant::RotatedLogarithmic;
    s.alpha = alpha;
    return s;
}

SensitivitySpec SensitivitySpec::scaled_logarithmic(double c) {
    if (!(c > 0.0)) throw ConfigError("sensitivity: scale must be positive");
    SensitivitySpec s;
    s.variant = SensitivityVariant::ScaledLogarithmic;
    s.scale = c;
    return s;
}

Matrix2 eval_sensitivity(const SensitivitySpec& spec, double n, double v) {
    (void)n;
    if (!(v > 0.0))
        throw SolverError("eval_sensitivity: v must be positive (positivity lost upstream)");
    switch (spec.variant) {
        case SensitivityVariant::Logarithmic: {
            const double s = 1.0 / v;
            return {{{s, 0.0}, {0.0, s}}};
        }
        case SensitivityVariant::SubLogarithmic: {
            const double s = std::pow(v, -spec.theta);
            return {{{s, 0.0}, {0.0, s}}};
        }
        case SensitivityVariant::RotatedLogarithmic: {
            const double s = 1.0 / v;
            const double c = std::cos(spec.alpha), sn = std::sin(spec.alpha);
            return {{{s * c, -s * sn}, {s * sn, s * c}}};
        }
        case SensitivityVariant::ScaledLogarithmic: {
            const double s = spec.scale / v;
            return {{{s, 0.0}, {0.0, s}}};
        }
    }
    return {};
}

double s0_bound(const SensitivitySpec& spec, double v) {
    switch (spec.variant) {
        case SensitivityVariant::Logarithmic: return 1.0;
        case SensitivityVariant::SubLogarithmic: return std::pow(v, 1.0 - spec.theta);
        case SensitivityVariant::RotatedLogarithmic: return 1.0;
        case SensitivityVariant::ScaledLogarithmic: return spec.scale;
    }
    return 1.0;
}

double operator_norm(const Matrix2& m) {
    // Largest singular value; this form has no cancellation under the roots.
    const double a = m[0][0], b = m[0][1], c = m[1][0], d = m[1][1];
    const double s1 = std::hypot(a + d, b - c);
    const double s2 = std::hypot(a - d, b + c);
    return 0.5 * (s1 + s2);
}

void ModelParams::validate(const Grid& grid) const {
    if (!(eps > 0.0) || eps >= 0.5 * std::min(grid.Lx, grid.Ly))
        throw ConfigError("params: mollifier eps out of range");
    if (!(dt_safety > 0.0 && dt_safety < 1.0))
        throw ConfigError("params: dt_safety must lie in (0,1)");
    if (!(v_floor > 0.0)) throw ConfigError("params: v_floor must be positive");
    if (!(phi.grid == grid)) throw ConfigError("params: phi grid mismatch");
}

ScalarField linear_gravity_potential(const Grid& grid, double g) {
    ScalarField phi(grid);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) phi(i, j) = g * grid.yc(j);
    return phi;
}

std::string ValidationReport::to_string() const {
    if (violations.empty()) return "pass";
    std::ostringstream os;
    for (const auto& v : violations)
        os << v.condition << " (offending value " << v.offending_value << ")\n";
    return os.str();
}

ValidationReport validate_initial_data(const InitialData& data) {
    ValidationReport rep;
    auto add = [&rep](const std::string& cond, double val) {
        rep.violations.push_back({cond, val});
    };

    if (!(data.v0.grid == data.n0.grid) || !(data.w0.grid == data.n0.grid) ||
        !(data.u0.grid == data.n0.grid)) {
        add("fields share a common grid", 0.0);
        return rep;
    }
    if (!all_finite(data.n0) || !all_finite(data.v0) || !all_finite(data.w0) ||
        !all_finite(data.u0)) {
        add("all entries finite", std::numeric_limits<double>::quiet_NaN());
        return rep;
    }
    if (field_min(data.n0) < 0.0) add("n0 nonnegative", field_min(data.n0));
    if (field_max(data.n0) <= 0.0) add("n0 not identically zero", field_max(data.n0));
    if (field_min(data.v0) <= 0.0) add("v0 not strictly positive", field_min(data.v0));
    if (field_min(data.w0) <= 0.0) add("w0 not strictly positive", field_min(data.w0));

    const double div_sup = sup_norm(divergence(data.u0));
    if (div_sup > 1e-10) add("u0 discretely divergence-free", div_sup);
    const double wall = data.u0.wall_normal_sup();
    if (wall != 0.0) add("u0 zero on the boundary", wall);
    return rep;
}

namespace {

// Normalize n0 to the requested mass; quadrature is exact for the
// renormalized field up to one rounding per cell.
void set_mass(ScalarField& n0, double mass) {
    const double current = integrate(n0);
    if (!(current > 0.0)) throw ConfigError("scenario: preset produced nonpositive mass");
    const double scale = mass / current;
    for (double& v : n0.values) v *= scale;
}

// Discrete curl of a node-based stream function: exactly divergence-free on
// the staggered layout, and zero wall-normal flux when psi is constant along
// each wall.
VectorField stream_function_velocity(const Grid& g, double amplitude) {
    const int nx = g.nx, ny = g.ny;
    std::vector<double> psi(static_cast<size_t>(nx + 1) * (ny + 1));
    const double pi = 3.14159265358979323846;
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            // exact zeros on the wall nodes keep the wall-normal trace exact
            const double sx = (i == 0 || i == nx) ? 0.0 : std::sin(pi * i / double(nx));
            const double sy = (j == 0 || j == ny) ? 0.0 : std::sin(pi * j / double(ny));
            psi[static_cast<size_t>(j) * (nx + 1) + i] = amplitude * sx * sy;
        }
    auto P = [&](int i, int j) { return psi[static_cast<size_t>(j) * (nx + 1) + i]; };
    VectorField u(g);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i <= nx; ++i)
            u.fx(i, j) = (P(i, j + 1) - P(i, j)) / g.hy;
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i < nx; ++i)
            u.fy(i, j) = -(P(i + 1, j) - P(i, j)) / g.hx;
    return u;
}

}  // namespace

std::vector<std::string> scenario_names() {
    return {"uniform", "gaussian-bump", "perturbed", "vortex"};
}

InitialData make_scenario(const std::string& kind, const Grid& grid, double mass,
                          double K, const ScenarioOptions& opts) {
    if (!(mass > 0.0)) throw ConfigError("scenario: mass must be positive");
    if (!(K > 0.0)) throw ConfigError("scenario: K must be positive");
    const double n_bar = mass / grid.area();
    const double w_level = opts.w0_level > 0.0 ? opts.w0_level : 2.0 * n_bar;
    const double pi = 3.14159265358979323846;

    InitialData d;
    d.n0 = ScalarField(grid, n_bar);
    d.v0 = ScalarField(grid, K);
    d.w0 = ScalarField(grid, w_level);
    d.u0 = VectorField(grid, 0.0);

    if (kind == "uniform") {
        // flat fields as constructed
    } else if (kind == "gaussian-bump") {
        const double cx = 0.35 * grid.Lx, cy = 0.6 * grid.Ly;
        const double sigma = 0.12 * std::min(grid.Lx, grid.Ly);
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i) {
                const double dx = grid.xc(i) - cx, dy = grid.yc(j) - cy;
                d.n0(i, j) = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            }
        set_mass(d.n0, mass);
    } else if (kind == "perturbed") {
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i) {
                const double cxy = std::cos(pi * grid.xc(i) / grid.Lx) *
                                   std::cos(pi * grid.yc(j) / grid.Ly);
                const double c2 = std::cos(2.0 * pi * grid.xc(i) / grid.Lx) *
                                  std::cos(pi * grid.yc(j) / grid.Ly);
                d.n0(i, j) = n_bar * (1.0 + 0.3 * cxy);
                d.v0(i, j) = K * (1.0 - 0.05 * (1.0 + cxy));
                d.w0(i, j) = w_level * (1.0 + 0.2 * c2);
            }
        set_mass(d.n0, mass);
        d.u0 = stream_function_velocity(grid, opts.u_amp * std::min(grid.Lx, grid.Ly) / pi);
    } else if (kind == "vortex") {
        d.u0 = stream_function_velocity(grid, opts.u_amp * std::min(grid.Lx, grid.Ly) / pi);
    } else {
        throw ConfigError("scenario: unknown preset '" + kind + "'");
    }
    return d;
}

}  // namespace ctns
