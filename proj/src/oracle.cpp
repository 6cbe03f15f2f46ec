#include "ctns/oracle.hpp"

#include <cmath>

#include "ctns/errors.hpp"

namespace ctns {
namespace oracle {

double HomogeneousSolution::w(double t) const {
    return n_bar + (w0 - n_bar) * std::exp(-t);
}

double HomogeneousSolution::v(double t) const {
    return v0 * std::exp(-n_bar * t - (w0 - n_bar) * (-std::expm1(-t)));
}

std::pair<double, double> homogeneous_closed_form(double n_bar, double w0, double v0,
                                                  double t) {
    if (!(n_bar >= 0.0 && w0 > 0.0 && v0 > 0.0))
        throw DiagnosticError("homogeneous_closed_form: needs n_bar >= 0, w0 > 0, v0 > 0");
    HomogeneousSolution sol{n_bar, w0, v0};
    return {sol.w(t), sol.v(t)};
}

ScalarField manufactured_heat_solution(const Grid& grid, double t) {
    const double pi = 3.14159265358979323846;
    const double k = pi / grid.Lx;
    const double amp = std::exp(-k * k * t);
    ScalarField f(grid);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) f(i, j) = amp * std::cos(k * grid.xc(i));
    return f;
}

namespace {

// Plain conjugate gradients on the zero-flux 5-point Poisson problem,
// constants projected out of every iterate. Written independently of the
// transform-based production solve.
ScalarField cg_poisson_neumann(const ScalarField& rhs) {
    const Grid& g = rhs.grid;
    const int n = rhs.size();
    auto apply = [&g](const ScalarField& x) { return laplacian_neumann(x); };
    auto demean = [n](ScalarField& x) {
        double m = 0.0;
        for (double v : x.values) m += v;
        m /= n;
        for (double& v : x.values) v -= m;
    };

    ScalarField x(g, 0.0), r = rhs;
    demean(r);
    ScalarField p = r;
    double rr = dot_cells(r, r);
    const double rhs_norm = std::sqrt(dot_cells(rhs, rhs));
    const double tol = 1e-13 * std::max(rhs_norm, 1e-300);
    for (int it = 0; it < 20 * n && std::sqrt(rr) > tol; ++it) {
        ScalarField ap = apply(p);
        const double pap = dot_cells(p, ap);
        if (pap == 0.0) break;
        const double alpha = rr / pap;
        for (int k = 0; k < n; ++k) {
            x.values[k] += alpha * p.values[k];
            r.values[k] -= alpha * ap.values[k];
        }
        demean(r);
        const double rr_new = dot_cells(r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (int k = 0; k < n; ++k) p.values[k] = r.values[k] + beta * p.values[k];
    }
    demean(x);
    return x;
}

inline double dy_reflect(const ScalarField& f, int i, int j) {
    const int ny = f.grid.ny;
    const double lo = (j == 0) ? f(i, 0) : f(i, j - 1);
    const double hi = (j == ny - 1) ? f(i, ny - 1) : f(i, j + 1);
    return (hi - lo) / (2.0 * f.grid.hy);
}

inline double dx_reflect(const ScalarField& f, int i, int j) {
    const int nx = f.grid.nx;
    const double lo = (i == 0) ? f(0, j) : f(i - 1, j);
    const double hi = (i == nx - 1) ? f(nx - 1, j) : f(i + 1, j);
    return (hi - lo) / (2.0 * f.grid.hx);
}

}  // namespace

SystemState explicit_reference_step(const SystemState& state, const ModelParams& params,
                                    double dt) {
    const Grid& g = state.n.grid;
    const double h = std::min(g.hx, g.hy);
    if (dt > h * h / 8.0)
        throw SolverError("explicit_reference_step: dt exceeds the explicit limit h^2/8");

    const ScalarField& n = state.n;
    const ScalarField& v = state.v;
    const ScalarField& w = state.w;
    const VectorField& u = state.u;
    SystemState out = state;

    // --- n: conservative face fluxes, assembled per cell ---
    auto nflux_x = [&](int i, int j) {  // flux through the face between (i-1,j),(i,j)
        const double dvdx = (v(i, j) - v(i - 1, j)) / g.hx;
        const double dvdy = 0.5 * (dy_reflect(v, i - 1, j) + dy_reflect(v, i, j));
        const double vf = 0.5 * (v(i - 1, j) + v(i, j));
        const Matrix2 S =
            eval_sensitivity(params.sensitivity, 0.5 * (n(i - 1, j) + n(i, j)), vf);
        const double rho =
            mollifier_value(g, params.eps, i * g.hx, g.yc(j));
        const double a = rho * (S[0][0] * dvdx + S[0][1] * dvdy) + u.fx(i, j);
        return -(n(i, j) - n(i - 1, j)) / g.hx + a * (a >= 0.0 ? n(i - 1, j) : n(i, j));
    };
    auto nflux_y = [&](int i, int j) {
        const double dvdy = (v(i, j) - v(i, j - 1)) / g.hy;
        const double dvdx = 0.5 * (dx_reflect(v, i, j - 1) + dx_reflect(v, i, j));
        const double vf = 0.5 * (v(i, j - 1) + v(i, j));
        const Matrix2 S =
            eval_sensitivity(params.sensitivity, 0.5 * (n(i, j - 1) + n(i, j)), vf);
        const double rho = mollifier_value(g, params.eps, g.xc(i), j * g.hy);
        const double a = rho * (S[1][0] * dvdx + S[1][1] * dvdy) + u.fy(i, j);
        return -(n(i, j) - n(i, j - 1)) / g.hy + a * (a >= 0.0 ? n(i, j - 1) : n(i, j));
    };
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double fe = (i < g.nx - 1) ? nflux_x(i + 1, j) : 0.0;
            const double fw = (i > 0) ? nflux_x(i, j) : 0.0;
            const double fn = (j < g.ny - 1) ? nflux_y(i, j + 1) : 0.0;
            const double fs = (j > 0) ? nflux_y(i, j) : 0.0;
            out.n(i, j) = n(i, j) - dt * ((fe - fw) / g.hx + (fn - fs) / g.hy);
        }

    // --- v and w: single forward-Euler update of the full right-hand side ---
    ScalarField lap_v = laplacian_neumann(v);
    ScalarField lap_w = laplacian_neumann(w);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double ax = 0.5 * (u.fx(i, j) + u.fx(i + 1, j));
            const double ay = 0.5 * (u.fy(i, j) + u.fy(i, j + 1));
            auto upwind = [&](const ScalarField& f) {
                double ddx, ddy;
                if (ax >= 0.0)
                    ddx = (i == 0) ? 0.0 : (f(i, j) - f(i - 1, j)) / g.hx;
                else
                    ddx = (i == g.nx - 1) ? 0.0 : (f(i + 1, j) - f(i, j)) / g.hx;
                if (ay >= 0.0)
                    ddy = (j == 0) ? 0.0 : (f(i, j) - f(i, j - 1)) / g.hy;
                else
                    ddy = (j == g.ny - 1) ? 0.0 : (f(i, j + 1) - f(i, j)) / g.hy;
                return ax * ddx + ay * ddy;
            };
            out.v(i, j) = v(i, j) + dt * (lap_v(i, j) - upwind(v) - v(i, j) * w(i, j));
            out.w(i, j) = w(i, j) + dt * (lap_w(i, j) - upwind(w) - w(i, j) + n(i, j));
        }

    // --- u: explicit everything, then project with the CG Poisson solve ---
    VectorField star = u;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const double here = u.fx(i, j);
            const double below = (j == 0) ? -here : u.fx(i, j - 1);
            const double above = (j == g.ny - 1) ? -here : u.fx(i, j + 1);
            const double lap = (u.fx(i + 1, j) - 2.0 * here + u.fx(i - 1, j)) / (g.hx * g.hx) +
                               (above - 2.0 * here + below) / (g.hy * g.hy);
            double adv = 0.0;
            if (params.convective_term) {
                const double uyavg = 0.25 * (u.fy(i - 1, j) + u.fy(i, j) +
                                             u.fy(i - 1, j + 1) + u.fy(i, j + 1));
                adv = here * (u.fx(i + 1, j) - u.fx(i - 1, j)) / (2.0 * g.hx) +
                      uyavg * (above - below) / (2.0 * g.hy);
            }
            const double nf = 0.5 * (n(i - 1, j) + n(i, j));
            const double force =
                nf * (params.phi(i, j) - params.phi(i - 1, j)) / g.hx;
            star.fx(i, j) = here + dt * (lap - adv + force);
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double here = u.fy(i, j);
            const double left = (i == 0) ? -here : u.fy(i - 1, j);
            const double right = (i == g.nx - 1) ? -here : u.fy(i + 1, j);
            const double lap = (right - 2.0 * here + left) / (g.hx * g.hx) +
                               (u.fy(i, j + 1) - 2.0 * here + u.fy(i, j - 1)) / (g.hy * g.hy);
            double adv = 0.0;
            if (params.convective_term) {
                const double uxavg = 0.25 * (u.fx(i, j - 1) + u.fx(i + 1, j - 1) +
                                             u.fx(i, j) + u.fx(i + 1, j));
                adv = uxavg * (right - left) / (2.0 * g.hx) +
                      here * (u.fy(i, j + 1) - u.fy(i, j - 1)) / (2.0 * g.hy);
            }
            const double nf = 0.5 * (n(i, j - 1) + n(i, j));
            const double force =
                nf * (params.phi(i, j) - params.phi(i, j - 1)) / g.hy;
            star.fy(i, j) = here + dt * (lap - adv + force);
        }
    star.zero_wall_normal();

    ScalarField q = cg_poisson_neumann(divergence(star));
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) star.fx(i, j) -= (q(i, j) - q(i - 1, j)) / g.hx;
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) star.fy(i, j) -= (q(i, j) - q(i, j - 1)) / g.hy;
    star.zero_wall_normal();

    out.u = std::move(star);
    for (int k = 0; k < out.p.size(); ++k) out.p.values[k] = q.values[k] / dt;
    out.t = state.t + dt;
    return out;
}

}  // namespace oracle
}  // namespace ctns
