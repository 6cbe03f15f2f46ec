#include "ctns/solver.hpp"

#include <algorithm>
#include <cmath>

#include "ctns/errors.hpp"

namespace ctns {

namespace {

constexpr double kCflFloor = 1e-12;   // guards the advective limit against 1/0
constexpr double kDtUnderflow = 1e-12;
constexpr double kDivTolerance = 1e-8;

// Central y-derivative of a cell field with reflected ghosts.
inline double central_dy(const ScalarField& f, int i, int j) {
    const int ny = f.grid.ny;
    const double lo = (j == 0) ? f(i, 0) : f(i, j - 1);
    const double hi = (j == ny - 1) ? f(i, ny - 1) : f(i, j + 1);
    return (hi - lo) / (2.0 * f.grid.hy);
}

inline double central_dx(const ScalarField& f, int i, int j) {
    const int nx = f.grid.nx;
    const double lo = (i == 0) ? f(0, j) : f(i - 1, j);
    const double hi = (i == nx - 1) ? f(nx - 1, j) : f(i + 1, j);
    return (hi - lo) / (2.0 * f.grid.hx);
}

}  // namespace

SystemState make_state(const InitialData& data) {
    SystemState s;
    s.t = 0.0;
    s.n = data.n0;
    s.v = data.v0;
    s.w = data.w0;
    s.u = data.u0;
    s.p = ScalarField(data.n0.grid, 0.0);
    s.v0_sup = field_max(data.v0);
    return s;
}

Stepper::Stepper(const Grid& grid, ModelParams params)
    : grid_(grid), params_(std::move(params)), spectral_(grid), rho_faces_(grid) {
    params_.validate(grid_);
    for (int j = 0; j < grid_.ny; ++j)
        for (int i = 0; i <= grid_.nx; ++i)
            rho_faces_.fx(i, j) = mollifier_value(grid_, params_.eps, i * grid_.hx, grid_.yc(j));
    for (int j = 0; j <= grid_.ny; ++j)
        for (int i = 0; i < grid_.nx; ++i)
            rho_faces_.fy(i, j) = mollifier_value(grid_, params_.eps, grid_.xc(i), j * grid_.hy);
}

double Stepper::drift_sup(const ScalarField& v, const ScalarField& n) const {
    const Grid& g = grid_;
    double m = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const double rho = rho_faces_.fx(i, j);
            if (rho == 0.0) continue;
            const double dvdx = (v(i, j) - v(i - 1, j)) / g.hx;
            const double dvdy = 0.5 * (central_dy(v, i - 1, j) + central_dy(v, i, j));
            const double vf = 0.5 * (v(i - 1, j) + v(i, j));
            const Matrix2 S = eval_sensitivity(params_.sensitivity,
                                               0.5 * (n(i - 1, j) + n(i, j)), vf);
            m = std::max(m, rho * std::abs(S[0][0] * dvdx + S[0][1] * dvdy));
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double rho = rho_faces_.fy(i, j);
            if (rho == 0.0) continue;
            const double dvdy = (v(i, j) - v(i, j - 1)) / g.hy;
            const double dvdx = 0.5 * (central_dx(v, i, j - 1) + central_dx(v, i, j));
            const double vf = 0.5 * (v(i, j - 1) + v(i, j));
            const Matrix2 S = eval_sensitivity(params_.sensitivity,
                                               0.5 * (n(i, j - 1) + n(i, j)), vf);
            m = std::max(m, rho * std::abs(S[1][0] * dvdx + S[1][1] * dvdy));
        }
    return m;
}

double Stepper::cfl_dt(const SystemState& state) const {
    const double h = std::min(grid_.hx, grid_.hy);
    const double speeds = face_sup(state.u) + drift_sup(state.v, state.n) + kCflFloor;
    return params_.dt_safety * std::min(0.25 * h * h, h / speeds);
}

ScalarField Stepper::advance_v(const SystemState& state, double dt, int* clamps) const {
    const Grid& g = grid_;
    const ScalarField& v = state.v;
    ScalarField out(g);

    // upwind advective transport, one-sided by the sign of the cell velocity
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double ax = 0.5 * (state.u.fx(i, j) + state.u.fx(i + 1, j));
            const double ay = 0.5 * (state.u.fy(i, j) + state.u.fy(i, j + 1));
            const double c = v(i, j);
            double dvdx, dvdy;
            if (ax >= 0.0)
                dvdx = (i == 0) ? 0.0 : (c - v(i - 1, j)) / g.hx;
            else
                dvdx = (i == g.nx - 1) ? 0.0 : (v(i + 1, j) - c) / g.hx;
            if (ay >= 0.0)
                dvdy = (j == 0) ? 0.0 : (c - v(i, j - 1)) / g.hy;
            else
                dvdy = (j == g.ny - 1) ? 0.0 : (v(i, j + 1) - c) / g.hy;
            out(i, j) = c - dt * (ax * dvdx + ay * dvdy);
        }

    out = spectral_.helmholtz_neumann(out, dt);

    // Reaction integrated exactly along the frozen-n consumer subflow:
    // with w'(s) = -w + n on the substep, int_0^dt w(s) ds
    //   = n dt + (w - n)(1 - e^{-dt}).
    const double decay = -std::expm1(-dt);  // 1 - e^{-dt}
    int clamp_count = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double expo = state.n(i, j) * dt + (state.w(i, j) - state.n(i, j)) * decay;
            double val = out(i, j) * std::exp(-expo);
            if (val < params_.v_floor) {
                val = params_.v_floor;
                ++clamp_count;
            }
            out(i, j) = val;
        }
    if (clamps) *clamps += clamp_count;
    return out;
}

ScalarField Stepper::advance_w(const SystemState& state, double dt) const {
    const Grid& g = grid_;
    const ScalarField& w = state.w;
    ScalarField out(g);

    // conservative upwind flux form; interior faces only (zero-flux walls)
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double divf = 0.0;
            if (i > 0) {
                const double a = state.u.fx(i, j);
                divf -= (a >= 0.0 ? a * w(i - 1, j) : a * w(i, j)) / g.hx;
            }
            if (i < g.nx - 1) {
                const double a = state.u.fx(i + 1, j);
                divf += (a >= 0.0 ? a * w(i, j) : a * w(i + 1, j)) / g.hx;
            }
            if (j > 0) {
                const double a = state.u.fy(i, j);
                divf -= (a >= 0.0 ? a * w(i, j - 1) : a * w(i, j)) / g.hy;
            }
            if (j < g.ny - 1) {
                const double a = state.u.fy(i, j + 1);
                divf += (a >= 0.0 ? a * w(i, j) : a * w(i, j + 1)) / g.hy;
            }
            out(i, j) = w(i, j) - dt * divf;
        }

    out = spectral_.helmholtz_neumann(out, dt);

    // exact affine reaction w <- w e^{-dt} + n (1 - e^{-dt})
    const double ed = std::exp(-dt);
    const double decay = -std::expm1(-dt);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out(i, j) = out(i, j) * ed + state.n(i, j) * decay;
    return out;
}

ScalarField Stepper::advance_n_with(const ScalarField& n, const ScalarField& v,
                                    const VectorField& u, double dt) const {
    const Grid& g = grid_;
    VectorField flux(g);  // wall faces stay zero: built-in zero-flux walls

    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const double dvdx = (v(i, j) - v(i - 1, j)) / g.hx;
            const double dvdy = 0.5 * (central_dy(v, i - 1, j) + central_dy(v, i, j));
            const double vf = 0.5 * (v(i - 1, j) + v(i, j));
            const double nf = 0.5 * (n(i - 1, j) + n(i, j));
            const Matrix2 S = eval_sensitivity(params_.sensitivity, nf, vf);
            const double rho = rho_faces_.fx(i, j);
            const double a = rho * (S[0][0] * dvdx + S[0][1] * dvdy) + u.fx(i, j);
            const double nup = (a >= 0.0) ? n(i - 1, j) : n(i, j);
            flux.fx(i, j) = -(n(i, j) - n(i - 1, j)) / g.hx + a * nup;
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double dvdy = (v(i, j) - v(i, j - 1)) / g.hy;
            const double dvdx = 0.5 * (central_dx(v, i, j - 1) + central_dx(v, i, j));
            const double vf = 0.5 * (v(i, j - 1) + v(i, j));
            const double nf = 0.5 * (n(i, j - 1) + n(i, j));
            const Matrix2 S = eval_sensitivity(params_.sensitivity, nf, vf);
            const double rho = rho_faces_.fy(i, j);
            const double a = rho * (S[1][0] * dvdx + S[1][1] * dvdy) + u.fy(i, j);
            const double nup = (a >= 0.0) ? n(i, j - 1) : n(i, j);
            flux.fy(i, j) = -(n(i, j) - n(i, j - 1)) / g.hy + a * nup;
        }

    ScalarField out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out(i, j) = n(i, j) - dt * ((flux.fx(i + 1, j) - flux.fx(i, j)) / g.hx +
                                        (flux.fy(i, j + 1) - flux.fy(i, j)) / g.hy);

    const double floor = -1e-14 * sup_norm(n);
    if (field_min(out) < floor)
        throw SolverError("advance_n: positivity violated (dt policy failure), min = " +
                          std::to_string(field_min(out)));
    return out;
}

ScalarField Stepper::advance_n(const SystemState& state, double dt) const {
    return advance_n_with(state.n, state.v, state.u, dt);
}

std::pair<VectorField, ScalarField> Stepper::advance_u_with(const VectorField& u,
                                                            const ScalarField& n_force,
                                                            double dt,
                                                            double* residual) const {
    const Grid& g = grid_;
    const int nx = g.nx, ny = g.ny;
    const ScalarField& phi = params_.phi;
    VectorField star(g);

    // (i) explicit advection and buoyancy force n grad(phi) on faces.
    // The force is a discrete gradient when n is constant, so the projection
    // annihilates it exactly.
    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i) {
            const double here = u.fx(i, j);
            double adv = 0.0;
            if (params_.convective_term) {
                const double duxdx = (u.fx(i + 1, j) - u.fx(i - 1, j)) / (2.0 * g.hx);
                const double below = (j == 0) ? -here : u.fx(i, j - 1);
                const double above = (j == ny - 1) ? -here : u.fx(i, j + 1);
                const double duxdy = (above - below) / (2.0 * g.hy);
                const double uyavg = 0.25 * (u.fy(i - 1, j) + u.fy(i, j) +
                                             u.fy(i - 1, j + 1) + u.fy(i, j + 1));
                adv = here * duxdx + uyavg * duxdy;
            }
            const double nf = 0.5 * (n_force(i - 1, j) + n_force(i, j));
            const double fx = nf * (phi(i, j) - phi(i - 1, j)) / g.hx;
            star.fx(i, j) = here + dt * (fx - adv);
        }
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double here = u.fy(i, j);
            double adv = 0.0;
            if (params_.convective_term) {
                const double duydy = (u.fy(i, j + 1) - u.fy(i, j - 1)) / (2.0 * g.hy);
                const double left = (i == 0) ? -here : u.fy(i - 1, j);
                const double right = (i == nx - 1) ? -here : u.fy(i + 1, j);
                const double duydx = (right - left) / (2.0 * g.hx);
                const double uxavg = 0.25 * (u.fx(i, j - 1) + u.fx(i + 1, j - 1) +
                                             u.fx(i, j) + u.fx(i + 1, j));
                adv = uxavg * duydx + here * duydy;
            }
            const double nf = 0.5 * (n_force(i, j - 1) + n_force(i, j));
            const double fy = nf * (phi(i, j) - phi(i, j - 1)) / g.hy;
            star.fy(i, j) = here + dt * (fy - adv);
        }

    // (ii) implicit viscous step, no-slip walls
    spectral_.helmholtz_face_x(star.x, dt);
    spectral_.helmholtz_face_y(star.y, dt);

    // (iii) pressure Poisson with mean-zero gauge; (iv) correction
    ScalarField div = divergence(star);
    ScalarField q = spectral_.poisson(div, PoissonBC::Neumann);
    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i) star.fx(i, j) -= (q(i, j) - q(i - 1, j)) / g.hx;
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i) star.fy(i, j) -= (q(i, j) - q(i, j - 1)) / g.hy;
    star.zero_wall_normal();

    if (residual) {
        const ScalarField lap_q = laplacian_neumann(q);
        double num = 0.0, den = 0.0;
        for (int k = 0; k < div.size(); ++k) {
            const double r = lap_q.values[k] - div.values[k];
            num += r * r;
            den += div.values[k] * div.values[k];
        }
        *residual = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    }

    ScalarField p(g);
    for (int k = 0; k < p.size(); ++k) p.values[k] = q.values[k] / dt;
    return {std::move(star), std::move(p)};
}

std::pair<VectorField, ScalarField> Stepper::advance_u(const SystemState& state, double dt,
                                                       double* residual) const {
    const double div_pre = sup_norm(divergence(state.u));
    if (div_pre > 1e-6)
        throw SolverError("advance_u: incoming velocity is not divergence-free");
    return advance_u_with(state.u, state.n, dt, residual);
}

StepReport Stepper::step(SystemState& state, double dt_cap) {
    if (!(state.n.grid == grid_))
        throw SolverError("step: state grid does not match the stepper");
    StepReport rep;
    const double h = std::min(grid_.hx, grid_.hy);
    rep.dt_limit_diffusion = 0.25 * h * h;
    const double speeds = face_sup(state.u) + drift_sup(state.v, state.n) + kCflFloor;
    rep.dt_limit_advection = h / speeds;
    double dt = params_.dt_safety * std::min(rep.dt_limit_diffusion, rep.dt_limit_advection);
    dt = std::min(dt, dt_cap);
    if (dt < kDtUnderflow)
        throw SolverError("step: dt underflow (stiffness), dt = " + std::to_string(dt));
    rep.dt_used = dt;

    ScalarField v_new = advance_v(state, dt, &rep.clamp_count);
    ScalarField w_new = advance_w(state, dt);
    ScalarField n_new = advance_n_with(state.n, v_new, state.u, dt);
    auto [u_new, p_new] = advance_u_with(state.u, n_new, dt, &rep.pressure_residual);
    rep.pressure_iterations = 1;  // direct transform solve

    rep.div_u_sup = sup_norm(divergence(u_new));
    if (rep.div_u_sup > kDivTolerance)
        throw SolverError("step: projection failed to reach the divergence tolerance");
    if (!all_finite(n_new) || !all_finite(v_new) || !all_finite(w_new) || !all_finite(u_new))
        throw SolverError("step: non-finite field after update");

    state.n = std::move(n_new);
    state.v = std::move(v_new);
    state.w = std::move(w_new);
    state.u = std::move(u_new);
    state.p = std::move(p_new);
    state.t += dt;
    return rep;
}

ScalarField poisson_solve(const ScalarField& rhs, PoissonBC bc) {
    SpectralSolver solver(rhs.grid);
    return solver.poisson(rhs, bc);
}

}  // namespace ctns
