#pragma once

// One full time step of the coupled cell/nutrient/consumer/fluid system
//
//   n_t + u.grad n = lap n - div(n S_eps(x,n,v) grad v)
//   v_t + u.grad v = lap v - v w
//   w_t + u.grad w = lap w - w + n
//   u_t + (u.grad) u = lap u - grad P + n grad phi,   div u = 0
//
// with zero-flux walls for the scalars and no-slip walls for the fluid.
// Splitting order within a step is v, w, n, u; every substep advects with
// the beginning-of-step velocity, n uses the freshest nutrient field, and
// the (v, w) reaction pair is integrated exactly along the frozen-n
// subflow, so spatially flat states reproduce the reaction ODEs to
// round-off for any dt. Transport of n and w is in conservative face-flux
// form (mass and mean telescope exactly); v advects in upwind advective
// form, which combined with the exact backward-Euler diffusion solve keeps
// sup v non-increasing to round-off.

#include <utility>

#include "ctns/grid.hpp"
#include "ctns/model.hpp"
#include "ctns/spectral.hpp"

namespace ctns {

struct SystemState {
    double t = 0.0;
    ScalarField n;
    ScalarField v;
    ScalarField w;
    VectorField u;
    ScalarField p;        // pressure, mean-zero gauge
    double v0_sup = 0.0;  // stored ||v0||_inf for the log transform
};

/// Build a state at t = 0 from validated initial data.
SystemState make_state(const InitialData& data);

struct StepReport {
    double dt_used = 0.0;
    int clamp_count = 0;  // v-floor clamps applied (must stay 0 in clean runs)
    int pressure_iterations = 0;
    double pressure_residual = 0.0;
    double dt_limit_diffusion = 0.0;
    double dt_limit_advection = 0.0;
    double div_u_sup = 0.0;
};

class Stepper {
  public:
    Stepper(const Grid& grid, ModelParams params);

    /// Advance the state by one adaptive step:
    ///   dt = dt_safety * min(h^2/4, h / (||u||_inf + ||S_eps grad v||_inf + eps)),
    /// clipped to dt_cap (used by the harness to land exactly on sample
    /// times). Throws SolverError on dt underflow, positivity loss, or a
    /// divergence-tolerance breach.
    StepReport step(SystemState& state, double dt_cap = 1e300);

    /// The adaptive dt the next step would take (before capping).
    double cfl_dt(const SystemState& state) const;

    // The individual substeps, exposed for direct testing. Each returns the
    // advanced field(s) without committing anything to the state.
    ScalarField advance_n(const SystemState& state, double dt) const;
    ScalarField advance_v(const SystemState& state, double dt, int* clamps = nullptr) const;
    ScalarField advance_w(const SystemState& state, double dt) const;
    std::pair<VectorField, ScalarField> advance_u(const SystemState& state, double dt,
                                                  double* residual = nullptr) const;

    const SpectralSolver& spectral() const { return spectral_; }
    const ModelParams& params() const { return params_; }
    const Grid& grid() const { return grid_; }

  private:
    ScalarField advance_n_with(const ScalarField& n, const ScalarField& v,
                               const VectorField& u, double dt) const;
    std::pair<VectorField, ScalarField> advance_u_with(const VectorField& u,
                                                       const ScalarField& n_force,
                                                       double dt, double* residual) const;
    double drift_sup(const ScalarField& v, const ScalarField& n) const;

    Grid grid_;
    ModelParams params_;
    SpectralSolver spectral_;
    VectorField rho_faces_;  // boundary mollifier sampled at face centers
};

/// Solve lap(p) = rhs on the field's own grid (convenience wrapper around
/// SpectralSolver; Neumann solutions are mean-zero).
ScalarField poisson_solve(const ScalarField& rhs, PoissonBC bc);

}  // namespace ctns
