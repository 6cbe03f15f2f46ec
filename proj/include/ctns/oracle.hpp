#pragma once

// Independent reference implementations used only for cross-validation:
// a monolithic forward-Euler stepper with its own conjugate-gradient
// projection, the closed forms of the spatially flat reduction, and a
// manufactured heat solution for convergence-order studies. Nothing here
// shares discretization code with the production stepper beyond the Grid
// type, so agreement between the two is evidence rather than tautology.

#include "ctns/model.hpp"
#include "ctns/solver.hpp"

namespace ctns {
namespace oracle {

/// Spatially flat reduction: w' = -w + n_bar, v' = -v w, with n constant.
struct HomogeneousSolution {
    double n_bar = 0.0;
    double w0 = 0.0;
    double v0 = 0.0;
    double w(double t) const;
    double v(double t) const;
};

/// Evaluate (w(t), v(t)) of the flat reduction.
std::pair<double, double> homogeneous_closed_form(double n_bar, double w0, double v0,
                                                  double t);

/// One naive forward-Euler step of the full coupled system, no splitting,
/// followed by an explicit projection. Requires dt <= min(h)^2/8.
SystemState explicit_reference_step(const SystemState& state, const ModelParams& params,
                                    double dt);

/// Exact zero-flux heat solution  exp(-(pi/Lx)^2 t) cos(pi x / Lx).
ScalarField manufactured_heat_solution(const Grid& grid, double t);

}  // namespace oracle
}  // namespace ctns
