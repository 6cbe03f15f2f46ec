#pragma once

// Direct solvers for the Poisson and Helmholtz problems on the rectangle.
// Cosine/sine transforms diagonalize the 5-point stencils exactly (ghost
// reflection for Neumann walls, odd reflection or node pinning for Dirichlet
// ones), so every implicit solve in the time step is exact to round-off:
// the implicit diffusion inherits the discrete maximum principle of the
// backward-Euler matrix, the Helmholtz solve preserves the cell mean
// bit-for-bit in the zero mode, and the projection drives the discrete
// divergence to machine precision.

#include <memory>

#include "ctns/grid.hpp"

namespace ctns {

enum class PoissonBC { Neumann, Dirichlet };

class SpectralSolver {
  public:
    explicit SpectralSolver(const Grid& grid);
    ~SpectralSolver();
    SpectralSolver(const SpectralSolver&) = delete;
    SpectralSolver& operator=(const SpectralSolver&) = delete;

    /// Solve lap(p) = rhs with the given wall condition. The Neumann
    /// solution is gauged to zero mean and requires integrate(rhs) ~ 0;
    /// the returned residual contract is ||lap p - rhs||_2 <= 1e-10 ||rhs||_2.
    ScalarField poisson(const ScalarField& rhs, PoissonBC bc) const;

    /// Solve (I - c lap) out = f with Neumann walls, c >= 0.
    ScalarField helmholtz_neumann(const ScalarField& f, double c) const;

    /// Solve (I - c lap) out = f on the interior x-face grid of a staggered
    /// velocity component (zero at the normal walls, odd ghosts at the
    /// tangential ones). `f` and the result are full face arrays; wall
    /// entries are forced to zero.
    void helmholtz_face_x(std::vector<double>& fx, double c) const;
    void helmholtz_face_y(std::vector<double>& fy, double c) const;

    const Grid& grid() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace ctns
