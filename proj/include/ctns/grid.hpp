#pragma once

// Rectangular cell-centered grid, MAC-staggered vector fields, and the
// discrete differential operators used by both the solver and the
// diagnostics. Scalars live at cell centers; vector fields carry face-normal
// components (x-component on vertical faces, y-component on horizontal
// faces) so that divergence(gradient(f)) is exactly the 5-point Neumann
// Laplacian and the projection step can be made discretely divergence-free.

#include <cstddef>
#include <vector>

namespace ctns {

/// Uniform rectangular grid: nx-by-ny cells covering [0,Lx] x [0,Ly].
struct Grid {
    int nx = 0;
    int ny = 0;
    double Lx = 0.0;
    double Ly = 0.0;
    double hx = 0.0;
    double hy = 0.0;

    Grid() = default;
    Grid(int nx_, int ny_, double Lx_, double Ly_);

    double area() const { return Lx * Ly; }
    double cell_volume() const { return hx * hy; }
    /// Coordinates of the center of cell (i, j).
    double xc(int i) const { return (i + 0.5) * hx; }
    double yc(int j) const { return (j + 0.5) * hy; }
    /// Distance from a point to the rectangle boundary.
    double wall_distance(double x, double y) const;

    bool operator==(const Grid& o) const {
        return nx == o.nx && ny == o.ny && Lx == o.Lx && Ly == o.Ly;
    }
};

/// Cell-centered scalar field. Storage is row-major: index (i, j) lives at
/// j*nx + i, i varying fastest.
struct ScalarField {
    Grid grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0)
        : grid(g), values(static_cast<size_t>(g.nx) * g.ny, fill) {}

    double& operator()(int i, int j) { return values[static_cast<size_t>(j) * grid.nx + i]; }
    double operator()(int i, int j) const { return values[static_cast<size_t>(j) * grid.nx + i]; }
    int size() const { return grid.nx * grid.ny; }
    double* data() { return values.data(); }
    const double* data() const { return values.data(); }
};

/// MAC-staggered vector field: x holds (nx+1) x ny face-normal values on
/// vertical faces, y holds nx x (ny+1) values on horizontal faces. Face
/// (0, j) / (nx, j) etc. are wall faces; a field with zero wall-normal
/// entries has exactly zero discrete boundary flux.
struct VectorField {
    Grid grid;
    std::vector<double> x;
    std::vector<double> y;

    VectorField() = default;
    explicit VectorField(const Grid& g, double fill = 0.0)
        : grid(g),
          x(static_cast<size_t>(g.nx + 1) * g.ny, fill),
          y(static_cast<size_t>(g.nx) * (g.ny + 1), fill) {}

    double& fx(int i, int j) { return x[static_cast<size_t>(j) * (grid.nx + 1) + i]; }
    double fx(int i, int j) const { return x[static_cast<size_t>(j) * (grid.nx + 1) + i]; }
    double& fy(int i, int j) { return y[static_cast<size_t>(j) * grid.nx + i]; }
    double fy(int i, int j) const { return y[static_cast<size_t>(j) * grid.nx + i]; }

    /// Zero the wall-normal components (the discrete Dirichlet trace).
    void zero_wall_normal();
    /// Largest wall-normal magnitude.
    double wall_normal_sup() const;
};

// ---- reductions (compensated summation; deterministic) ----

/// Midpoint-rule quadrature: sum f_ij * hx * hy. Exact for cell-wise
/// constants and, at cell centers, for linear integrands.
double integrate(const ScalarField& f);

double field_min(const ScalarField& f);
double field_max(const ScalarField& f);
double sup_norm(const ScalarField& f);
double mean(const ScalarField& f);
bool all_finite(const ScalarField& f);
bool all_finite(const VectorField& f);

// ---- discrete operators ----

/// 5-point Laplacian with homogeneous Neumann walls (ghost-cell reflection).
/// Identical to divergence(gradient(f)); integrate(result) telescopes to
/// round-off.
ScalarField laplacian_neumann(const ScalarField& f);

/// Face-normal gradient; wall faces get 0 (zero-flux convention).
VectorField gradient(const ScalarField& f);

/// Cell-centered divergence of a face field.
ScalarField divergence(const VectorField& F);

/// Discrete inner products making gradient/divergence exact adjoints:
/// dot_faces(gradient(f), F) == -dot_cells(f, divergence(F)) for any F with
/// zero wall-normal trace.
double dot_cells(const ScalarField& a, const ScalarField& b);
double dot_faces(const VectorField& a, const VectorField& b);

/// Smooth cutoff vanishing near the boundary: 0 within wall distance eps/2,
/// 1 beyond distance eps, cubic smoothstep ramp in between.
ScalarField boundary_mollifier(const Grid& grid, double eps);

/// Pointwise mollifier value (used to evaluate the cutoff on face centers).
double mollifier_value(const Grid& grid, double eps, double x, double y);

// ---- norms over staggered fields (center-interpolated magnitudes) ----

/// sqrt of the face-based energy  sum g^2 * hx*hy  over interior faces.
double face_l2(const VectorField& g);
/// Largest face-value magnitude.
double face_sup(const VectorField& g);
/// L2 norm of the center-interpolated vector magnitude.
double center_l2(const VectorField& g);
/// L4 norm of the center-interpolated vector magnitude.
double center_l4(const VectorField& g);
/// H1 seminorm of a staggered velocity with no-slip walls.
double grad_l2(const VectorField& u);

}  // namespace ctns
