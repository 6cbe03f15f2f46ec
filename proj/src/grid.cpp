#include "ctns/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ctns/errors.hpp"

namespace ctns {

Grid::Grid(int nx_, int ny_, double Lx_, double Ly_)
    : nx(nx_), ny(ny_), Lx(Lx_), Ly(Ly_) {
    if (nx < 4 || ny < 4) throw ConfigError("grid: nx and ny must be >= 4");
    if (!(Lx > 0.0) || !(Ly > 0.0)) throw ConfigError("grid: Lx and Ly must be positive");
    hx = Lx / nx;
    hy = Ly / ny;
}

double Grid::wall_distance(double x, double y) const {
    return std::min(std::min(x, Lx - x), std::min(y, Ly - y));
}

void VectorField::zero_wall_normal() {
    const int nx = grid.nx, ny = grid.ny;
    for (int j = 0; j < ny; ++j) {
        fx(0, j) = 0.0;
        fx(nx, j) = 0.0;
    }
    for (int i = 0; i < nx; ++i) {
        fy(i, 0) = 0.0;
        fy(i, ny) = 0.0;
    }
}

double VectorField::wall_normal_sup() const {
    const int nx = grid.nx, ny = grid.ny;
    double m = 0.0;
    for (int j = 0; j < ny; ++j)
        m = std::max(m, std::max(std::abs(fx(0, j)), std::abs(fx(nx, j))));
    for (int i = 0; i < nx; ++i)
        m = std::max(m, std::max(std::abs(fy(i, 0)), std::abs(fy(i, ny))));
    return m;
}

namespace {

// Kahan-compensated accumulator; reductions feed long telescoping sums where
// naive summation would eat the 1e-12-level identities the tests pin down.
struct Kahan {
    double sum = 0.0;
    double c = 0.0;
    void add(double v) {
        double y = v - c;
        double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

double ksum(const std::vector<double>& v) {
    Kahan k;
    for (double x : v) k.add(x);
    return k.sum;
}

}  // namespace

double integrate(const ScalarField& f) {
    if (!all_finite(f)) throw DiagnosticError("integrate: non-finite entry");
    return ksum(f.values) * f.grid.cell_volume();
}

double field_min(const ScalarField& f) {
    return *std::min_element(f.values.begin(), f.values.end());
}

double field_max(const ScalarField& f) {
    return *std::max_element(f.values.begin(), f.values.end());
}

double sup_norm(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

double mean(const ScalarField& f) { return ksum(f.values) / f.size(); }

bool all_finite(const ScalarField& f) {
    for (double v : f.values)
        if (!std::isfinite(v)) return false;
    return true;
}

bool all_finite(const VectorField& f) {
    for (double v : f.x)
        if (!std::isfinite(v)) return false;
    for (double v : f.y)
        if (!std::isfinite(v)) return false;
    return true;
}

ScalarField laplacian_neumann(const ScalarField& f) {
    const Grid& g = f.grid;
    ScalarField out(g);
    const double ax = 1.0 / (g.hx * g.hx), ay = 1.0 / (g.hy * g.hy);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double c = f(i, j);
            double acc = 0.0;
            if (i > 0) acc += ax * (f(i - 1, j) - c);
            if (i < g.nx - 1) acc += ax * (f(i + 1, j) - c);
            if (j > 0) acc += ay * (f(i, j - 1) - c);
            if (j < g.ny - 1) acc += ay * (f(i, j + 1) - c);
            out(i, j) = acc;
        }
    }
    return out;
}

VectorField gradient(const ScalarField& f) {
    const Grid& g = f.grid;
    VectorField out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i)
            out.fx(i, j) = (f(i, j) - f(i - 1, j)) / g.hx;
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out.fy(i, j) = (f(i, j) - f(i, j - 1)) / g.hy;
    return out;
}

ScalarField divergence(const VectorField& F) {
    const Grid& g = F.grid;
    ScalarField out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out(i, j) = (F.fx(i + 1, j) - F.fx(i, j)) / g.hx +
                        (F.fy(i, j + 1) - F.fy(i, j)) / g.hy;
    return out;
}

double dot_cells(const ScalarField& a, const ScalarField& b) {
    Kahan k;
    for (size_t n = 0; n < a.values.size(); ++n) k.add(a.values[n] * b.values[n]);
    return k.sum * a.grid.cell_volume();
}

double dot_faces(const VectorField& a, const VectorField& b) {
    Kahan k;
    for (size_t n = 0; n < a.x.size(); ++n) k.add(a.x[n] * b.x[n]);
    for (size_t n = 0; n < a.y.size(); ++n) k.add(a.y[n] * b.y[n]);
    return k.sum * a.grid.cell_volume();
}

double mollifier_value(const Grid& grid, double eps, double x, double y) {
    const double d = grid.wall_distance(x, y);
    if (d <= 0.5 * eps) return 0.0;
    if (d >= eps) return 1.0;
    const double s = (d - 0.5 * eps) / (0.5 * eps);
    return s * s * (3.0 - 2.0 * s);
}

ScalarField boundary_mollifier(const Grid& grid, double eps) {
    if (!(eps > 0.0) || eps >= 0.5 * std::min(grid.Lx, grid.Ly))
        throw ConfigError("boundary_mollifier: eps must lie in (0, min(Lx,Ly)/2)");
    ScalarField out(grid);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
            out(i, j) = mollifier_value(grid, eps, grid.xc(i), grid.yc(j));
    return out;
}

double face_l2(const VectorField& g) {
    Kahan k;
    for (double v : g.x) k.add(v * v);
    for (double v : g.y) k.add(v * v);
    return std::sqrt(k.sum * g.grid.cell_volume());
}

double face_sup(const VectorField& g) {
    double m = 0.0;
    for (double v : g.x) m = std::max(m, std::abs(v));
    for (double v : g.y) m = std::max(m, std::abs(v));
    return m;
}

namespace {

// Squared center-interpolated magnitude of a staggered field at cell (i, j).
inline double center_mag2(const VectorField& u, int i, int j) {
    const double cx = 0.5 * (u.fx(i, j) + u.fx(i + 1, j));
    const double cy = 0.5 * (u.fy(i, j) + u.fy(i, j + 1));
    return cx * cx + cy * cy;
}

}  // namespace

double center_l2(const VectorField& g) {
    Kahan k;
    for (int j = 0; j < g.grid.ny; ++j)
        for (int i = 0; i < g.grid.nx; ++i) k.add(center_mag2(g, i, j));
    return std::sqrt(k.sum * g.grid.cell_volume());
}

double center_l4(const VectorField& g) {
    Kahan k;
    for (int j = 0; j < g.grid.ny; ++j)
        for (int i = 0; i < g.grid.nx; ++i) {
            const double m2 = center_mag2(g, i, j);
            k.add(m2 * m2);
        }
    return std::pow(k.sum * g.grid.cell_volume(), 0.25);
}

double grad_l2(const VectorField& u) {
    // Difference quotients of each component in each direction; no-slip
    // odd-reflection ghosts supply the wall rows for tangential derivatives.
    const Grid& g = u.grid;
    const int nx = g.nx, ny = g.ny;
    Kahan k;
    // d(ux)/dx at cell centers
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double d = (u.fx(i + 1, j) - u.fx(i, j)) / g.hx;
            k.add(d * d);
        }
    // d(ux)/dy on horizontal edges between vertically adjacent x-faces
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            const double lo = (j == 0) ? -u.fx(i, 0) : u.fx(i, j - 1);
            const double hi = (j == ny) ? -u.fx(i, ny - 1) : u.fx(i, j);
            const double d = (hi - lo) / g.hy;
            const double w = (j == 0 || j == ny) ? 0.5 : 1.0;
            k.add(w * d * d);
        }
    // d(uy)/dy at cell centers
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double d = (u.fy(i, j + 1) - u.fy(i, j)) / g.hy;
            k.add(d * d);
        }
    // d(uy)/dx on vertical edges
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            const double lo = (i == 0) ? -u.fy(0, j) : u.fy(i - 1, j);
            const double hi = (i == nx) ? -u.fy(nx - 1, j) : u.fy(i, j);
            const double d = (hi - lo) / g.hx;
            const double w = (i == 0 || i == nx) ? 0.5 : 1.0;
            k.add(w * d * d);
        }
    return std::sqrt(k.sum * g.cell_volume());
}

}  // namespace ctns
