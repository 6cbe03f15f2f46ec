#include <doctest.h>

#include <cmath>
#include <random>

#include "ctns/errors.hpp"
#include "ctns/solver.hpp"
#include "ctns/spectral.hpp"

using namespace ctns;

namespace {
constexpr double kPi = 3.14159265358979323846;

double residual_l2(const ScalarField& p, const ScalarField& rhs) {
    const ScalarField lap = laplacian_neumann(p);
    double num = 0.0, den = 0.0;
    for (int k = 0; k < p.size(); ++k) {
        const double r = lap.values[k] - rhs.values[k];
        num += r * r;
        den += rhs.values[k] * rhs.values[k];
    }
    return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}
}  // namespace

TEST_CASE("poisson Neumann: zero right-hand side gives the zero field") {
    Grid g(16, 16, 1.0, 1.0);
    ScalarField p = poisson_solve(ScalarField(g, 0.0), PoissonBC::Neumann);
    CHECK(sup_norm(p) <= 1e-14);
}

TEST_CASE("poisson Neumann: manufactured eigenfunction, mean-zero gauge") {
    // rhs = -(pi/Lx)^2 cos(pi x/Lx) has the exact solution cos(pi x/Lx);
    // the discrete solve reproduces it to O(h^2) and returns it mean-zero.
    for (int n : {32, 64}) {
        Grid g(n, n, 2.0, 1.0);
        ScalarField rhs(g), exact(g);
        const double k2 = (kPi / g.Lx) * (kPi / g.Lx);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                exact(i, j) = std::cos(kPi * g.xc(i) / g.Lx);
                rhs(i, j) = -k2 * exact(i, j);
            }
        ScalarField p = poisson_solve(rhs, PoissonBC::Neumann);
        CHECK(std::abs(mean(p)) <= 1e-13);
        double err = 0.0;
        for (int k = 0; k < p.size(); ++k)
            err = std::max(err, std::abs(p.values[k] - exact.values[k]));
        CHECK(err <= 4.0 * (g.hx * g.hx));  // O(h^2) with a modest constant
        CHECK(residual_l2(p, rhs) <= 1e-10);
    }
}

TEST_CASE("poisson Neumann: random mean-zero rhs meets the residual contract, idempotent") {
    Grid g(24, 40, 1.5, 2.5);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    ScalarField rhs(g);
    for (double& v : rhs.values) v = uni(rng);
    const double m = mean(rhs);
    for (double& v : rhs.values) v -= m;

    SpectralSolver solver(g);
    ScalarField p1 = solver.poisson(rhs, PoissonBC::Neumann);
    ScalarField p2 = solver.poisson(rhs, PoissonBC::Neumann);
    CHECK(residual_l2(p1, rhs) <= 1e-10);
    for (int k = 0; k < p1.size(); ++k) CHECK(p1.values[k] == p2.values[k]);
}

TEST_CASE("poisson Neumann: incompatible rhs is a gauge error") {
    Grid g(16, 16, 1.0, 1.0);
    CHECK_THROWS_AS(poisson_solve(ScalarField(g, 1.0), PoissonBC::Neumann), SolverError);
}

TEST_CASE("poisson Dirichlet: manufactured product eigenfunction") {
    for (int n : {32, 64}) {
        Grid g(n, n, 1.0, 1.0);
        ScalarField rhs(g), exact(g);
        const double k2 = (kPi / g.Lx) * (kPi / g.Lx) + (kPi / g.Ly) * (kPi / g.Ly);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                exact(i, j) = std::sin(kPi * g.xc(i) / g.Lx) * std::sin(kPi * g.yc(j) / g.Ly);
                rhs(i, j) = -k2 * exact(i, j);
            }
        ScalarField p = poisson_solve(rhs, PoissonBC::Dirichlet);
        double err = 0.0;
        for (int k = 0; k < p.size(); ++k)
            err = std::max(err, std::abs(p.values[k] - exact.values[k]));
        CHECK(err <= 6.0 * (g.hx * g.hx));
    }
}

TEST_CASE("helmholtz Neumann: preserves constants and the cell mean exactly") {
    Grid g(32, 32, 1.0, 1.0);
    SpectralSolver solver(g);

    ScalarField c(g, 2.75);
    ScalarField out = solver.helmholtz_neumann(c, 0.123);
    for (double v : out.values) CHECK(v == doctest::Approx(2.75).epsilon(1e-15));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    ScalarField f(g);
    for (double& v : f.values) v = uni(rng);
    ScalarField sol = solver.helmholtz_neumann(f, 3e-4);
    CHECK(mean(sol) == doctest::Approx(mean(f)).epsilon(1e-14));
}

TEST_CASE("helmholtz Neumann: solves the backward-Euler diffusion system") {
    Grid g(24, 24, 1.0, 2.0);
    SpectralSolver solver(g);
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    ScalarField f(g);
    for (double& v : f.values) v = uni(rng);

    const double c = 2.3e-4;
    ScalarField sol = solver.helmholtz_neumann(f, c);
    const ScalarField lap = laplacian_neumann(sol);
    for (int k = 0; k < f.size(); ++k)
        CHECK(sol.values[k] - c * lap.values[k] ==
              doctest::Approx(f.values[k]).epsilon(1e-11));
    // max principle of the exact backward-Euler solve
    CHECK(field_max(sol) <= field_max(f) + 1e-13);
    CHECK(field_min(sol) >= field_min(f) - 1e-13);
}

TEST_CASE("helmholtz face solves: no-slip walls and the pinned normal faces") {
    Grid g(16, 12, 1.0, 1.0);
    SpectralSolver solver(g);
    VectorField u(g);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (double& v : u.x) v = uni(rng);
    for (double& v : u.y) v = uni(rng);
    u.zero_wall_normal();

    VectorField sol = u;
    const double c = 1e-3;
    solver.helmholtz_face_x(sol.x, c);
    solver.helmholtz_face_y(sol.y, c);
    CHECK(sol.wall_normal_sup() == 0.0);

    // verify (I - c lap) sol = u on the x-face grid, odd ghosts at y-walls
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const double here = sol.fx(i, j);
            const double below = (j == 0) ? -here : sol.fx(i, j - 1);
            const double above = (j == g.ny - 1) ? -here : sol.fx(i, j + 1);
            const double lap =
                (sol.fx(i + 1, j) - 2.0 * here + sol.fx(i - 1, j)) / (g.hx * g.hx) +
                (above - 2.0 * here + below) / (g.hy * g.hy);
            CHECK(here - c * lap == doctest::Approx(u.fx(i, j)).epsilon(1e-11));
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double here = sol.fy(i, j);
            const double left = (i == 0) ? -here : sol.fy(i - 1, j);
            const double right = (i == g.nx - 1) ? -here : sol.fy(i + 1, j);
            const double lap =
                (right - 2.0 * here + left) / (g.hx * g.hx) +
                (sol.fy(i, j + 1) - 2.0 * here + sol.fy(i, j - 1)) / (g.hy * g.hy);
            CHECK(here - c * lap == doctest::Approx(u.fy(i, j)).epsilon(1e-11));
        }
}
