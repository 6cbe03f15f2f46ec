#include <doctest.h>

#include <cmath>
#include <random>

#include "ctns/errors.hpp"
#include "ctns/grid.hpp"

using namespace ctns;

namespace {
constexpr double kPi = 3.14159265358979323846;

ScalarField random_field(const Grid& g, std::uint64_t seed, double lo = -1.0,
                         double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(lo, hi);
    ScalarField f(g);
    for (double& v : f.values) v = uni(rng);
    return f;
}
}  // namespace

TEST_CASE("integrate: unit field on the unit square") {
    Grid g(8, 8, 1.0, 1.0);
    CHECK(integrate(ScalarField(g, 1.0)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("integrate: constants scale with the domain") {
    Grid g(16, 12, 2.5, 0.75);
    const double c = -3.25;
    CHECK(integrate(ScalarField(g, c)) == doctest::Approx(c * 2.5 * 0.75).epsilon(1e-14));
}

TEST_CASE("integrate: midpoint rule is exact for linear integrands") {
    Grid g(64, 64, 1.0, 1.0);
    ScalarField f(g);
    // oracle: direct summation of x over cell centers equals 1/2 exactly
    long double direct = 0.0L;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            f(i, j) = g.xc(i);
            direct += static_cast<long double>(g.xc(i)) * g.hx * g.hy;
        }
    CHECK(std::abs(static_cast<double>(direct) - 0.5) < 1e-15);
    CHECK(integrate(f) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("integrate: rejects non-finite entries") {
    Grid g(8, 8, 1.0, 1.0);
    ScalarField f(g, 1.0);
    f(3, 3) = std::nan("");
    CHECK_THROWS_AS(integrate(f), DiagnosticError);
}

TEST_CASE("laplacian: constants are harmonic") {
    Grid g(12, 8, 2.0, 1.0);
    ScalarField lap = laplacian_neumann(ScalarField(g, 3.0));
    CHECK(sup_norm(lap) == 0.0);
}

TEST_CASE("laplacian: hand-evaluated 5-point stencil on an indicator") {
    Grid g(5, 5, 5.0, 5.0);  // h = 1
    ScalarField f(g, 0.0);
    f(2, 2) = 1.0;
    ScalarField lap = laplacian_neumann(f);
    for (int j = 0; j < 5; ++j)
        for (int i = 0; i < 5; ++i) {
            const int d = std::abs(i - 2) + std::abs(j - 2);
            const double expect = (d == 0) ? -4.0 : (d == 1 ? 1.0 : 0.0);
            CHECK(lap(i, j) == doctest::Approx(expect).epsilon(1e-14));
        }
}

TEST_CASE("laplacian: zero-flux eigenfunction, flux cancellation and order") {
    // cos(pi x / Lx) is even across both x-walls, so the ghost reflection is
    // exact and the truncation error is O(h^2) uniformly.
    const double Lx = 2.0, Ly = 1.0;
    double prev_err = 0.0;
    double orders[2];
    int idx = 0;
    for (int n : {32, 64, 128}) {
        Grid g(n, n / 2, Lx, Ly);
        ScalarField f(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) f(i, j) = std::cos(kPi * g.xc(i) / Lx);
        ScalarField lap = laplacian_neumann(f);
        CHECK(std::abs(integrate(lap)) <= 1e-12 * sup_norm(f) * g.area());
        double err = 0.0;
        const double k2 = (kPi / Lx) * (kPi / Lx);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                err = std::max(err, std::abs(lap(i, j) + k2 * f(i, j)));
        if (idx > 0) orders[idx - 1] = std::log2(prev_err / err);
        prev_err = err;
        ++idx;
    }
    CHECK(orders[0] >= 1.8);
    CHECK(orders[1] >= 1.8);
}

TEST_CASE("laplacian: discrete flux cancellation on random fields") {
    Grid g(32, 24, 1.5, 2.5);
    for (std::uint64_t seed : {11u, 22u, 33u}) {
        ScalarField f = random_field(g, seed);
        CHECK(std::abs(integrate(laplacian_neumann(f))) <=
              1e-12 * sup_norm(f) * g.area());
    }
}

TEST_CASE("gradient: constants have zero gradient") {
    Grid g(8, 8, 1.0, 1.0);
    VectorField grad = gradient(ScalarField(g, 4.2));
    CHECK(face_sup(grad) == 0.0);
}

TEST_CASE("gradient: central differences are exact on linear data") {
    Grid g(16, 16, 1.0, 1.0);
    ScalarField f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f(i, j) = g.xc(i);
    VectorField grad = gradient(f);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i)
            CHECK(grad.fx(i, j) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("divergence: constant fields are divergence-free in the interior") {
    Grid g(8, 8, 1.0, 1.0);
    VectorField F(g);
    for (double& v : F.x) v = 1.5;
    for (double& v : F.y) v = -0.5;
    ScalarField div = divergence(F);
    for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i)
            CHECK(div(i, j) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("gradient/divergence adjointness to round-off") {
    Grid g(24, 16, 1.0, 2.0);
    for (std::uint64_t seed : {5u, 6u}) {
        ScalarField f = random_field(g, seed);
        VectorField F(g);
        std::mt19937_64 rng(seed + 100);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        for (double& v : F.x) v = uni(rng);
        for (double& v : F.y) v = uni(rng);
        F.zero_wall_normal();  // homogeneous boundary terms
        const double lhs = dot_faces(gradient(f), F);
        const double rhs = -dot_cells(f, divergence(F));
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("mollifier: deep interior is 1, near-wall band is 0, ramp midpoint is 1/2") {
    Grid g(64, 64, 1.0, 1.0);
    ScalarField rho = boundary_mollifier(g, 0.1);
    CHECK(rho(32, 32) == 1.0);

    ScalarField rho2 = boundary_mollifier(g, 0.25);
    CHECK(rho2(0, 32) == 0.0);  // wall distance h/2 < eps/2

    // distance 3 eps/4 sits mid-ramp; the cubic smoothstep evaluates to 1/2
    const double eps = 0.25;
    CHECK(mollifier_value(g, eps, 0.75 * eps, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("mollifier: range and monotonicity in eps") {
    Grid g(48, 48, 1.0, 1.0);
    const double epses[] = {0.05, 0.1, 0.2, 0.3, 0.45};
    ScalarField prev;
    bool have_prev = false;
    for (double eps : epses) {
        ScalarField rho = boundary_mollifier(g, eps);
        CHECK(field_min(rho) >= 0.0);
        CHECK(field_max(rho) <= 1.0);
        if (have_prev)
            for (int k = 0; k < rho.size(); ++k)
                CHECK(prev.values[k] >= rho.values[k] - 1e-15);  // smaller eps dominates
        prev = rho;
        have_prev = true;
    }
}

TEST_CASE("mollifier: eps out of range is a configuration error") {
    Grid g(8, 8, 1.0, 1.0);
    CHECK_THROWS_AS(boundary_mollifier(g, 0.6), ConfigError);
    CHECK_THROWS_AS(boundary_mollifier(g, 0.0), ConfigError);
}

TEST_CASE("grid invariants") {
    CHECK_THROWS_AS(Grid(3, 8, 1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(Grid(8, 8, 0.0, 1.0), ConfigError);
    Grid g(10, 20, 2.0, 5.0);
    CHECK(g.hx == doctest::Approx(0.2));
    CHECK(g.hy == doctest::Approx(0.25));
    CHECK(integrate(ScalarField(g, 1.0)) == doctest::Approx(g.area()).epsilon(1e-14));
}
