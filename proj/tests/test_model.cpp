#include <doctest.h>

#include <cmath>
#include <random>

#include "ctns/errors.hpp"
#include "ctns/model.hpp"

using namespace ctns;

TEST_CASE("sensitivity: logarithmic prototype") {
    const Matrix2 S = eval_sensitivity(SensitivitySpec::logarithmic(), 1.0, 2.0);
    CHECK(S[0][0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(S[1][1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(S[0][1] == 0.0);
    CHECK(S[1][0] == 0.0);
}

TEST_CASE("sensitivity: quarter-turn rotation at unit signal") {
    const double pi = 3.14159265358979323846;
    const Matrix2 S =
        eval_sensitivity(SensitivitySpec::rotated_logarithmic(pi / 2.0), 0.0, 1.0);
    CHECK(S[0][0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(S[0][1] == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(S[1][0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(S[1][1] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("sensitivity: sub-logarithmic evaluates v^-theta") {
    // 4^{-1/2} = 1/2 by direct evaluation
    const Matrix2 S = eval_sensitivity(SensitivitySpec::sub_logarithmic(0.5), 1.0, 4.0);
    CHECK(S[0][0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(S[1][1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("sensitivity: nonpositive signal is a domain error") {
    CHECK_THROWS_AS(eval_sensitivity(SensitivitySpec::logarithmic(), 1.0, 0.0), SolverError);
    CHECK_THROWS_AS(eval_sensitivity(SensitivitySpec::logarithmic(), 1.0, -1.0),
                    SolverError);
}

TEST_CASE("sensitivity: operator norm bounded by S0(v)/v across the menu") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> uv(0.0, 1.0);
    const std::vector<SensitivitySpec> menu = {
        SensitivitySpec::logarithmic(), SensitivitySpec::sub_logarithmic(0.3),
        SensitivitySpec::sub_logarithmic(0.8), SensitivitySpec::rotated_logarithmic(1.1),
        SensitivitySpec::scaled_logarithmic(2.5)};
    for (int k = 0; k < 10000; ++k) {
        const auto& spec = menu[k % menu.size()];
        const double v = 1e-6 * std::pow(1e7, uv(rng));  // log-uniform in [1e-6, 10]
        const double n = 10.0 * uv(rng);
        const double norm = operator_norm(eval_sensitivity(spec, n, v));
        const double bound = s0_bound(spec, v) / v;
        CHECK(norm <= bound * (1.0 + 1e-12) + 1e-12);
    }
}

TEST_CASE("sensitivity: continuous in v (finite-difference spot check)") {
    const std::vector<SensitivitySpec> menu = {
        SensitivitySpec::logarithmic(), SensitivitySpec::sub_logarithmic(0.5),
        SensitivitySpec::rotated_logarithmic(0.7), SensitivitySpec::scaled_logarithmic(3.0)};
    for (const auto& spec : menu) {
        const double v = 0.8;
        double prev_gap = 1e300;
        for (double delta : {1e-2, 1e-3, 1e-4}) {
            const Matrix2 a = eval_sensitivity(spec, 1.0, v);
            const Matrix2 b = eval_sensitivity(spec, 1.0, v + delta);
            double gap = 0.0;
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c)
                    gap = std::max(gap, std::abs(a[r][c] - b[r][c]));
            CHECK(gap < prev_gap);
            prev_gap = gap;
        }
        CHECK(prev_gap < 1e-3);
    }
}

TEST_CASE("validate: constant admissible data passes") {
    Grid g(16, 16, 1.0, 1.0);
    InitialData d;
    d.n0 = ScalarField(g, 0.1);
    d.v0 = ScalarField(g, 1.0);
    d.w0 = ScalarField(g, 0.1);
    d.u0 = VectorField(g, 0.0);
    CHECK(validate_initial_data(d).pass());
}

TEST_CASE("validate: a single zero cell in v0 fails strict positivity") {
    Grid g(16, 16, 1.0, 1.0);
    InitialData d;
    d.n0 = ScalarField(g, 0.1);
    d.v0 = ScalarField(g, 1.0);
    d.v0(3, 7) = 0.0;
    d.w0 = ScalarField(g, 0.1);
    d.u0 = VectorField(g, 0.0);
    const ValidationReport rep = validate_initial_data(d);
    CHECK_FALSE(rep.pass());
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].condition == "v0 not strictly positive");
}

TEST_CASE("validate: stream-function velocity is exactly divergence-free") {
    Grid g(32, 24, 1.0, 2.0);
    InitialData d = make_scenario("vortex", g, 0.1, 1.0);
    CHECK(sup_norm(divergence(d.u0)) <= 1e-10);
    CHECK(d.u0.wall_normal_sup() == 0.0);
    CHECK(face_sup(d.u0) > 0.0);
    CHECK(validate_initial_data(d).pass());
}

TEST_CASE("scenario: uniform preset matches the homogeneous construction") {
    Grid g(16, 16, 1.0, 1.0);
    InitialData d = make_scenario("uniform", g, 0.1, 1.0);
    CHECK(field_max(d.n0) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(field_min(d.n0) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(field_max(d.v0) == 1.0);
    CHECK(field_min(d.v0) == 1.0);
}

TEST_CASE("scenario: mass normalization is exact for every preset") {
    const double masses[] = {0.05, 0.1, 1.7};
    for (const auto& name : scenario_names()) {
        for (double m : masses) {
            Grid g(24, 40, 2.0, 3.0);
            InitialData d = make_scenario(name, g, m, 1.0);
            CHECK(std::abs(integrate(d.n0) - m) <= 1e-12 * m);
            CHECK(field_max(d.v0) <= 1.0 + 1e-15);
            CHECK(validate_initial_data(d).pass());
        }
    }
}

TEST_CASE("scenario: unknown preset is a configuration error") {
    Grid g(8, 8, 1.0, 1.0);
    CHECK_THROWS_AS(make_scenario("squiggle", g, 0.1, 1.0), ConfigError);
}

TEST_CASE("params: range validation") {
    Grid g(8, 8, 1.0, 1.0);
    ModelParams p;
    p.phi = linear_gravity_potential(g, 1.0);
    p.eps = 0.1;
    CHECK_NOTHROW(p.validate(g));
    p.dt_safety = 1.5;
    CHECK_THROWS_AS(p.validate(g), ConfigError);
    p.dt_safety = 0.4;
    p.eps = 0.7;
    CHECK_THROWS_AS(p.validate(g), ConfigError);
}
