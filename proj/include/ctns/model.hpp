#pragma once

// Model ingredients: the chemotactic sensitivity menu, run parameters, and
// admissible initial data with its validation and preset constructions.
//
// Every sensitivity variant S(x, n, v) in the menu obeys the operator-norm
// bound |S| <= S0(v)/v with a nondecreasing S0; the (x, n) arguments are
// accepted but unused so the boundary-mollified tensor composes as a field
// operation.

#include <array>
#include <string>
#include <vector>

#include "ctns/grid.hpp"

namespace ctns {

enum class SensitivityVariant {
    Logarithmic,         // S = (1/v) I,           S0 = 1
    SubLogarithmic,      // S = v^(-theta) I,      S0(v) = v^(1-theta), theta in (0,1)
    RotatedLogarithmic,  // S = (1/v) R(alpha),    S0 = 1
    ScaledLogarithmic,   // S = (c/v) I,           S0 = c, c > 0
};

struct SensitivitySpec {
    SensitivityVariant variant = SensitivityVariant::Logarithmic;
    double theta = 0.5;  // SubLogarithmic exponent
    double alpha = 0.0;  // RotatedLogarithmic angle (radians)
    double scale = 1.0;  // ScaledLogarithmic factor

    static SensitivitySpec logarithmic();
    static SensitivitySpec sub_logarithmic(double theta);
    static SensitivitySpec rotated_logarithmic(double alpha);
    static SensitivitySpec scaled_logarithmic(double c);
};

using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Evaluate S(n, v). Requires v > 0; n >= 0 is accepted for interface
/// parity with the tensor-valued generalization.
Matrix2 eval_sensitivity(const SensitivitySpec& spec, double n, double v);

/// The nondecreasing bound S0(v) with |S(n,v)|_op <= S0(v)/v.
double s0_bound(const SensitivitySpec& spec, double v);

/// Spectral (operator) norm of a 2x2 matrix.
double operator_norm(const Matrix2& m);

struct ModelParams {
    ScalarField phi;          // gravitational potential, cell-centered
    double eps = 0.1;         // boundary mollifier width
    SensitivitySpec sensitivity;
    double dt_safety = 0.4;   // CFL safety factor in (0,1)
    double v_floor = 1e-14;   // positivity clamp threshold for v
    bool convective_term = true;  // false drops (u.grad)u from the momentum step

    void validate(const Grid& grid) const;
};

/// Linear gravity potential phi(x, y) = g * y.
ScalarField linear_gravity_potential(const Grid& grid, double g);

struct InitialData {
    ScalarField n0;
    ScalarField v0;
    ScalarField w0;
    VectorField u0;
};

struct ValidationIssue {
    std::string condition;
    double offending_value = 0.0;
};

struct ValidationReport {
    std::vector<ValidationIssue> violations;
    bool pass() const { return violations.empty(); }
    std::string to_string() const;
};

/// Check the admissibility conditions: n0 >= 0 and not identically zero,
/// v0 > 0, w0 > 0, discretely divergence-free u0 with zero wall-normal
/// trace. Reports every violated condition; never throws.
ValidationReport validate_initial_data(const InitialData& data);

struct ScenarioOptions {
    double w0_level = -1.0;   // < 0 means 2 * mass / |domain|
    double u_amp = 0.05;      // velocity scale for the vortex construction
};

/// Named initial-data presets. All presets renormalize n0 so that
/// integrate(n0) equals mass to round-off and keep sup v0 <= K.
///   "uniform"        flat fields, zero velocity
///   "gaussian-bump"  off-center normalized bump in n0
///   "perturbed"      smooth low-mode perturbations on all fields
///   "vortex"         flat scalars with a solenoidal stream-function velocity
InitialData make_scenario(const std::string& kind, const Grid& grid, double mass,
                          double K, const ScenarioOptions& opts = {});

std::vector<std::string> scenario_names();

}  // namespace ctns
