#pragma once

// Everything the analysis tracks on top of the raw state: the logarithmic
// signal transform z = -ln(v/||v0||_inf), the conditional functional
//
//   F(t) = int n ln(n/nbar0) + 1/2 int |grad z|^2 + int (w - wbar)^2 + int |u|^2,
//
// per-sample norm records, exponential-rate fits, invariant audits over a
// recorded series, temporal-average bounds, an empirical calibration of the
// borderline functional inequality constant, and the quadrature check of the
// convolution decay estimate used in the large-time arguments.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctns/grid.hpp"
#include "ctns/solver.hpp"

namespace ctns {

// ---- per-sample record ----

struct DiagnosticsRecord {
    double t = 0.0;
    double mass_n = 0.0;
    double sup_v = 0.0;
    double l1_w = 0.0;
    double mean_w = 0.0;
    double F_value = 0.0;
    double F_entropy = 0.0;  // int n ln(n/nbar0)
    double F_gradz = 0.0;    // 1/2 int |grad z|^2
    double F_wdev = 0.0;     // int (w - wbar)^2
    double F_u = 0.0;        // int |u|^2
    double sup_dev_n = 0.0;  // ||n - nbar0||_inf
    double sup_v_norm = 0.0;
    double sup_dev_w = 0.0;  // ||w - nbar0||_inf
    double grad_z_l2 = 0.0;
    double grad_z_l4 = 0.0;
    double grad_z_sup = 0.0;
    double u_l2 = 0.0;
    double grad_u_l2 = 0.0;
    double div_u_sup = 0.0;
    double gradn_weighted_l2 = 0.0;  // sqrt int |grad n|^2 / (n+1)^2
    long clamp_count = 0;            // cumulative v-floor clamps

    static const std::vector<std::string>& column_names();
};

/// Immutable facts about a run, fixed at t = 0.
struct RunMetadata {
    double mass0 = 0.0;       // m = int n0
    double n_bar0 = 0.0;      // m / |domain|
    double v0_sup = 0.0;      // ||v0||_inf
    double w0_l1 = 0.0;       // int w0
    double w0_mean = 0.0;
    double z0_l1 = 0.0;       // int ln(||v0||_inf / v0)
    double area = 0.0;
    double s0_at_K = 1.0;     // S0(K) for the configured sensitivity
    double lyapunov_delta = 1e-3;
};

ScalarField z_field(const ScalarField& v, double v0_sup, double v_floor = 1e-14);

struct LyapunovBreakdown {
    double value = 0.0;
    double entropy = 0.0;
    double gradz = 0.0;
    double wdev = 0.0;
    double u = 0.0;
};

/// F and its four components; pass n_bar0 <= 0 to derive it from the state
/// (mass is conserved, so they agree).
LyapunovBreakdown lyapunov_F(const SystemState& state, double n_bar0 = -1.0);

DiagnosticsRecord make_record(const SystemState& state, const RunMetadata& meta,
                              long cumulative_clamps, double div_u_sup);

// ---- exponential rate fits ----

struct RateFit {
    double kappa_hat = 0.0;
    double intercept = 0.0;
    double t_a = 0.0;
    double t_b = 0.0;
    double r2 = 0.0;
    int n_samples = 0;
};

/// Least squares on (t, ln y) over the window; kappa_hat = -slope. Throws
/// DiagnosticError on nonpositive samples or fewer than 10 points in window.
RateFit fit_decay_rate(const std::vector<std::pair<double, double>>& series, double t_a,
                       double t_b);

// ---- invariant audit over a recorded series ----

struct InvariantCheck {
    std::string name;
    bool pass = true;
    double worst = 0.0;    // most extreme violation metric witnessed
    double worst_t = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct InvariantReport {
    std::vector<InvariantCheck> checks;
    bool all_pass() const;
    std::string to_string() const;
};

InvariantReport check_invariants(const std::vector<DiagnosticsRecord>& series,
                                 const RunMetadata& meta);

// ---- temporal averages ----

struct TemporalAverages {
    double t1 = 0.0, t2 = 0.0;
    int samples = 0;
    bool sparse = false;  // fewer than 10 samples: quadrature warning
    double avg_gradz_sq = 0.0;        // (1/(t2-t1)) int ||grad z||_2^2
    double avg_gradn_weighted = 0.0;  // same for int |grad n|^2/(n+1)^2
    double avg_entropy = 0.0;
    double bound_gradz = 0.0;    // C0(t1+1)/(t2-t1) + m + e^{-t1} int w0
    double bound_gradn = 0.0;    // C1(t1+1)/(t2-t1) + m S0^2 + S0^2 e^{-t1} int w0
    double bound_entropy = 0.0;  // only if an inequality constant M was supplied
    bool gradz_ok = false;
    bool gradn_ok = false;
    bool entropy_ok = true;
    double C0 = 0.0, C1 = 0.0;
};

TemporalAverages temporal_average_report(const std::vector<DiagnosticsRecord>& series,
                                         double t1, double t2, const RunMetadata& meta,
                                         std::optional<double> M = std::nullopt);

// ---- borderline functional-inequality probes ----

/// Residual (right side minus left side) of
///   int phi|psi| <= (1/a) int phi ln(phi/phibar)
///                 + ((1+eps) a / 8 pi) {int phi} int |grad psi|^2
///                 + M a {int phi} {int |psi|}^2 + (M/a) int phi.
/// Nonnegative residual means the inequality holds for this sample.
double moser_trudinger_probe(const ScalarField& phi, const ScalarField& psi, double a,
                             double eps, double M);

/// Deterministic smooth random-field family used by the calibration and the
/// probe suite. Trial k is a pure function of (seed, k).
struct RandomFieldFamily {
    std::uint64_t seed = 0x5eedf1e1d;
    double a_min = 0.05;
    double a_max = 20.0;
    int a_scan = 32;  // log-spaced a values scanned per field pair

    std::pair<ScalarField, ScalarField> sample_fields(const Grid& grid,
                                                      std::uint64_t trial) const;
    double sample_a(std::uint64_t trial) const;
};

/// Smallest constant on a logarithmic search grid making the probe residual
/// nonnegative across `trials` sampled (phi, psi) pairs with a scanned over
/// the family's range. Returns 0 when no sample needs a positive constant.
double calibrate_M(const Grid& grid, double eps, const RandomFieldFamily& family,
                   int trials);

/// Count probe violations over `trials` randomized (phi, psi, a) triples.
int probe_violations(const Grid& grid, double eps, double M,
                     const RandomFieldFamily& family, int trials);

// ---- convolution decay quadrature ----

struct ConvolutionCheck {
    std::vector<double> t;
    std::vector<double> lhs;    // int_0^t (1+(t-s)^-alpha) e^{-gamma(t-s)} (1+s^-beta) e^{-delta s} ds
    std::vector<double> bound;  // C_hat (1 + t^{min(0,1-alpha-beta)}) e^{-min(gamma,delta) t}
    double C_hat = 0.0;
    double tail_rate = 0.0;  // log-fit decay rate of lhs on the late window
    double expected_rate = 0.0;  // min(gamma, delta)
};

ConvolutionCheck convolution_bound_check(double alpha, double beta, double gamma,
                                         double delta);

/// First nonzero zero-flux Laplacian eigenvalue of the rectangle.
double lambda1_rectangle(const Grid& grid);

}  // namespace ctns
