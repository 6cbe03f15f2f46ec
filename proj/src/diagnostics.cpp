#include "ctns/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "ctns/errors.hpp"

namespace ctns {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

const std::vector<std::string>& DiagnosticsRecord::column_names() {
    static const std::vector<std::string> cols = {
        "t",          "mass_n",       "sup_v",      "l1_w",       "mean_w",
        "F_value",    "F_entropy",    "F_gradz",    "F_wdev",     "F_u",
        "sup_dev_n",  "sup_v_norm",   "sup_dev_w",  "grad_z_l2",  "grad_z_l4",
        "grad_z_sup", "u_l2",         "grad_u_l2",  "div_u_sup",  "gradn_weighted_l2",
        "clamp_count"};
    return cols;
}

ScalarField z_field(const ScalarField& v, double v0_sup, double v_floor) {
    if (!(v0_sup > 0.0)) throw DiagnosticError("z_field: v0_sup must be positive");
    ScalarField z(v.grid);
    for (size_t k = 0; k < v.values.size(); ++k) {
        const double val = v.values[k];
        if (val < v_floor)
            throw DiagnosticError("z_field: v below the positivity floor");
        z.values[k] = std::log(v0_sup / val);
    }
    return z;
}

namespace {

double entropy_integral(const ScalarField& n, double n_bar0) {
    // continuous extension x ln x -> 0 at 0; values at or below 1e-300 drop out
    double sum = 0.0, c = 0.0;
    for (double val : n.values) {
        if (val <= 1e-300) continue;
        const double term = val * std::log(val / n_bar0);
        const double y = term - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    return sum * n.grid.cell_volume();
}

double center_mag_sup(const VectorField& g) {
    double m = 0.0;
    for (int j = 0; j < g.grid.ny; ++j)
        for (int i = 0; i < g.grid.nx; ++i) {
            const double cx = 0.5 * (g.fx(i, j) + g.fx(i + 1, j));
            const double cy = 0.5 * (g.fy(i, j) + g.fy(i, j + 1));
            m = std::max(m, std::sqrt(cx * cx + cy * cy));
        }
    return m;
}

}  // namespace

LyapunovBreakdown lyapunov_F(const SystemState& state, double n_bar0) {
    const Grid& g = state.n.grid;
    if (n_bar0 <= 0.0) n_bar0 = integrate(state.n) / g.area();

    LyapunovBreakdown b;
    b.entropy = entropy_integral(state.n, n_bar0);

    const ScalarField z = z_field(state.v, state.v0_sup);
    const double gz = face_l2(gradient(z));
    b.gradz = 0.5 * gz * gz;

    const double wbar = mean(state.w);
    double acc = 0.0;
    for (double wv : state.w.values) acc += (wv - wbar) * (wv - wbar);
    b.wdev = acc * g.cell_volume();

    const double ul2 = center_l2(state.u);
    b.u = ul2 * ul2;

    b.value = b.entropy + b.gradz + b.wdev + b.u;
    return b;
}

DiagnosticsRecord make_record(const SystemState& state, const RunMetadata& meta,
                              long cumulative_clamps, double div_u_sup) {
    const Grid& g = state.n.grid;
    DiagnosticsRecord r;
    r.t = state.t;
    r.mass_n = integrate(state.n);
    r.sup_v = field_max(state.v);
    r.l1_w = integrate(state.w);
    r.mean_w = mean(state.w);

    const LyapunovBreakdown F = lyapunov_F(state, meta.n_bar0);
    r.F_value = F.value;
    r.F_entropy = F.entropy;
    r.F_gradz = F.gradz;
    r.F_wdev = F.wdev;
    r.F_u = F.u;

    double dev_n = 0.0, dev_w = 0.0;
    for (double v : state.n.values) dev_n = std::max(dev_n, std::abs(v - meta.n_bar0));
    for (double v : state.w.values) dev_w = std::max(dev_w, std::abs(v - meta.n_bar0));
    r.sup_dev_n = dev_n;
    r.sup_v_norm = r.sup_v;
    r.sup_dev_w = dev_w;

    const ScalarField z = z_field(state.v, state.v0_sup);
    const VectorField gz = gradient(z);
    r.grad_z_l2 = face_l2(gz);
    r.grad_z_l4 = center_l4(gz);
    r.grad_z_sup = center_mag_sup(gz);

    r.u_l2 = center_l2(state.u);
    r.grad_u_l2 = grad_l2(state.u);
    r.div_u_sup = div_u_sup;

    // int |grad n|^2 / (n+1)^2 with face-averaged denominators
    const VectorField gn = gradient(state.n);
    double acc = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const double nf = 0.5 * (state.n(i - 1, j) + state.n(i, j)) + 1.0;
            const double q = gn.fx(i, j) / nf;
            acc += q * q;
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double nf = 0.5 * (state.n(i, j - 1) + state.n(i, j)) + 1.0;
            const double q = gn.fy(i, j) / nf;
            acc += q * q;
        }
    r.gradn_weighted_l2 = std::sqrt(acc * g.cell_volume());

    r.clamp_count = cumulative_clamps;
    return r;
}

RateFit fit_decay_rate(const std::vector<std::pair<double, double>>& series, double t_a,
                       double t_b) {
    if (!(t_a < t_b)) throw DiagnosticError("fit_decay_rate: empty window");
    std::vector<double> ts, ls;
    for (const auto& [t, y] : series) {
        if (t < t_a || t > t_b) continue;
        if (!(y > 0.0))
            throw DiagnosticError(
                "fit_decay_rate: nonpositive sample in window (quantity not decaying yet)");
        ts.push_back(t);
        ls.push_back(std::log(y));
    }
    if (ts.size() < 10)
        throw DiagnosticError("fit_decay_rate: fewer than 10 samples in window");

    const size_t n = ts.size();
    double mt = 0.0, ml = 0.0;
    for (size_t k = 0; k < n; ++k) {
        mt += ts[k];
        ml += ls[k];
    }
    mt /= n;
    ml /= n;
    double stt = 0.0, stl = 0.0, sll = 0.0;
    for (size_t k = 0; k < n; ++k) {
        stt += (ts[k] - mt) * (ts[k] - mt);
        stl += (ts[k] - mt) * (ls[k] - ml);
        sll += (ls[k] - ml) * (ls[k] - ml);
    }
    const double slope = stl / stt;

    RateFit fit;
    fit.kappa_hat = -slope;
    fit.intercept = ml - slope * mt;
    fit.t_a = t_a;
    fit.t_b = t_b;
    fit.n_samples = static_cast<int>(n);
    double ss_res = 0.0;
    for (size_t k = 0; k < n; ++k) {
        const double r = ls[k] - (fit.intercept + slope * ts[k]);
        ss_res += r * r;
    }
    fit.r2 = (sll > 0.0) ? std::max(0.0, 1.0 - ss_res / sll) : 1.0;
    return fit;
}

bool InvariantReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const InvariantCheck& c) { return c.pass; });
}

std::string InvariantReport::to_string() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << (c.pass ? "pass" : "FAIL") << "  " << c.name << "  worst " << c.worst
           << " at t=" << c.worst_t << " (threshold " << c.threshold << ")";
        if (!c.detail.empty()) os << "  " << c.detail;
        os << "\n";
    }
    return os.str();
}

InvariantReport check_invariants(const std::vector<DiagnosticsRecord>& series,
                                 const RunMetadata& meta) {
    if (series.empty()) throw DiagnosticError("check_invariants: empty series");
    InvariantReport rep;

    auto scan = [&series](const std::string& name, double threshold,
                          const std::function<double(const DiagnosticsRecord&)>& metric) {
        InvariantCheck c;
        c.name = name;
        c.threshold = threshold;
        c.worst = -1e300;
        for (const auto& r : series) {
            const double m = metric(r);
            if (m > c.worst) {
                c.worst = m;
                c.worst_t = r.t;
            }
        }
        c.pass = c.worst <= threshold;
        return c;
    };

    rep.checks.push_back(scan("mass-conservation", 1e-10, [&meta](const DiagnosticsRecord& r) {
        return std::abs(r.mass_n - meta.mass0) / meta.mass0;
    }));
    rep.checks.push_back(scan("max-principle-v", 1e-12, [&meta](const DiagnosticsRecord& r) {
        return r.sup_v - meta.v0_sup;
    }));
    {
        InvariantCheck c;
        c.name = "sup-v-monotone";
        c.threshold = 1e-12;
        c.worst = -1e300;
        for (size_t k = 1; k < series.size(); ++k) {
            const double jump = series[k].sup_v - series[k - 1].sup_v;
            if (jump > c.worst) {
                c.worst = jump;
                c.worst_t = series[k].t;
            }
        }
        if (series.size() < 2) c.worst = 0.0;
        c.pass = c.worst <= c.threshold;
        rep.checks.push_back(c);
    }
    rep.checks.push_back(scan("w-l1-bound", 1e-8, [&meta](const DiagnosticsRecord& r) {
        return r.l1_w - (meta.mass0 + std::exp(-r.t) * meta.w0_l1);
    }));
    rep.checks.push_back(scan("mean-w-ode", 1e-6, [&meta](const DiagnosticsRecord& r) {
        const double expect = meta.n_bar0 + (meta.w0_mean - meta.n_bar0) * std::exp(-r.t);
        return std::abs(r.mean_w - expect);
    }));
    rep.checks.push_back(
        scan("lyapunov-additivity", 1e-12, [](const DiagnosticsRecord& r) {
            const double parts = r.F_entropy + r.F_gradz + r.F_wdev + r.F_u;
            return std::abs(r.F_value - parts) / std::max(1.0, std::abs(r.F_value));
        }));
    rep.checks.push_back(scan("entropy-nonnegative", 1e-12, [](const DiagnosticsRecord& r) {
        return -r.F_entropy;
    }));
    rep.checks.push_back(scan("divergence-free", 1e-8, [](const DiagnosticsRecord& r) {
        return r.div_u_sup;
    }));
    {
        // conditional decay: once F first dips below delta, it must not rise
        InvariantCheck c;
        c.name = "conditional-F-decay";
        c.threshold = 1e-8;
        c.worst = -1e300;
        size_t entry = series.size();
        for (size_t k = 0; k < series.size(); ++k)
            if (series[k].F_value <= meta.lyapunov_delta) {
                entry = k;
                break;
            }
        if (entry == series.size()) {
            c.worst = 0.0;
            c.detail = "F never entered the smallness region";
        } else {
            for (size_t k = entry + 1; k < series.size(); ++k) {
                const double rise = series[k].F_value - series[k - 1].F_value;
                if (rise > c.worst) {
                    c.worst = rise;
                    c.worst_t = series[k].t;
                }
            }
            if (entry + 1 >= series.size()) c.worst = 0.0;
            std::ostringstream os;
            os << "entered at t=" << series[entry].t;
            c.detail = os.str();
        }
        c.pass = c.worst <= c.threshold;
        rep.checks.push_back(c);
    }
    return rep;
}

TemporalAverages temporal_average_report(const std::vector<DiagnosticsRecord>& series,
                                         double t1, double t2, const RunMetadata& meta,
                                         std::optional<double> M) {
    if (!(t1 < t2)) throw DiagnosticError("temporal_average_report: t1 must precede t2");
    TemporalAverages out;
    out.t1 = t1;
    out.t2 = t2;

    std::vector<const DiagnosticsRecord*> win;
    for (const auto& r : series)
        if (r.t >= t1 - 1e-12 && r.t <= t2 + 1e-12) win.push_back(&r);
    out.samples = static_cast<int>(win.size());
    if (win.size() < 2) throw DiagnosticError("temporal_average_report: window too sparse");
    out.sparse = win.size() < 10;

    const double span = win.back()->t - win.front()->t;
    auto trapezoid = [&win, span](const std::function<double(const DiagnosticsRecord&)>& f) {
        double acc = 0.0;
        for (size_t k = 1; k < win.size(); ++k)
            acc += 0.5 * (f(*win[k - 1]) + f(*win[k])) * (win[k]->t - win[k - 1]->t);
        return acc / span;
    };

    out.avg_gradz_sq = trapezoid(
        [](const DiagnosticsRecord& r) { return r.grad_z_l2 * r.grad_z_l2; });
    out.avg_gradn_weighted = trapezoid([](const DiagnosticsRecord& r) {
        return r.gradn_weighted_l2 * r.gradn_weighted_l2;
    });
    out.avg_entropy = trapezoid([](const DiagnosticsRecord& r) { return r.F_entropy; });

    const double m = meta.mass0;
    const double S2 = meta.s0_at_K * meta.s0_at_K;
    out.C0 = meta.z0_l1 + m + meta.w0_l1;
    out.C1 = 2.0 * m + S2 * out.C0;
    const double dt12 = t2 - t1;
    out.bound_gradz = out.C0 * (t1 + 1.0) / dt12 + m + std::exp(-t1) * meta.w0_l1;
    out.bound_gradn =
        out.C1 * (t1 + 1.0) / dt12 + m * S2 + S2 * std::exp(-t1) * meta.w0_l1;
    out.gradz_ok = out.avg_gradz_sq <= out.bound_gradz;
    out.gradn_ok = out.avg_gradn_weighted <= out.bound_gradn;

    if (M) {
        const double lnp = std::max(0.0, std::log(meta.area / m));
        out.bound_entropy = (m / kPi) * out.C1 * (1.0 + t1) / dt12 +
                            (4.0 * (*M) * m * m + *M) * m +
                            (m * m / kPi + m * meta.w0_l1 / kPi * std::exp(-t1)) * S2 +
                            2.0 * m * lnp;
        out.entropy_ok = out.avg_entropy <= out.bound_entropy;
    }
    return out;
}

double moser_trudinger_probe(const ScalarField& phi, const ScalarField& psi, double a,
                             double eps, double M) {
    if (!(a > 0.0) || !(eps > 0.0))
        throw DiagnosticError("moser_trudinger_probe: a and eps must be positive");
    if (field_min(phi) < 0.0 || field_max(phi) <= 0.0)
        throw DiagnosticError("moser_trudinger_probe: phi must be nonnegative, not all zero");

    const Grid& g = phi.grid;
    const double vol = g.cell_volume();
    const double int_phi = integrate(phi);
    const double phibar = int_phi / g.area();

    double lhs = 0.0, ent = 0.0, l1psi = 0.0;
    for (size_t k = 0; k < phi.values.size(); ++k) {
        lhs += phi.values[k] * std::abs(psi.values[k]);
        l1psi += std::abs(psi.values[k]);
        if (phi.values[k] > 1e-300)
            ent += phi.values[k] * std::log(phi.values[k] / phibar);
    }
    lhs *= vol;
    ent *= vol;
    l1psi *= vol;
    const double dirichlet = [&psi] {
        const double d = face_l2(gradient(psi));
        return d * d;
    }();

    const double rhs = ent / a + (1.0 + eps) * a / (8.0 * kPi) * int_phi * dirichlet +
                       M * a * int_phi * l1psi * l1psi + M / a * int_phi;
    return rhs - lhs;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

ScalarField cosine_series(const Grid& g, std::mt19937_64& rng, double amp) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    double coef[4][4];
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l)
            coef[k][l] = gauss(rng) / (1.0 + k * k + l * l);
    coef[0][0] = 0.0;
    ScalarField f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double acc = 0.0;
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l) {
                    if (coef[k][l] == 0.0) continue;
                    acc += coef[k][l] * std::cos(kPi * k * g.xc(i) / g.Lx) *
                           std::cos(kPi * l * g.yc(j) / g.Ly);
                }
            f(i, j) = amp * acc;
        }
    return f;
}

}  // namespace

std::pair<ScalarField, ScalarField> RandomFieldFamily::sample_fields(
    const Grid& grid, std::uint64_t trial) const {
    std::mt19937_64 rng(splitmix(seed ^ (trial * 0x9e3779b97f4a7c15ULL + 1)));
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    const double amp_phi = 0.3 + 1.2 * uni(rng);
    ScalarField xi = cosine_series(grid, rng, amp_phi);
    ScalarField phi(grid);
    for (size_t k = 0; k < phi.values.size(); ++k) phi.values[k] = std::exp(xi.values[k]);

    ScalarField psi(grid);
    if (trial % 4 == 3) {
        // near-constant signals drive the worst constant; keep them in the mix
        const double c = -2.0 + 4.0 * uni(rng);
        ScalarField bump = cosine_series(grid, rng, 0.05);
        for (size_t k = 0; k < psi.values.size(); ++k) psi.values[k] = c + bump.values[k];
    } else {
        const double amp_psi = 0.3 + 1.7 * uni(rng);
        psi = cosine_series(grid, rng, amp_psi);
    }
    return {std::move(phi), std::move(psi)};
}

double RandomFieldFamily::sample_a(std::uint64_t trial) const {
    std::mt19937_64 rng(splitmix(seed ^ 0xabcdef ^ (trial * 0x2545f4914f6cdd1dULL + 7)));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double lo = std::max(a_min, 0.1), hi = std::min(a_max, 10.0);
    return lo * std::pow(hi / lo, uni(rng));
}

namespace {

struct ProbeParts {
    double lhs, ent, dirichlet, int_phi, l1psi;
};

ProbeParts probe_parts(const ScalarField& phi, const ScalarField& psi) {
    const double vol = phi.grid.cell_volume();
    ProbeParts p{0.0, 0.0, 0.0, integrate(phi), 0.0};
    const double phibar = p.int_phi / phi.grid.area();
    for (size_t k = 0; k < phi.values.size(); ++k) {
        p.lhs += phi.values[k] * std::abs(psi.values[k]);
        p.l1psi += std::abs(psi.values[k]);
        if (phi.values[k] > 1e-300)
            p.ent += phi.values[k] * std::log(phi.values[k] / phibar);
    }
    p.lhs *= vol;
    p.ent *= vol;
    p.l1psi *= vol;
    const double d = face_l2(gradient(psi));
    p.dirichlet = d * d;
    return p;
}

// Minimal M making the residual nonnegative for one (phi, psi, a).
double needed_M(const ProbeParts& p, double a, double eps) {
    const double free_terms =
        p.ent / a + (1.0 + eps) * a / (8.0 * kPi) * p.int_phi * p.dirichlet;
    const double m_coeff = a * p.int_phi * p.l1psi * p.l1psi + p.int_phi / a;
    return std::max(0.0, (p.lhs - free_terms) / m_coeff);
}

}  // namespace

double calibrate_M(const Grid& grid, double eps, const RandomFieldFamily& family,
                   int trials) {
    if (trials < 100) throw DiagnosticError("calibrate_M: need at least 100 trials");
    double worst = 0.0;
    for (int k = 0; k < trials; ++k) {
        auto [phi, psi] = family.sample_fields(grid, static_cast<std::uint64_t>(k));
        const ProbeParts parts = probe_parts(phi, psi);
        for (int s = 0; s < family.a_scan; ++s) {
            const double a =
                family.a_min *
                std::pow(family.a_max / family.a_min,
                         family.a_scan > 1 ? double(s) / (family.a_scan - 1) : 0.5);
            worst = std::max(worst, needed_M(parts, a, eps));
        }
        worst = std::max(worst, needed_M(parts, family.sample_a(k), eps));
    }
    if (worst == 0.0) return 0.0;
    if (worst > 1e12) throw DiagnosticError("calibrate_M: no feasible constant in range");
    // snap up to the logarithmic search grid 10^(j/16)
    const double j = std::ceil(16.0 * std::log10(worst) - 1e-12);
    return std::pow(10.0, j / 16.0);
}

int probe_violations(const Grid& grid, double eps, double M,
                     const RandomFieldFamily& family, int trials) {
    int bad = 0;
    for (int k = 0; k < trials; ++k) {
        auto [phi, psi] = family.sample_fields(grid, static_cast<std::uint64_t>(k));
        const double a = family.sample_a(k);
        if (moser_trudinger_probe(phi, psi, a, eps, M) < 0.0) ++bad;
    }
    return bad;
}

namespace {

// adaptive Simpson on a smooth integrand
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_smooth(const std::function<double(double)>& f, double a, double b,
                        double tol) {
    if (!(b > a)) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

// int_0^X f(x) x^{-mu} dx for mu < 1, f smooth: substituted to a smooth
// integral when the endpoint power is singular.
double integrate_power_endpoint(const std::function<double(double)>& f, double X,
                                double mu, double tol) {
    if (X <= 0.0) return 0.0;
    if (mu <= 0.0)
        return integrate_smooth([&](double x) { return f(x) * std::pow(x, -mu); }, 0.0, X,
                                tol);
    const double q = 1.0 - mu;
    return integrate_smooth(
               [&](double tau) { return f(std::pow(tau, 1.0 / q)); }, 0.0,
               std::pow(X, q), tol) /
           q;
}

}  // namespace

ConvolutionCheck convolution_bound_check(double alpha, double beta, double gamma,
                                         double delta) {
    if (!(alpha < 1.0 && beta < 1.0))
        throw DiagnosticError("convolution_bound_check: alpha and beta must be < 1");
    if (!(gamma > 0.0 && delta > 0.0) || gamma == delta)
        throw DiagnosticError(
            "convolution_bound_check: gamma, delta must be positive and distinct");

    ConvolutionCheck out;
    out.expected_rate = std::min(gamma, delta);
    const int npts = 96;
    for (int k = 0; k < npts; ++k)
        out.t.push_back(1e-3 * std::pow(20.0 / 1e-3, double(k) / (npts - 1)));

    const double tol = 1e-11;
    for (double t : out.t) {
        const double half = 0.5 * t;
        // s in [0, t/2]: singular factor s^-beta, smooth remainder
        auto A = [&](double s) {
            const double r = t - s;
            return (1.0 + std::pow(r, -alpha)) * std::exp(-gamma * r) * std::exp(-delta * s);
        };
        // r = t - s in [0, t/2]: singular factor r^-alpha
        auto B = [&](double r) {
            const double s = t - r;
            return (1.0 + std::pow(s, -beta)) * std::exp(-delta * s) * std::exp(-gamma * r);
        };
        const double scale = std::exp(-std::min(gamma, delta) * t);
        double value = integrate_smooth(A, 0.0, half, tol * scale) +
                       integrate_power_endpoint(A, half, beta, tol * scale) +
                       integrate_smooth(B, 0.0, half, tol * scale) +
                       integrate_power_endpoint(B, half, alpha, tol * scale);
        out.lhs.push_back(value);
    }

    const double expo = std::min(0.0, 1.0 - alpha - beta);
    double chat = 0.0;
    for (int k = 0; k < npts; ++k) {
        const double shape =
            (1.0 + std::pow(out.t[k], expo)) * std::exp(-out.expected_rate * out.t[k]);
        chat = std::max(chat, out.lhs[k] / shape);
    }
    out.C_hat = chat;
    for (int k = 0; k < npts; ++k) {
        const double shape =
            (1.0 + std::pow(out.t[k], expo)) * std::exp(-out.expected_rate * out.t[k]);
        out.bound.push_back(chat * shape);
    }

    std::vector<std::pair<double, double>> tail;
    for (int k = 0; k < npts; ++k)
        if (out.t[k] >= 10.0) tail.emplace_back(out.t[k], out.lhs[k]);
    if (tail.size() >= 10) out.tail_rate = fit_decay_rate(tail, 10.0, 20.0).kappa_hat;
    return out;
}

double lambda1_rectangle(const Grid& grid) {
    const double L = std::max(grid.Lx, grid.Ly);
    return kPi * kPi / (L * L);
}

}  // namespace ctns
