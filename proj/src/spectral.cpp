#include "ctns/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <vector>

#include "ctns/errors.hpp"

namespace ctns {

namespace {

// FFTW plan creation is not thread-safe; execution is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
    std::vector<double> buf;
    int rows = 0, cols = 0;
    double norm = 1.0;

    void init(int rows_, int cols_, fftw_r2r_kind kf_row, fftw_r2r_kind kf_col,
              fftw_r2r_kind ki_row, fftw_r2r_kind ki_col, double norm_) {
        rows = rows_;
        cols = cols_;
        norm = norm_;
        buf.assign(static_cast<size_t>(rows) * cols, 0.0);
        std::lock_guard<std::mutex> lock(plan_mutex());
        fwd = fftw_plan_r2r_2d(rows, cols, buf.data(), buf.data(), kf_row, kf_col,
                               FFTW_ESTIMATE);
        inv = fftw_plan_r2r_2d(rows, cols, buf.data(), buf.data(), ki_row, ki_col,
                               FFTW_ESTIMATE);
        if (!fwd || !inv) throw SolverError("spectral: fftw plan creation failed");
    }
    void destroy() {
        std::lock_guard<std::mutex> lock(plan_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (inv) fftw_destroy_plan(inv);
        fwd = inv = nullptr;
    }
};

double sin2(double x) {
    const double s = std::sin(x);
    return s * s;
}

}  // namespace

struct SpectralSolver::Impl {
    Grid grid;
    // Eigenvalues of the 1D second-difference operators per boundary type.
    std::vector<double> lam_neu_x, lam_neu_y;    // cell-centered, reflected ghosts
    std::vector<double> lam_dir_x, lam_dir_y;    // cell-centered, odd ghosts
    std::vector<double> lam_node_x, lam_node_y;  // interior face nodes, pinned ends
    mutable PlanPair neumann;                    // DCT-II / DCT-III
    mutable PlanPair dirichlet;                  // DST-II / DST-III
    mutable PlanPair face_x;                     // DST-I in x, DST-II/III in y
    mutable PlanPair face_y;                     // DST-II/III in x, DST-I in y

    explicit Impl(const Grid& g) : grid(g) {
        const int nx = g.nx, ny = g.ny;
        const double pi = 3.14159265358979323846;
        const double ax = 4.0 / (g.hx * g.hx), ay = 4.0 / (g.hy * g.hy);

        lam_neu_x.resize(nx);
        lam_dir_x.resize(nx);
        for (int k = 0; k < nx; ++k) {
            lam_neu_x[k] = -ax * sin2(0.5 * pi * k / nx);
            lam_dir_x[k] = -ax * sin2(0.5 * pi * (k + 1) / nx);
        }
        lam_neu_y.resize(ny);
        lam_dir_y.resize(ny);
        for (int k = 0; k < ny; ++k) {
            lam_neu_y[k] = -ay * sin2(0.5 * pi * k / ny);
            lam_dir_y[k] = -ay * sin2(0.5 * pi * (k + 1) / ny);
        }
        lam_node_x.resize(nx - 1);
        for (int k = 0; k < nx - 1; ++k)
            lam_node_x[k] = -ax * sin2(0.5 * pi * (k + 1) / nx);
        lam_node_y.resize(ny - 1);
        for (int k = 0; k < ny - 1; ++k)
            lam_node_y[k] = -ay * sin2(0.5 * pi * (k + 1) / ny);

        // Transform layout: FFTW's first dimension is the slow (row) index,
        // which is our j. Normalizations are 2n per transformed dimension.
        neumann.init(ny, nx, FFTW_REDFT10, FFTW_REDFT10, FFTW_REDFT01, FFTW_REDFT01,
                     1.0 / (4.0 * nx * ny));
        dirichlet.init(ny, nx, FFTW_RODFT10, FFTW_RODFT10, FFTW_RODFT01, FFTW_RODFT01,
                       1.0 / (4.0 * nx * ny));
        // x-faces: (nx-1) interior columns (DST-I, norm 2*nx), ny rows of
        // cell-centered y (DST-II, norm 2*ny).
        face_x.init(ny, nx - 1, FFTW_RODFT10, FFTW_RODFT00, FFTW_RODFT01, FFTW_RODFT00,
                    1.0 / (4.0 * nx * ny));
        face_y.init(ny - 1, nx, FFTW_RODFT00, FFTW_RODFT10, FFTW_RODFT00, FFTW_RODFT01,
                    1.0 / (4.0 * nx * ny));
    }
    ~Impl() {
        neumann.destroy();
        dirichlet.destroy();
        face_x.destroy();
        face_y.destroy();
    }
};

SpectralSolver::SpectralSolver(const Grid& grid) : impl_(std::make_unique<Impl>(grid)) {}
SpectralSolver::~SpectralSolver() = default;
const Grid& SpectralSolver::grid() const { return impl_->grid; }

ScalarField SpectralSolver::poisson(const ScalarField& rhs, PoissonBC bc) const {
    const Grid& g = impl_->grid;
    if (!(rhs.grid == g)) throw SolverError("poisson: grid mismatch");
    if (!all_finite(rhs)) throw SolverError("poisson: non-finite right-hand side");

    if (bc == PoissonBC::Neumann) {
        const double total = integrate(rhs);
        double scale = 0.0;
        for (double v : rhs.values) scale = std::max(scale, std::abs(v));
        if (std::abs(total) > 1e-10 * std::max(1.0, scale * g.area()))
            throw SolverError("poisson: incompatible Neumann right-hand side (gauge)");
        PlanPair& p = impl_->neumann;
        std::memcpy(p.buf.data(), rhs.data(), sizeof(double) * rhs.values.size());
        fftw_execute(p.fwd);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double lam = impl_->lam_neu_x[i] + impl_->lam_neu_y[j];
                double& c = p.buf[static_cast<size_t>(j) * g.nx + i];
                c = (lam == 0.0) ? 0.0 : c / lam;  // zero mode fixes the mean gauge
            }
        fftw_execute(p.inv);
        ScalarField out(g);
        for (size_t k = 0; k < out.values.size(); ++k) out.values[k] = p.buf[k] * p.norm;
        return out;
    }

    PlanPair& p = impl_->dirichlet;
    std::memcpy(p.buf.data(), rhs.data(), sizeof(double) * rhs.values.size());
    fftw_execute(p.fwd);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double lam = impl_->lam_dir_x[i] + impl_->lam_dir_y[j];
            p.buf[static_cast<size_t>(j) * g.nx + i] /= lam;
        }
    fftw_execute(p.inv);
    ScalarField out(g);
    for (size_t k = 0; k < out.values.size(); ++k) out.values[k] = p.buf[k] * p.norm;
    return out;
}

ScalarField SpectralSolver::helmholtz_neumann(const ScalarField& f, double c) const {
    const Grid& g = impl_->grid;
    if (!(f.grid == g)) throw SolverError("helmholtz: grid mismatch");
    PlanPair& p = impl_->neumann;
    std::memcpy(p.buf.data(), f.data(), sizeof(double) * f.values.size());
    fftw_execute(p.fwd);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            p.buf[static_cast<size_t>(j) * g.nx + i] /=
                1.0 - c * (impl_->lam_neu_x[i] + impl_->lam_neu_y[j]);
    fftw_execute(p.inv);
    ScalarField out(g);
    for (size_t k = 0; k < out.values.size(); ++k) out.values[k] = p.buf[k] * p.norm;
    return out;
}

void SpectralSolver::helmholtz_face_x(std::vector<double>& fx, double c) const {
    const Grid& g = impl_->grid;
    const int nx = g.nx, ny = g.ny;
    PlanPair& p = impl_->face_x;
    // gather interior columns i = 1..nx-1
    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i)
            p.buf[static_cast<size_t>(j) * (nx - 1) + (i - 1)] =
                fx[static_cast<size_t>(j) * (nx + 1) + i];
    fftw_execute(p.fwd);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx - 1; ++i)
            p.buf[static_cast<size_t>(j) * (nx - 1) + i] /=
                1.0 - c * (impl_->lam_node_x[i] + impl_->lam_dir_y[j]);
    fftw_execute(p.inv);
    for (int j = 0; j < ny; ++j) {
        fx[static_cast<size_t>(j) * (nx + 1)] = 0.0;
        fx[static_cast<size_t>(j) * (nx + 1) + nx] = 0.0;
        for (int i = 1; i < nx; ++i)
            fx[static_cast<size_t>(j) * (nx + 1) + i] =
                p.buf[static_cast<size_t>(j) * (nx - 1) + (i - 1)] * p.norm;
    }
}

void SpectralSolver::helmholtz_face_y(std::vector<double>& fy, double c) const {
    const Grid& g = impl_->grid;
    const int nx = g.nx, ny = g.ny;
    PlanPair& p = impl_->face_y;
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            p.buf[static_cast<size_t>(j - 1) * nx + i] = fy[static_cast<size_t>(j) * nx + i];
    fftw_execute(p.fwd);
    for (int j = 0; j < ny - 1; ++j)
        for (int i = 0; i < nx; ++i)
            p.buf[static_cast<size_t>(j) * nx + i] /=
                1.0 - c * (impl_->lam_dir_x[i] + impl_->lam_node_y[j]);
    fftw_execute(p.inv);
    for (int i = 0; i < nx; ++i) {
        fy[i] = 0.0;
        fy[static_cast<size_t>(ny) * nx + i] = 0.0;
    }
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            fy[static_cast<size_t>(j) * nx + i] =
                p.buf[static_cast<size_t>(j - 1) * nx + i] * p.norm;
}

}  // namespace ctns
