#pragma once

// Finite-difference discretization of the circuit Hamiltonian
//   H = E_c n^2 + E_L (phi - phi_e)^2 + junction coupling
// on a phase grid, and low-lying eigenpairs of the resulting symmetric
// banded matrix.

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "phaseslip/errors.hpp"
#include "phaseslip/grid.hpp"
#include "phaseslip/lapack.hpp"
#include "phaseslip/model.hpp"

namespace phaseslip {

// Symmetric banded matrix in LAPACK lower 'sb' storage (column-major,
// ldab = kd+1). Scalar sectors are tridiagonal (kd = 1); the two-component
// spinor problem interleaves (even_j, odd_j) per grid point (kd = 2).
struct HamiltonianMatrix {
    int dim = 0;
    int kd = 0;
    std::vector<double> ab; // (kd+1) x dim, ab[j*(kd+1) + (i-j)] = A(i,j)
    PhaseGrid grid;
    double phi_e = 0.0;
    bool spinor = false;
    ParitySector sector = ParitySector::even; // meaningful when !spinor

    double at(int i, int j) const {
        if (i < j) std::swap(i, j);
        if (i - j > kd) return 0.0;
        return ab[static_cast<size_t>(j) * (kd + 1) + (i - j)];
    }

    // y = A x
    void matvec(std::span<const double> x, std::span<double> y) const {
        for (int i = 0; i < dim; ++i) y[i] = 0.0;
        for (int j = 0; j < dim; ++j) {
            const double xj = x[j];
            y[j] += ab[static_cast<size_t>(j) * (kd + 1)] * xj;
            const int top = std::min(kd, dim - 1 - j);
            for (int d = 1; d <= top; ++d) {
                const double a = ab[static_cast<size_t>(j) * (kd + 1) + d];
                y[j + d] += a * xj;
                y[j] += a * x[j + d];
            }
        }
    }

    // Infinity norm, used to scale residual tolerances.
    double norm_inf() const {
        double best = 0.0;
        for (int i = 0; i < dim; ++i) {
            double row = 0.0;
            for (int j = std::max(0, i - kd); j <= std::min(dim - 1, i + kd); ++j)
                row += std::abs(at(i, j));
            best = std::max(best, row);
        }
        return best;
    }
};

namespace detail {

// Sanity guard against absurdly coarse grids. The bound is deliberately
// loose: max|U| is dominated by the inductive tail at the window edges where
// the low-lying wavefunctions are negligible, so moderate ratios are still
// accurate (h^2 max|U| / c = 2 gives sub-percent splittings).
inline void check_grid_resolution(const PhaseGrid& g, double kinetic, double max_abs_u) {
    const double h = g.spacing();
    if (max_abs_u > 0.0 && h * h > 4.0 * kinetic / max_abs_u)
        throw GridTooCoarseError("grid too coarse: h^2 = " + std::to_string(h * h) +
                                 " exceeds 4*E_kin/max|U| = " +
                                 std::to_string(4.0 * kinetic / max_abs_u));
}

} // namespace detail

inline HamiltonianMatrix assemble_scalar(const PhaseGrid& g, const CircuitParams& p,
                                         double phi_e, ParitySector sector) {
    g.validate();
    p.validate();
    const double h = g.spacing();
    const double c = p.kinetic_scale();

    HamiltonianMatrix m;
    m.dim = g.n;
    m.kd = 1;
    m.grid = g;
    m.phi_e = phi_e;
    m.spinor = false;
    m.sector = sector;
    m.ab.assign(static_cast<size_t>(g.n) * 2, 0.0);

    double max_u = 0.0;
    for (int j = 0; j < g.n; ++j) {
        const double u = potential_scalar(g.point(j), phi_e, p, sector);
        max_u = std::max(max_u, std::abs(u));
        m.ab[static_cast<size_t>(j) * 2] = 2.0 * c / (h * h) + u;
        if (j + 1 < g.n) m.ab[static_cast<size_t>(j) * 2 + 1] = -c / (h * h);
    }
    detail::check_grid_resolution(g, c, max_u);
    return m;
}

inline HamiltonianMatrix assemble_spinor(const PhaseGrid& g, const CircuitParams& p,
                                         double phi_e) {
    g.validate();
    p.validate();
    const double h = g.spacing();
    const double c = p.kinetic_scale();

    HamiltonianMatrix m;
    m.dim = 2 * g.n;
    m.kd = 2;
    m.grid = g;
    m.phi_e = phi_e;
    m.spinor = true;
    m.ab.assign(static_cast<size_t>(m.dim) * 3, 0.0);

    double max_u = 0.0;
    for (int j = 0; j < g.n; ++j) {
        const SpinorPotential u = potential_spinor(g.point(j), phi_e, p);
        max_u = std::max({max_u, std::abs(u.u_ee), std::abs(u.u_oo)});
        const size_t ce = static_cast<size_t>(2 * j) * 3;     // even row
        const size_t co = static_cast<size_t>(2 * j + 1) * 3; // odd row
        m.ab[ce] = 2.0 * c / (h * h) + u.u_ee;
        m.ab[co] = 2.0 * c / (h * h) + u.u_oo;
        m.ab[ce + 1] = u.u_eo; // even_j <-> odd_j
        if (j + 1 < g.n) {
            m.ab[ce + 2] = -c / (h * h); // even_j <-> even_{j+1}
            m.ab[co + 2] = -c / (h * h); // odd_j <-> odd_{j+1}
        }
    }
    detail::check_grid_resolution(g, c, max_u);
    return m;
}

// Lowest eigenpairs. Vectors are L2-normalized with weight h:
// h * sum_j psi_i[j] psi_k[j] = delta_ik.
struct Spectrum {
    std::vector<double> eigenvalues;     // ascending, GHz
    std::vector<double> eigenvectors;    // dim x k, column-major
    int dim = 0;
    int k = 0;
    double h = 0.0;

    std::span<const double> vec(int i) const {
        return {eigenvectors.data() + static_cast<size_t>(i) * dim,
                static_cast<size_t>(dim)};
    }
};

inline Spectrum eigensolve(const HamiltonianMatrix& hm, int k) {
    if (k < 1 || k > hm.dim)
        throw ConfigError("eigensolve: k must lie in [1, dim]");
    const int n = hm.dim;
    const int ld = hm.kd + 1;

    Spectrum s;
    s.dim = n;
    s.k = k;
    s.h = hm.grid.spacing();
    s.eigenvalues.assign(k, 0.0);
    s.eigenvectors.assign(static_cast<size_t>(n) * k, 0.0);

    int m = 0;
    int info = 0;
    if (hm.kd == 1) {
        std::vector<double> d(n), e(n > 1 ? n - 1 : 1);
        for (int j = 0; j < n; ++j) {
            d[j] = hm.ab[static_cast<size_t>(j) * 2];
            if (j + 1 < n) e[j] = hm.ab[static_cast<size_t>(j) * 2 + 1];
        }
        std::vector<lapack_int> isuppz(2 * static_cast<size_t>(k));
        info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(),
                              0.0, 0.0, 1, k, 0.0, &m, s.eigenvalues.data(),
                              s.eigenvectors.data(), n, isuppz.data());
    } else {
        std::vector<double> ab(hm.ab); // dsbevx clobbers the band
        std::vector<double> q(static_cast<size_t>(n) * n);
        std::vector<lapack_int> ifail(n);
        info = LAPACKE_dsbevx(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, hm.kd, ab.data(),
                              ld, q.data(), n, 0.0, 0.0, 1, k,
                              2.0 * LAPACKE_dlamch('S'), &m, s.eigenvalues.data(),
                              s.eigenvectors.data(), n, ifail.data());
    }
    if (info != 0 || m != k)
        throw ConvergenceError("eigensolve: LAPACK info=" + std::to_string(info) +
                               ", converged " + std::to_string(m) + "/" +
                               std::to_string(k), std::nan(""));

    // Normalize with grid weight and fix a deterministic sign convention.
    const double scale = 1.0 / std::sqrt(s.h);
    for (int i = 0; i < k; ++i) {
        double* v = s.eigenvectors.data() + static_cast<size_t>(i) * n;
        int jmax = 0;
        for (int j = 1; j < n; ++j)
            if (std::abs(v[j]) > std::abs(v[jmax])) jmax = j;
        const double flip = v[jmax] < 0.0 ? -scale : scale;
        for (int j = 0; j < n; ++j) v[j] *= flip;
    }

    // Contract checks: orthonormality and residual.
    const double hnorm = hm.norm_inf();
    std::vector<double> work(n);
    for (int i = 0; i < k; ++i) {
        const auto vi = s.vec(i);
        hm.matvec(vi, work);
        double res = 0.0;
        for (int j = 0; j < n; ++j) {
            const double r = work[j] - s.eigenvalues[i] * vi[j];
            res += r * r;
        }
        res = std::sqrt(res * s.h);
        if (res > 1e-6 * hnorm)
            throw ConvergenceError("eigensolve: residual " + std::to_string(res) +
                                   " exceeds tolerance", res);
        for (int l = 0; l <= i; ++l) {
            const auto vl = s.vec(l);
            double dot = 0.0;
            for (int j = 0; j < n; ++j) dot += vi[j] * vl[j];
            dot *= s.h;
            const double target = (l == i) ? 1.0 : 0.0;
            if (std::abs(dot - target) > 1e-8)
                throw ConvergenceError("eigensolve: eigenvectors not orthonormal", dot);
        }
    }
    return s;
}

// Splitting of the lowest double-well doublet at phi_e = 2*pi, even sector.
inline double tunnel_splitting(const CircuitParams& p, const PhaseGrid& g) {
    if (p.mode != JunctionMode::topological && p.mode != JunctionMode::combined)
        throw ConfigError("tunnel_splitting: requires a topological junction mode");
    const auto h = assemble_scalar(g, p, 2.0 * std::numbers::pi, ParitySector::even);
    const auto s = eigensolve(h, 2);
    return s.eigenvalues[1] - s.eigenvalues[0];
}

} // namespace phaseslip
