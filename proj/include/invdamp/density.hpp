#pragma once

#include "invdamp/cutoffs.hpp"
#include "invdamp/flow.hpp"
#include "invdamp/green.hpp"
#include "invdamp/grid.hpp"
#include "invdamp/vorticity.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace invdamp::density {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Ladder of absorption parameters with resolution-paired grids.
// ---------------------------------------------------------------------------

struct LadderSpec {
    double eps0 = 0.1;   // largest epsilon
    int rungs = 5;
    double ratio = 0.5;  // epsilon_{r+1} = ratio * epsilon_r
    double kappa = 3.5;  // epsilon / dv; must stay >= 3
    double w_margin = 0.3;
    double v_margin = 0.15;
    int w_nodes_override = 0;  // > 0: fixed w-column count (diagnostic scans)
};

struct Rung {
    double epsilon = 0.1;
    Grid v;  // uniform, symmetric about 0, contains 0 as a node
    Grid w;
};

struct AbsorptionContext {
    int k = 1;
    int iota = -1;  // sign of the absorption term: v' + i*iota*epsilon
    double kappa = 3.5;
    flow::ShearFlow flw;
    flow::CutoffSet cut;
    flow::VorticityMode mode;
    std::vector<Rung> rungs;

    std::vector<double> epsilons() const {
        std::vector<double> e;
        for (const auto& r : rungs) e.push_back(r.epsilon);
        return e;
    }
};

inline AbsorptionContext build_context(int k, int iota, const flow::ShearFlow& f,
                                       const flow::CutoffSet& cut, const flow::VorticityMode& mode,
                                       const LadderSpec& spec = LadderSpec{}) {
    if (iota != 1 && iota != -1) throw std::invalid_argument("build_context: iota must be +1/-1");
    if (spec.kappa < 3.0) throw std::invalid_argument("build_context: kappa must be >= 3");
    if (spec.rungs < 1) throw std::invalid_argument("build_context: need at least one rung");
    AbsorptionContext ctx{k, iota, spec.kappa, f, cut, mode, {}};

    const double w_lo = f.b(0.0) - spec.w_margin;
    const double w_hi = f.b(1.0) + spec.w_margin;
    const double m = cut.margin();
    // v window: union of the psi support, b'' support and omega0 support,
    // each shifted by the whole w range, plus margin; symmetrized about 0.
    double lo = f.b(-m) - w_hi;
    double hi = f.b(1.0 + m) - w_lo;
    if (f.d2b_hi > f.d2b_lo) {
        lo = std::min(lo, f.b(f.d2b_lo) - w_hi);
        hi = std::max(hi, f.b(f.d2b_hi) - w_lo);
    }
    lo = std::min(lo, f.b(mode.support_lo) - w_hi);
    hi = std::max(hi, f.b(mode.support_hi) - w_lo);
    const double V = std::max(std::abs(lo), std::abs(hi)) + spec.v_margin;

    double eps = spec.eps0;
    for (int r = 0; r < spec.rungs; ++r, eps *= spec.ratio) {
        const double dv = eps / spec.kappa;
        if (eps < 3.0 * dv * (1.0 - 1e-12))
            throw std::invalid_argument("build_context: epsilon under-resolved by its grid");
        const int halfn = static_cast<int>(std::ceil(V / dv));
        Grid vg(-halfn * dv, halfn * dv, 2 * halfn + 1);
        int nw = spec.w_nodes_override > 0
                     ? spec.w_nodes_override
                     : static_cast<int>(std::ceil((w_hi - w_lo) / dv)) + 1;
        Grid wg(w_lo, w_hi, nw);
        ctx.rungs.push_back({eps, vg, wg});
    }
    return ctx;
}

// ---------------------------------------------------------------------------
// Per-column geometry: index windows and flow-map caches for one (rung, w).
// ---------------------------------------------------------------------------

struct ColumnGeometry {
    double w = 0.0;
    int row_lo = 0, row_hi = -1;  // rows where psi_k(v_i + w) > 0 (inclusive)
    // Per-row caches, indexed i - row_lo:
    Eigen::VectorXd psi, sr0, sr1, y;  // sr1 = sinh(k(1-y))/sinh k, sr0 = sinh(ky)/sinh k
    // Kernel-column caches (active = b''-support, force = omega0-support):
    std::vector<int> active;  // column indices with dB(v'_j + w) != 0
    std::vector<int> force;   // column indices with f0(v'_j + w) != 0
    Eigen::VectorXd yA, dBA;  // per active column
    Eigen::VectorXd yF, BF, f0F;  // per force column
    int rows() const { return row_hi - row_lo + 1; }
};

inline ColumnGeometry column_geometry(const AbsorptionContext& ctx, const Grid& vg, double w) {
    const auto& f = ctx.flw;
    const auto& cut = ctx.cut;
    const double k = ctx.k;
    ColumnGeometry g;
    g.w = w;

    const double m = cut.margin();
    const double vpsi_lo = f.b(-m) - w, vpsi_hi = f.b(1.0 + m) - w;
    int lo = static_cast<int>(std::ceil((vpsi_lo - vg.lo) / vg.h()));
    int hi = static_cast<int>(std::floor((vpsi_hi - vg.lo) / vg.h()));
    lo = std::max(lo, 0);
    hi = std::min(hi, vg.n - 1);
    g.row_lo = lo;
    g.row_hi = hi;
    if (hi < lo) return g;

    const int nr = g.rows();
    g.psi.resize(nr);
    g.sr0.resize(nr);
    g.sr1.resize(nr);
    g.y.resize(nr);
    for (int i = 0; i < nr; ++i) {
        const double v = vg.node(lo + i) + w;
        const double y = f.inverse_b(v);
        g.y[i] = y;
        g.psi[i] = cut.psi(y);
        g.sr1[i] = sinh_ratio(k * (1.0 - y), k);
        g.sr0[i] = sinh_ratio(k * y, k);
    }

    auto window = [&](double ylo, double yhi, std::vector<int>& idx, auto&& fill) {
        if (yhi <= ylo) return;
        const double alo = f.b(ylo) - w, ahi = f.b(yhi) - w;
        int jlo = std::max(0, static_cast<int>(std::ceil((alo - vg.lo) / vg.h())));
        int jhi = std::min(vg.n - 1, static_cast<int>(std::floor((ahi - vg.lo) / vg.h())));
        for (int j = jlo; j <= jhi; ++j) {
            const double vp = vg.node(j) + w;
            if (!f.in_range(vp)) continue;
            if (fill(j, f.inverse_b(vp))) idx.push_back(j);
        }
    };

    std::vector<double> yA, dBA, yF, BF, f0F;
    window(f.d2b_lo, f.d2b_hi, g.active, [&](int, double y) {
        const double d = f.d2b(y) / f.db(y);  // dB/dv = b''/b'
        if (d == 0.0) return false;
        yA.push_back(y);
        dBA.push_back(d);
        return true;
    });
    window(ctx.mode.support_lo, ctx.mode.support_hi, g.force, [&](int, double y) {
        const double o = ctx.mode.omega0(y);
        if (o == 0.0) return false;
        yF.push_back(y);
        BF.push_back(f.db(y));
        f0F.push_back(o);
        return true;
    });
    g.yA = Eigen::Map<Eigen::VectorXd>(yA.data(), yA.size());
    g.dBA = Eigen::Map<Eigen::VectorXd>(dBA.data(), dBA.size());
    g.yF = Eigen::Map<Eigen::VectorXd>(yF.data(), yF.size());
    g.BF = Eigen::Map<Eigen::VectorXd>(BF.data(), BF.size());
    g.f0F = Eigen::Map<Eigen::VectorXd>(f0F.data(), f0F.size());
    return g;
}

/// Extended kernel via the per-row caches: G(v_i + w, v'_j + w) for row index
/// r (zero-based within the geometry window) against source height yp.
inline double kernel_row(const ColumnGeometry& g, double k, int r, double yp) {
    return g.psi[r] *
           (std::exp(-k * std::abs(g.y[r] - yp)) - g.sr1[r] * std::exp(-k * std::abs(yp)) -
            g.sr0[r] * std::exp(-k * std::abs(yp - 1.0))) /
           (2.0 * k);
}

// ---------------------------------------------------------------------------
// Assembly. (M h)_i = sum_j q_j G(v_i+w, v'_j+w) dB(v'_j+w) h_j / (v'_j + i iota eps)
// ---------------------------------------------------------------------------

/// Kernel columns of M restricted to the geometry's rows: rows() x |active|.
inline Eigen::MatrixXcd operator_columns(const AbsorptionContext& ctx, const Rung& rung,
                                         const ColumnGeometry& g) {
    const int nr = g.rows();
    const int na = static_cast<int>(g.active.size());
    Eigen::MatrixXcd C(nr, na);
    const double q = rung.v.h();  // interior trapezoid weight (supports are interior)
    for (int a = 0; a < na; ++a) {
        const int j = g.active[a];
        const Complex den(rung.v.node(j), ctx.iota * rung.epsilon);
        const Complex scale = q * g.dBA[a] / den;
        for (int r = 0; r < nr; ++r) C(r, a) = kernel_row(g, ctx.k, r, g.yA[a]) * scale;
    }
    return C;
}

/// Full dense Nystrom matrix (tests / diagnostics): rows vanish where psi = 0.
inline Eigen::MatrixXcd assemble_operator(const AbsorptionContext& ctx, const Rung& rung,
                                          double w) {
    const ColumnGeometry g = column_geometry(ctx, rung.v, w);
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(rung.v.n, rung.v.n);
    if (g.rows() <= 0) return M;
    const Eigen::MatrixXcd C = operator_columns(ctx, rung, g);
    for (int a = 0; a < static_cast<int>(g.active.size()); ++a)
        M.block(g.row_lo, g.active[a], g.rows(), 1) = C.col(a);
    return M;
}

/// Right-hand side sum_j q_j G(v_i+w, v'_j+w) f0(v'_j+w) / (B(v'_j+w)(v'_j + i iota eps)).
inline Eigen::VectorXcd assemble_rhs(const AbsorptionContext& ctx, const Rung& rung,
                                     const ColumnGeometry& g) {
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(rung.v.n);
    const int nr = g.rows();
    const double q = rung.v.h();
    for (int s = 0; s < static_cast<int>(g.force.size()); ++s) {
        const int j = g.force[s];
        const Complex den(rung.v.node(j), ctx.iota * rung.epsilon);
        const Complex scale = q * g.f0F[s] / (g.BF[s] * den);
        for (int r = 0; r < nr; ++r)
            rhs[g.row_lo + r] += kernel_row(g, ctx.k, r, g.yF[s]) * scale;
    }
    return rhs;
}

inline Eigen::VectorXcd assemble_rhs(const AbsorptionContext& ctx, const Rung& rung, double w) {
    return assemble_rhs(ctx, rung, column_geometry(ctx, rung.v, w));
}

// ---------------------------------------------------------------------------
// Column solve: theta + M theta = rhs, done exactly on the active block.
// Columns of M vanish off the active set and theta vanishes off the psi rows,
// so the coupled unknowns are active-within-rows; a dense LU for them plus one
// iterative-refinement step, then explicit back-substitution everywhere else.
// ---------------------------------------------------------------------------

struct ColumnSolve {
    Eigen::VectorXcd theta;
    double residual = 0.0;  // relative residual of the discretized equation
};

inline ColumnSolve solve_column(const AbsorptionContext& ctx, const Rung& rung,
                                const ColumnGeometry& g, const Eigen::VectorXcd& rhs) {
    ColumnSolve out;
    out.theta = Eigen::VectorXcd::Zero(rung.v.n);
    if (g.rows() <= 0) return out;
    const double rhs_norm = rhs.norm();

    // Coupled unknowns: active columns that are also psi rows.
    std::vector<int> ac;  // indices into g.active
    for (int a = 0; a < static_cast<int>(g.active.size()); ++a)
        if (g.active[a] >= g.row_lo && g.active[a] <= g.row_hi) ac.push_back(a);

    if (ac.empty()) {  // operator part inert (e.g. Couette): theta = rhs
        out.theta = rhs;
        return out;
    }

    const Eigen::MatrixXcd C = operator_columns(ctx, rung, g);
    const int r = static_cast<int>(ac.size());
    Eigen::MatrixXcd A(r, r);
    Eigen::VectorXcd b(r);
    for (int p = 0; p < r; ++p) {
        const int row = g.active[ac[p]];  // global v index of this unknown
        b[p] = rhs[row];
        for (int qq = 0; qq < r; ++qq) A(p, qq) = C(row - g.row_lo, ac[qq]);
        A(p, p) += 1.0;
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    Eigen::VectorXcd x = lu.solve(b);
    x += lu.solve(b - A * x);  // one refinement step
    const double block_residual = (b - A * x).norm();

    // theta_i = rhs_i - sum_{j in ac} M_ij theta_j on the psi rows.
    Eigen::VectorXcd coupled = Eigen::VectorXcd::Zero(g.rows());
    for (int p = 0; p < r; ++p) coupled += C.col(ac[p]) * x[p];
    out.theta.segment(g.row_lo, g.rows()) = rhs.segment(g.row_lo, g.rows()) - coupled;
    // Re-impose the solved values (identical up to roundoff, keeps A-block exact).
    for (int p = 0; p < r; ++p) out.theta[g.active[ac[p]]] = x[p];
    out.residual = rhs_norm > 0.0 ? block_residual / rhs_norm : block_residual;
    return out;
}

// ---------------------------------------------------------------------------
// Whole-field solves.
// ---------------------------------------------------------------------------

struct SpectralDensityField {
    int k = 1;
    int iota = -1;
    double epsilon = 0.1;
    Grid v, w;
    Eigen::MatrixXcd theta;     // v.n x w.n, column per w node
    Eigen::VectorXd residuals;  // per column

    Complex at(double vx, int col) const {
        return interp_cubic(v, Eigen::VectorXcd(theta.col(col)), vx);
    }
};

inline SpectralDensityField solve_density(const AbsorptionContext& ctx, int rung_index) {
    const Rung& rung = ctx.rungs.at(rung_index);
    SpectralDensityField fld;
    fld.k = ctx.k;
    fld.iota = ctx.iota;
    fld.epsilon = rung.epsilon;
    fld.v = rung.v;
    fld.w = rung.w;
    fld.theta.resize(rung.v.n, rung.w.n);
    fld.residuals.resize(rung.w.n);
#pragma omp parallel for schedule(static)
    for (int c = 0; c < rung.w.n; ++c) {
        const ColumnGeometry g = column_geometry(ctx, rung.v, rung.w.node(c));
        const Eigen::VectorXcd rhs = assemble_rhs(ctx, rung, g);
        const ColumnSolve sol = solve_column(ctx, rung, g, rhs);
        fld.theta.col(c) = sol.theta;
        fld.residuals[c] = sol.residual;
    }
    return fld;
}

/// Boundary response Phi^j: (I + M) phi = forcing, forcing given pointwise by
/// g0 = psi_k(y) sinh(k(1-y))/sinh k (side 0) or g1 = psi_k(y) sinh(ky)/sinh k
/// (side 1), evaluated at y = b^{-1}(v + w).
struct BoundaryResponse {
    int side = 0;
    int k = 1, iota = -1;
    double epsilon = 0.1;
    Grid v, w;
    Eigen::MatrixXcd phi;
    Eigen::MatrixXd forcing;

    Complex at(double vx, int col) const {
        return interp_cubic(v, Eigen::VectorXcd(phi.col(col)), vx);
    }
};

inline Eigen::VectorXd boundary_forcing(const AbsorptionContext& ctx, const ColumnGeometry& g,
                                        int n_v, int side) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n_v);
    for (int r = 0; r < g.rows(); ++r)
        f[g.row_lo + r] = g.psi[r] * (side == 0 ? g.sr1[r] : g.sr0[r]);
    return f;
}

inline BoundaryResponse solve_boundary_response(const AbsorptionContext& ctx, int rung_index,
                                                int side) {
    if (side != 0 && side != 1)
        throw std::invalid_argument("solve_boundary_response: side must be 0 or 1");
    const Rung& rung = ctx.rungs.at(rung_index);
    BoundaryResponse br;
    br.side = side;
    br.k = ctx.k;
    br.iota = ctx.iota;
    br.epsilon = rung.epsilon;
    br.v = rung.v;
    br.w = rung.w;
    br.phi.resize(rung.v.n, rung.w.n);
    br.forcing.resize(rung.v.n, rung.w.n);
#pragma omp parallel for schedule(static)
    for (int c = 0; c < rung.w.n; ++c) {
        const ColumnGeometry g = column_geometry(ctx, rung.v, rung.w.node(c));
        const Eigen::VectorXd f = boundary_forcing(ctx, g, rung.v.n, side);
        const ColumnSolve sol = solve_column(ctx, rung, g, f.cast<Complex>());
        br.phi.col(c) = sol.theta;
        br.forcing.col(c) = f;
    }
    return br;
}

// ---------------------------------------------------------------------------
// Discrete H^1_k Gram and the limiting-absorption floor sigma_min(I + M).
// ---------------------------------------------------------------------------

/// W = k^2 Q + D^T Q D with Q the trapezoid weights and D centered differences
/// (one-sided at the ends). Banded SPD.
inline Eigen::SparseMatrix<double> h1k_gram(const Grid& g, double k) {
    const int n = g.n;
    const Eigen::VectorXd q = g.trapezoid_weights();
    Eigen::SparseMatrix<double> D(n, n);
    std::vector<Eigen::Triplet<double>> t;
    const double h = g.h();
    t.emplace_back(0, 0, -1.0 / h);
    t.emplace_back(0, 1, 1.0 / h);
    for (int i = 1; i + 1 < n; ++i) {
        t.emplace_back(i, i - 1, -0.5 / h);
        t.emplace_back(i, i + 1, 0.5 / h);
    }
    t.emplace_back(n - 1, n - 2, -1.0 / h);
    t.emplace_back(n - 1, n - 1, 1.0 / h);
    D.setFromTriplets(t.begin(), t.end());
    Eigen::SparseMatrix<double> W = (k * k) * Eigen::SparseMatrix<double>(q.asDiagonal());
    W += Eigen::SparseMatrix<double>(D.transpose()) * Eigen::SparseMatrix<double>(q.asDiagonal()) * D;
    return W;
}

/// Cholesky W = L L^T with natural ordering (W is banded), exposing the
/// congruence x -> L^T x and its inverse transpose x -> L^{-1} x.
struct GramFactor {
    Eigen::SparseMatrix<Complex> L, Lt;

    explicit GramFactor(const Eigen::SparseMatrix<double>& W) {
        Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower,
                             Eigen::NaturalOrdering<int>>
            llt(W);
        if (llt.info() != Eigen::Success) throw std::runtime_error("GramFactor: LLT failed");
        L = Eigen::SparseMatrix<double>(llt.matrixL()).cast<Complex>();
        Lt = Eigen::SparseMatrix<double>(llt.matrixU()).cast<Complex>();
    }
    Eigen::MatrixXcd congr(const Eigen::MatrixXcd& X) const { return Lt * X; }
    Eigen::MatrixXcd inv_congr(const Eigen::MatrixXcd& X) const {
        Eigen::MatrixXcd Y = X;
        L.triangularView<Eigen::Lower>().solveInPlace(Y);
        return Y;
    }
};

/// Truncated column-pivoted Gram-Schmidt: C ~ Q G with ||C - Q G|| <= tol * ||C||
/// column-wise; returns the orthonormal basis Q and coefficients G = Q^H C.
inline void truncated_cpqr(const Eigen::MatrixXcd& C, double tol, Eigen::MatrixXcd& Q,
                           Eigen::MatrixXcd& G) {
    const int n = static_cast<int>(C.rows());
    const int m = static_cast<int>(C.cols());
    Eigen::MatrixXcd R = C;
    Eigen::VectorXd norms(m);
    for (int j = 0; j < m; ++j) norms[j] = R.col(j).squaredNorm();
    const double cutoff = tol * tol * norms.maxCoeff();
    Q.resize(n, 0);
    std::vector<Eigen::VectorXcd> basis;
    for (int step = 0; step < m; ++step) {
        int piv = 0;
        double best = 0.0;
        for (int j = 0; j < m; ++j)
            if (norms[j] > best) { best = norms[j]; piv = j; }
        if (best <= cutoff || best <= 0.0) break;
        Eigen::VectorXcd u = R.col(piv);
        for (const auto& b : basis) u -= b * b.dot(u);  // re-orthogonalize
        const double un = u.norm();
        if (un * un <= cutoff) { norms[piv] = 0.0; continue; }
        u /= un;
        basis.push_back(u);
        for (int j = 0; j < m; ++j) {
            if (norms[j] <= 0.0) continue;
            const Complex c = u.dot(R.col(j));
            R.col(j) -= u * c;
            norms[j] = R.col(j).squaredNorm();
        }
    }
    Q.resize(n, static_cast<int>(basis.size()));
    for (int j = 0; j < Q.cols(); ++j) Q.col(j) = basis[j];
    G = Q.adjoint() * C;
}

/// sigma_min of (I + M) in the discrete H^1_k metric, exploiting that M has
/// nonzero columns only on the active set: in the Gram congruence the operator
/// is I + U Z^T with U, Z thin, so all singular values off a small invariant
/// subspace equal 1 and an exact small SVD finishes the job.
inline double lap_sigma_min(const AbsorptionContext& ctx, const Rung& rung, double w,
                            const GramFactor& F) {
    const ColumnGeometry g = column_geometry(ctx, rung.v, w);
    if (g.rows() <= 0 || g.active.empty()) return 1.0;
    const Eigen::MatrixXcd Cwin = operator_columns(ctx, rung, g);
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(rung.v.n, g.active.size());
    C.middleRows(g.row_lo, g.rows()) = Cwin;

    Eigen::MatrixXcd Qc, G;
    truncated_cpqr(C, 1e-13, Qc, G);
    if (Qc.cols() == 0) return 1.0;

    const Eigen::MatrixXcd U = F.congr(Qc);  // L^T Qc
    Eigen::MatrixXcd Rsel = Eigen::MatrixXcd::Zero(rung.v.n, g.active.size());
    for (int a = 0; a < static_cast<int>(g.active.size()); ++a) Rsel(g.active[a], a) = 1.0;
    const Eigen::MatrixXcd V0 = F.inv_congr(Rsel);     // L^{-1} selectors
    const Eigen::MatrixXcd Z = V0 * G.transpose();     // so L^T(I+M)L^{-T} = I + U Z^T

    Eigen::MatrixXcd basis(rung.v.n, U.cols() + Z.cols());
    basis << U, Z.conjugate();
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(basis);
    Eigen::MatrixXcd Qb = Eigen::MatrixXcd::Identity(rung.v.n, basis.cols());
    Qb = qr.householderQ() * Qb;

    const Eigen::MatrixXcd small = Eigen::MatrixXcd::Identity(Qb.cols(), Qb.cols()) +
                                   (Qb.adjoint() * U) * (Z.transpose() * Qb);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(small);
    return std::min(1.0, svd.singularValues().minCoeff());
}

/// Dense oracle for the fast path (small grids only).
inline double lap_sigma_min_dense(const AbsorptionContext& ctx, const Rung& rung, double w) {
    const Eigen::MatrixXcd M = assemble_operator(ctx, rung, w);
    const Eigen::MatrixXd W = Eigen::MatrixXd(h1k_gram(rung.v, ctx.k));
    Eigen::LLT<Eigen::MatrixXd> llt(W);
    const Eigen::MatrixXcd Lt = Eigen::MatrixXd(llt.matrixL()).transpose().cast<Complex>();
    const Eigen::MatrixXcd A =
        Lt * (Eigen::MatrixXcd::Identity(rung.v.n, rung.v.n) + M) *
        Lt.triangularView<Eigen::Upper>().solve(
            Eigen::MatrixXcd::Identity(rung.v.n, rung.v.n));
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A);
    return svd.singularValues().minCoeff();
}

// ---------------------------------------------------------------------------
// Richardson extrapolation along the epsilon ladder (Neville at eps = 0).
// ---------------------------------------------------------------------------

template <typename Arr>
struct Extrapolation {
    Arr limit;
    Arr error;  // |order p - order p-1| elementwise
    bool cauchy = true;
    int order = 0;
};

template <typename Arr>
Extrapolation<Arr> epsilon_extrapolate(const std::vector<double>& eps,
                                       const std::vector<Arr>& values, int order = 2) {
    const int n = static_cast<int>(eps.size());
    if (n < 3 || values.size() != eps.size())
        throw std::invalid_argument("epsilon_extrapolate: need a ladder of >= 3 entries");
    const double ratio = eps[1] / eps[0];
    for (int i = 1; i + 1 < n; ++i)
        if (std::abs(eps[i + 1] / eps[i] - ratio) > 1e-8 * ratio)
            throw std::invalid_argument("epsilon_extrapolate: ladder must be geometric");

    Extrapolation<Arr> out;
    out.order = std::min(order, n - 1);
    out.cauchy = true;
    double prev = -1.0;
    for (int i = 0; i + 1 < n; ++i) {
        const double d = (values[i + 1] - values[i]).matrix().norm();
        if (prev >= 0.0 && d > prev) out.cauchy = false;
        prev = d;
    }
    // Neville tableau evaluated at eps = 0, elementwise over the array.
    std::vector<Arr> T(values.begin(), values.end());
    Arr prev_order = T[n - 1];
    for (int m = 1; m <= out.order; ++m) {
        if (m == out.order) prev_order = T[n - 1];
        for (int i = n - 1; i >= m; --i)
            T[i] = (eps[i] * T[i - 1] - eps[i - m] * T[i]) / (eps[i] - eps[i - m]);
    }
    out.limit = T[n - 1];
    out.error = (T[n - 1] - prev_order)
                    .cwiseAbs()
                    .template cast<typename Arr::Scalar>();
    return out;
}

}  // namespace invdamp::density
