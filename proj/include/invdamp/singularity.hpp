#pragma once

#include "invdamp/density.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace invdamp::singularity {

using Complex = std::complex<double>;
using density::AbsorptionContext;
using density::BoundaryResponse;
using density::SpectralDensityField;

// ---------------------------------------------------------------------------
// Finite differences over the solved field.
// ---------------------------------------------------------------------------

inline Eigen::MatrixXcd d_dv(const SpectralDensityField& f) {
    Eigen::MatrixXcd out(f.theta.rows(), f.theta.cols());
    for (int c = 0; c < f.theta.cols(); ++c) {
        std::vector<Complex> col(f.theta.col(c).data(), f.theta.col(c).data() + f.theta.rows());
        const auto d = finite_difference(col, f.v.h());
        out.col(c) = Eigen::Map<const Eigen::VectorXcd>(d.data(), d.size());
    }
    return out;
}

inline Eigen::MatrixXcd d_dw(const SpectralDensityField& f) {
    Eigen::MatrixXcd out(f.theta.rows(), f.theta.cols());
    const double h = f.w.h();
    const int nc = static_cast<int>(f.theta.cols());
    out.col(0) = (f.theta.col(1) - f.theta.col(0)) / h;
    for (int c = 1; c + 1 < nc; ++c)
        out.col(c) = (f.theta.col(c + 1) - f.theta.col(c - 1)) / (2.0 * h);
    out.col(nc - 1) = (f.theta.col(nc - 1) - f.theta.col(nc - 2)) / h;
    return out;
}

// ---------------------------------------------------------------------------
// Analytic major-term coefficients.
//
// The log(v + i iota eps) coefficient of d_v Theta and the log(b(j) - w + i
// iota eps) coefficients of d_w Theta come out of the local collision of the
// kernel kinks with the resolvent pole; with the kernel normalized so that
// psi = -int G omega at t = 0, the coefficients are
//   A  = psi_k(y) [ (b''/b'^2) Theta - f0/b'^2 ],           y = b^{-1}(v+w),
//   Dj = -Phi^j(v,w) [ omega0(j) - b''(j) Theta(b(j)-w, w) ] / b'(j)^2,
// the Dj bracket frozen at the boundary where the w-log actually collides
// with the pole (the difference is subleading in w - b(j)).
// ---------------------------------------------------------------------------

struct CoefficientField {
    Grid v, w;
    Eigen::MatrixXcd val;
};

inline CoefficientField analytic_log_coefficient_v(const SpectralDensityField& f,
                                                   const AbsorptionContext& ctx) {
    CoefficientField A{f.v, f.w, Eigen::MatrixXcd::Zero(f.v.n, f.w.n)};
    for (int c = 0; c < f.w.n; ++c) {
        const double w = f.w.node(c);
        for (int i = 0; i < f.v.n; ++i) {
            const double x = f.v.node(i) + w;
            if (!ctx.flw.in_range(x)) continue;
            const double y = ctx.flw.inverse_b(x);
            const double psi = ctx.cut.psi(y);
            if (psi == 0.0) continue;
            const double bp = ctx.flw.db(y);
            A.val(i, c) = psi *
                          (ctx.flw.d2b(y) * f.theta(i, c) - ctx.mode.omega0(y)) / (bp * bp);
        }
    }
    return A;
}

inline CoefficientField analytic_boundary_coefficient_w(const SpectralDensityField& f,
                                                        const BoundaryResponse& phi,
                                                        const AbsorptionContext& ctx, int side) {
    if (side != 0 && side != 1)
        throw std::invalid_argument("analytic_boundary_coefficient_w: side must be 0 or 1");
    if (phi.side != side)
        throw std::invalid_argument("analytic_boundary_coefficient_w: response/side mismatch");
    const double yb = static_cast<double>(side);
    const double bj = ctx.flw.b(yb);
    const double bpj = ctx.flw.db(yb);
    const double d2bj = ctx.flw.d2b(yb);
    const double om_j = ctx.mode.omega0(yb);
    CoefficientField D{f.v, f.w, Eigen::MatrixXcd::Zero(f.v.n, f.w.n)};
    for (int c = 0; c < f.w.n; ++c) {
        const double vq = bj - f.w.node(c);
        if (!f.v.contains(vq))
            throw std::out_of_range("analytic_boundary_coefficient_w: b(j)-w outside v grid");
        const Complex theta_b = f.at(vq, c);
        const Complex bracket = om_j - d2bj * theta_b;
        D.val.col(c) = -phi.phi.col(c) * (bracket / (bpj * bpj));
    }
    return D;
}

// ---------------------------------------------------------------------------
// Empirical extraction: least-squares fit of c1 log(x + i iota eps) + c0 + c2 x
// on the annulus |x| in [2 eps, 10 eps].
// ---------------------------------------------------------------------------

struct LogFit {
    Complex c1{0, 0}, c0{0, 0}, c2{0, 0};
    double residual = 0.0;  // relative to the sample norm
    double cond = 0.0;
    int n_used = 0;
    bool ill_conditioned = false;
};

inline LogFit fit_log_coefficient(const Eigen::VectorXd& x, const Eigen::VectorXcd& h,
                                  double epsilon, int iota, double win_lo = 2.0,
                                  double win_hi = 10.0) {
    std::vector<int> idx;
    for (int i = 0; i < x.size(); ++i) {
        const double a = std::abs(x[i]);
        if (a >= win_lo * epsilon && a <= win_hi * epsilon) idx.push_back(i);
    }
    if (idx.size() < 12)
        throw std::invalid_argument("fit_log_coefficient: window must contain >= 12 nodes");
    const int n = static_cast<int>(idx.size());
    Eigen::MatrixXcd X(n, 3);
    Eigen::VectorXcd y(n);
    for (int r = 0; r < n; ++r) {
        const double xv = x[idx[r]];
        X(r, 0) = std::log(Complex(xv, iota * epsilon));
        X(r, 1) = 1.0;
        X(r, 2) = xv;
        y[r] = h[idx[r]];
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    LogFit fit;
    fit.cond = svd.singularValues()(0) / svd.singularValues()(2);
    fit.ill_conditioned = !(fit.cond < 1e8);
    const Eigen::VectorXcd c = svd.solve(y);
    fit.c1 = c[0];
    fit.c0 = c[1];
    fit.c2 = c[2];
    const double yn = y.norm();
    fit.residual = yn > 0.0 ? (X * c - y).norm() / yn : (X * c - y).norm();
    fit.n_used = n;
    return fit;
}

/// Fit the v-log coefficient of d_v Theta in one w column.
inline LogFit fit_A_column(const SpectralDensityField& f, const Eigen::MatrixXcd& dv_theta,
                           int col) {
    Eigen::VectorXd x(f.v.n);
    for (int i = 0; i < f.v.n; ++i) x[i] = f.v.node(i);
    return fit_log_coefficient(x, dv_theta.col(col), f.epsilon, f.iota);
}

/// Fit the w-log coefficient of d_w Theta along w at fixed v row; the model
/// argument is x = b(j) - w so the shared fitter applies unchanged.
inline LogFit fit_D_row(const SpectralDensityField& f, const Eigen::MatrixXcd& dw_theta, int row,
                        double b_j) {
    Eigen::VectorXd x(f.w.n);
    Eigen::VectorXcd h(f.w.n);
    for (int c = 0; c < f.w.n; ++c) {
        x[c] = b_j - f.w.node(c);
        h[c] = dw_theta(row, c);
    }
    return fit_log_coefficient(x, h, f.epsilon, f.iota);
}

// ---------------------------------------------------------------------------
// Remainder regularity and boundary-vanishing diagnostics.
// ---------------------------------------------------------------------------

/// Discrete W^{1,1} norm over a sub-window of the grid: l1 of the samples plus
/// l1 of their centered differences, both trapezoid-weighted.
inline double w11_norm(const Grid& g, const Eigen::VectorXcd& f, double lo, double hi) {
    std::vector<Complex> vals(f.data(), f.data() + f.size());
    const auto d = finite_difference(vals, g.h());
    double s = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const double x = g.node(i);
        if (x < lo || x > hi) continue;
        const double q = (i == 0 || i == g.n - 1) ? 0.5 * g.h() : g.h();
        s += q * (std::abs(f[i]) + std::abs(d[i]));
    }
    return s;
}

struct VanishingReport {
    double max_a = 0.0;  // scenario with the boundary value
    double max_b = 0.0;  // scenario without
    double ratio = 0.0;  // max_a / max(max_b, floor)
};

inline VanishingReport vanishing_report(const CoefficientField& Da, const CoefficientField& Db,
                                        double floor = 1e-14) {
    VanishingReport r;
    r.max_a = Da.val.cwiseAbs().maxCoeff();
    r.max_b = Db.val.cwiseAbs().maxCoeff();
    r.ratio = r.max_a / std::max(r.max_b, floor);
    return r;
}

}  // namespace invdamp::singularity
