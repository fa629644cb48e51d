#pragma once

#include "invdamp/flow.hpp"
#include "invdamp/green.hpp"
#include "invdamp/grid.hpp"
#include "invdamp/vorticity.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace invdamp::oracle {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Elliptic solve: (d^2_y - k^2) psi = omega, psi(0) = psi(1) = 0, second-order
// finite differences, Thomas algorithm.
// ---------------------------------------------------------------------------

inline Eigen::VectorXcd elliptic_solve(const Eigen::VectorXcd& omega, int k, const Grid& y) {
    const int n = y.n;
    if (omega.size() != n) throw std::invalid_argument("elliptic_solve: size mismatch");
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(n);
    if (n < 3) return psi;
    const double h = y.h();
    const double diag = -2.0 / (h * h) - static_cast<double>(k) * k;
    const double off = 1.0 / (h * h);
    const int m = n - 2;  // interior unknowns
    std::vector<double> c(m);   // superdiagonal after elimination
    std::vector<Complex> d(m);  // rhs after elimination
    c[0] = off / diag;
    d[0] = omega[1] / diag;
    for (int i = 1; i < m; ++i) {
        const double denom = diag - off * c[i - 1];
        c[i] = off / denom;
        d[i] = (omega[i + 1] - off * d[i - 1]) / denom;
    }
    psi[m] = d[m - 1];
    for (int i = m - 2; i >= 0; --i) psi[i + 1] = d[i] - c[i] * psi[i + 2];
    return psi;
}

/// Max-norm residual of the discrete elliptic equation on interior nodes.
inline double elliptic_residual(const Eigen::VectorXcd& psi, const Eigen::VectorXcd& omega,
                                int k, const Grid& y) {
    const double h = y.h();
    double r = std::max(std::abs(psi[0]), std::abs(psi[y.n - 1]));
    for (int i = 1; i + 1 < y.n; ++i) {
        const Complex lap = (psi[i - 1] - 2.0 * psi[i] + psi[i + 1]) / (h * h);
        r = std::max(r, std::abs(lap - static_cast<double>(k) * k * psi[i] - omega[i]));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Direct time integration of d_t omega = -i k b omega + i k b'' psi.
// ---------------------------------------------------------------------------

struct EvolutionState {
    double t = 0.0;
    Eigen::VectorXcd omega;
    Eigen::VectorXcd psi;
};

inline std::vector<EvolutionState> evolve_vorticity(const flow::VorticityMode& mode,
                                                    const flow::ShearFlow& flw, int k,
                                                    const Grid& y, double t_end, double dt,
                                                    int n_samples) {
    if (n_samples < 1) throw std::invalid_argument("evolve_vorticity: n_samples >= 1");
    double bmax = 0.0;
    for (int i = 0; i < y.n; ++i) bmax = std::max(bmax, std::abs(flw.b(y.node(i))));
    if (dt > 0.1 / (k * bmax) * (1.0 + 1e-12))
        throw std::invalid_argument("evolve_vorticity: dt too large for the fastest phase");

    Eigen::VectorXcd omega(y.n);
    Eigen::VectorXd b(y.n), d2b(y.n);
    for (int i = 0; i < y.n; ++i) {
        omega[i] = mode.omega0(y.node(i));
        b[i] = flw.b(y.node(i));
        d2b[i] = flw.d2b(y.node(i));
    }
    const double norm0 = omega.norm();

    auto rhs = [&](const Eigen::VectorXcd& om) {
        const Eigen::VectorXcd psi = elliptic_solve(om, k, y);
        Eigen::VectorXcd r(y.n);
        for (int i = 0; i < y.n; ++i)
            r[i] = Complex(0.0, k) * (d2b[i] * psi[i] - b[i] * om[i]);
        return r;
    };

    std::vector<EvolutionState> series;
    series.push_back({0.0, omega, elliptic_solve(omega, k, y)});
    double t = 0.0;
    for (int s = 1; s <= n_samples; ++s) {
        const double target = t_end * s / n_samples;
        const int steps = std::max(1, static_cast<int>(std::ceil((target - t) / dt - 1e-12)));
        const double h = (target - t) / steps;
        for (int m = 0; m < steps; ++m) {
            const Eigen::VectorXcd k1 = rhs(omega);
            const Eigen::VectorXcd k2 = rhs(omega + 0.5 * h * k1);
            const Eigen::VectorXcd k3 = rhs(omega + 0.5 * h * k2);
            const Eigen::VectorXcd k4 = rhs(omega + h * k3);
            omega += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        t = target;
        if (norm0 > 0.0 && omega.norm() > 10.0 * norm0)
            throw std::runtime_error(
                "evolve_vorticity: norm grew past 10x initial - spectral instability or bug");
        series.push_back({t, omega, elliptic_solve(omega, k, y)});
    }
    return series;
}

/// Exact Couette solution omega(t, y) = e^{-i k y t} omega0(y).
inline EvolutionState couette_reference(const flow::VorticityMode& mode,
                                        const flow::ShearFlow& flw, int k, const Grid& y,
                                        double t) {
    if (flw.family != flow::Family::couette)
        throw std::invalid_argument("couette_reference: flow is not Couette");
    EvolutionState st;
    st.t = t;
    st.omega.resize(y.n);
    for (int i = 0; i < y.n; ++i)
        st.omega[i] = std::exp(Complex(0.0, -k * y.node(i) * t)) * mode.omega0(y.node(i));
    st.psi = elliptic_solve(st.omega, k, y);
    return st;
}

// ---------------------------------------------------------------------------
// Embedded-eigenvalue scan of L_k g = b g + b'' int G_k(., z) g(z) dz.
//
// Discretized-continuum eigenvalues cluster on {b(y_i)} with eigenvectors
// concentrated at the critical layer; a genuine embedded eigenvalue would show
// a smooth eigenvector and persist across unrelated grids. The two scan grids
// share interior nodes only if their interval counts share factors, so they
// are chosen coprime by default.
// ---------------------------------------------------------------------------

struct SpectrumReport {
    int n_coarse = 0, n_fine = 0;
    double band_lo = 0.0, band_hi = 1.0;
    std::vector<Complex> eigenvalues;  // fine grid
    std::vector<Complex> flagged;      // persistent smooth in-band candidates
    bool clean() const { return flagged.empty(); }
};

namespace detail {

struct GridEigen {
    Grid y{0.0, 1.0, 2};
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;
};

inline GridEigen lk_eigens(const flow::ShearFlow& flw, int k, int n) {
    GridEigen ge;
    ge.y = Grid(0.0, 1.0, n);
    Eigen::MatrixXd L(n, n);
    const Eigen::VectorXd q = ge.y.trapezoid_weights();
    for (int i = 0; i < n; ++i) {
        const double yi = ge.y.node(i);
        const double d2 = flw.d2b(yi);
        for (int j = 0; j < n; ++j)
            L(i, j) = d2 * green::channel_kernel(k, yi, ge.y.node(j)) * q[j];
        L(i, i) += flw.b(yi);
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(L);
    ge.values = es.eigenvalues();
    ge.vectors = es.eigenvectors();
    return ge;
}

/// Discrete H^1-to-L^2 roughness; concentrated critical-layer vectors scale
/// like 1/h, smooth candidates stay O(1).
inline double roughness(const Eigen::VectorXcd& g, const Grid& y) {
    std::vector<Complex> v(g.data(), g.data() + g.size());
    const auto d = finite_difference(v, y.h());
    return l2_norm(d, y.h()) / std::max(l2_norm(v, y.h()), 1e-300);
}

}  // namespace detail

inline SpectrumReport embedded_eigenvalue_scan(const flow::ShearFlow& flw, int k,
                                               int n_coarse = 201, int n_fine = 258,
                                               double imag_tol = 1e-6,
                                               double smooth_cap = 50.0,
                                               double persist_tol = 3e-6) {
    SpectrumReport rep;
    rep.n_coarse = n_coarse;
    rep.n_fine = n_fine;
    rep.band_lo = flw.b(0.0);
    rep.band_hi = flw.b(1.0);
    const auto coarse = detail::lk_eigens(flw, k, n_coarse);
    const auto fine = detail::lk_eigens(flw, k, n_fine);
    rep.eigenvalues.assign(fine.values.data(), fine.values.data() + fine.values.size());

    for (int i = 0; i < fine.values.size(); ++i) {
        const Complex lam = fine.values[i];
        if (lam.real() <= rep.band_lo || lam.real() >= rep.band_hi) continue;
        if (std::abs(lam.imag()) > imag_tol) continue;
        if (detail::roughness(fine.vectors.col(i), fine.y) > smooth_cap) continue;
        bool persists = false;
        for (int j = 0; j < coarse.values.size(); ++j) {
            if (std::abs(coarse.values[j] - lam) > persist_tol) continue;
            if (detail::roughness(coarse.vectors.col(j), coarse.y) <= smooth_cap) {
                persists = true;
                break;
            }
        }
        if (persists) rep.flagged.push_back(lam);
    }
    return rep;
}

}  // namespace invdamp::oracle
