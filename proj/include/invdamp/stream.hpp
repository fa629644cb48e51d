#pragma once

#include "invdamp/cutoffs.hpp"
#include "invdamp/density.hpp"
#include "invdamp/flow.hpp"
#include "invdamp/grid.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace invdamp::stream {

using Complex = std::complex<double>;
using density::SpectralDensityField;

enum class Quadrature { filon, plain };

// ---------------------------------------------------------------------------
// Filon-trapezoid moments: integral over one cell of e^{-i theta s} times the
// linear hat weights, exact for piecewise-linear data at any oscillation rate.
//   m1 = (E(1+i theta) - 1)/theta^2,  m0 = (1-E)/(i theta) - m1,  E = e^{-i theta}.
// ---------------------------------------------------------------------------

inline void filon_moments(double theta, Complex& m0, Complex& m1) {
    if (std::abs(theta) < 1e-4) {
        const Complex it(0.0, theta);
        m0 = 0.5 - it / 6.0 - theta * theta / 24.0 + it * theta * theta / 120.0;
        m1 = 0.5 - it / 3.0 - theta * theta / 8.0 + it * theta * theta / 30.0;
        return;
    }
    const Complex E = std::exp(Complex(0.0, -theta));
    const Complex i_theta(0.0, theta);
    m1 = (E * (1.0 + i_theta) - 1.0) / (theta * theta);
    m0 = (1.0 - E) / i_theta - m1;
}

/// integral of e^{-i k t w} g(w) dw for samples g on a uniform grid.
inline Complex oscillatory_integral(const Grid& wg, const Eigen::VectorXcd& g, double k, double t,
                                    Quadrature mode) {
    const double h = wg.h();
    if (mode == Quadrature::plain) {
        Complex s = 0.0;
        for (int j = 0; j < wg.n; ++j) {
            const double q = (j == 0 || j == wg.n - 1) ? 0.5 * h : h;
            s += q * std::exp(Complex(0.0, -k * t * wg.node(j))) * g[j];
        }
        return s;
    }
    Complex m0, m1;
    filon_moments(k * t * h, m0, m1);
    Complex s = 0.0;
    for (int j = 0; j + 1 < wg.n; ++j)
        s += std::exp(Complex(0.0, -k * t * wg.node(j))) * (g[j] * m0 + g[j + 1] * m1);
    return s * h;
}

inline void check_oscillation_resolved(const Grid& wg, double k, double t, Quadrature mode) {
    if (mode == Quadrature::filon || t <= 0.0) return;
    const double required = M_PI / (8.0 * k * t);
    if (wg.h() > required) {
        std::ostringstream msg;
        msg << "oscillatory quadrature under-resolved: dw = " << wg.h() << " but t = " << t
            << " requires dw <= " << required << " (or the filon mode)";
        throw std::runtime_error(msg.str());
    }
}

// ---------------------------------------------------------------------------
// Stream-function reconstruction.
// ---------------------------------------------------------------------------

struct StreamSnapshot {
    double t = 0.0;
    int k = 1;
    Grid y;
    Eigen::VectorXcd psi;
    std::array<Eigen::VectorXcd, 3> parts;  // Upsilon_1/2/3 components
    double epsilon_error = 0.0;
};

/// psi_k(t, y) = -(1/2 pi i) lim int e^{-i k w t} [Theta^- - Theta^+](b(y)-w, w) dw,
/// computed per rung and Richardson-extrapolated along the shared ladder.
inline StreamSnapshot stream_from_density(const std::vector<SpectralDensityField>& minus,
                                          const std::vector<SpectralDensityField>& plus,
                                          double t, const flow::ShearFlow& flw,
                                          const flow::CutoffSet& cut, const Grid& ygrid,
                                          Quadrature mode = Quadrature::filon) {
    if (minus.size() != plus.size() || minus.size() < 3)
        throw std::invalid_argument("stream_from_density: need matched ladders of >= 3 rungs");
    const int k = minus.front().k;
    const int rungs = static_cast<int>(minus.size());
    const Complex pref = -1.0 / (2.0 * M_PI * Complex(0.0, 1.0));

    std::vector<double> eps;
    std::vector<Eigen::MatrixXcd> per_rung;  // ygrid.n x 4: total + three parts
    for (int r = 0; r < rungs; ++r) {
        const auto& fm = minus[r];
        const auto& fp = plus[r];
        if (fm.iota != -1 || fp.iota != 1)
            throw std::invalid_argument("stream_from_density: ladder iota mismatch");
        check_oscillation_resolved(fm.w, k, t, mode);
        eps.push_back(fm.epsilon);
        Eigen::MatrixXcd out(ygrid.n, 4);
#pragma omp parallel for schedule(static)
        for (int i = 0; i < ygrid.n; ++i) {
            const double v = flw.b(ygrid.node(i));
            Eigen::VectorXcd g(fm.w.n), g1(fm.w.n), g2(fm.w.n), g3(fm.w.n);
            for (int j = 0; j < fm.w.n; ++j) {
                const double w = fm.w.node(j);
                const Complex d = fm.at(v - w, j) - fp.at(v - w, j);
                g[j] = d;
                g1[j] = d * cut.upsilon1(w);
                g3[j] = d * cut.upsilon3(w);
                g2[j] = d - g1[j] - g3[j];
            }
            out(i, 0) = pref * oscillatory_integral(fm.w, g, k, t, mode);
            out(i, 1) = pref * oscillatory_integral(fm.w, g1, k, t, mode);
            out(i, 2) = pref * oscillatory_integral(fm.w, g2, k, t, mode);
            out(i, 3) = pref * oscillatory_integral(fm.w, g3, k, t, mode);
        }
        per_rung.push_back(std::move(out));
    }

    const auto ext = density::epsilon_extrapolate(eps, per_rung);
    StreamSnapshot snap;
    snap.t = t;
    snap.k = k;
    snap.y = ygrid;
    snap.psi = ext.limit.col(0);
    for (int p = 0; p < 3; ++p) snap.parts[p] = ext.limit.col(p + 1);
    snap.epsilon_error = ext.error.col(0).cwiseAbs().maxCoeff();
    return snap;
}

// ---------------------------------------------------------------------------
// Demodulated kernel integrals: the alpha/beta coefficient functions of the
// oscillatory pole integrals, with the predicted carrier removed.
// ---------------------------------------------------------------------------

enum class Pole { moving, boundary0 };

struct Demodulated {
    Grid v;
    Eigen::VectorXcd coeff;
    double l2 = 0.0;
};

/// coeff(v) = carrier^{-1} * int e^{-ikwt} h(v-w, w) log^{p'}(pole + i iota eps)
///            / (pole + i iota eps) dw, carrier = e^{-ikvt} (moving) or
///            e^{-ik b(0) t} (boundary0). Pass iota = -1 for the branch whose
///            pole sits in the closing half-plane for t > 0.
inline Demodulated demodulate_kernel_integral(
    const std::function<Complex(double, double)>& h, int p_prime, int k, double t, double epsilon,
    int iota, Pole pole, const Grid& vgrid, const Grid& wgrid, double b0 = 0.0,
    Quadrature mode = Quadrature::filon) {
    if (p_prime < 0 || p_prime > 3)
        throw std::invalid_argument("demodulate_kernel_integral: p' must be in {0,1,2,3}");
    check_oscillation_resolved(wgrid, k, t, mode);
    Demodulated out;
    out.v = vgrid;
    out.coeff.resize(vgrid.n);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < vgrid.n; ++i) {
        const double v = vgrid.node(i);
        Eigen::VectorXcd g(wgrid.n);
        for (int j = 0; j < wgrid.n; ++j) {
            const double w = wgrid.node(j);
            const double p = (pole == Pole::moving) ? v - w : b0 - w;
            const Complex z(p, iota * epsilon);
            Complex f = h(v - w, w) / z;
            const Complex lz = std::log(z);
            for (int q = 0; q < p_prime; ++q) f *= lz;
            g[j] = f;
        }
        const Complex carrier =
            std::exp(Complex(0.0, -k * t * (pole == Pole::moving ? v : b0)));
        out.coeff[i] = oscillatory_integral(wgrid, g, k, t, mode) / carrier;
    }
    std::vector<Complex> c(out.coeff.data(), out.coeff.data() + out.coeff.size());
    out.l2 = l2_norm(c, vgrid.h());
    return out;
}

/// Exponent q of a growth law ||coeff||(t) ~ C (1 + log<kt>)^q, by least
/// squares in the doubly-logged coordinates; compare with p'.
inline double log_growth_exponent(const std::vector<double>& ts, const std::vector<double>& norms,
                                  int k) {
    if (ts.size() != norms.size() || ts.size() < 3)
        throw std::invalid_argument("log_growth_exponent: need >= 3 samples");
    const int n = static_cast<int>(ts.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double kt = k * ts[i];
        const double x = std::log(1.0 + std::log(std::sqrt(1.0 + kt * kt)));
        const double y = std::log(norms[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------
// Velocities.
// ---------------------------------------------------------------------------

struct VelocitySnapshot {
    Eigen::VectorXcd ux;  // -d_y psi
    Eigen::VectorXcd uy;  // i k psi
};

inline VelocitySnapshot velocity_fields(const StreamSnapshot& snap) {
    VelocitySnapshot vel;
    vel.uy = Complex(0.0, snap.k) * snap.psi;
    std::vector<Complex> p(snap.psi.data(), snap.psi.data() + snap.psi.size());
    const auto d = finite_difference(p, snap.y.h());
    vel.ux.resize(snap.y.n);
    for (int i = 0; i < snap.y.n; ++i) vel.ux[i] = -d[i];
    return vel;
}

}  // namespace invdamp::stream
