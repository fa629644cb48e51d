#pragma once

#include "invdamp/cutoffs.hpp"
#include "invdamp/flow.hpp"
#include "invdamp/grid.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

namespace invdamp::analysis {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Weighted Sobolev norms ||h||_{H^n_k} = sum_a |k|^{n-a} ||D^a h||_{L^2}.
// ---------------------------------------------------------------------------

struct NormReport {
    int n = 0, k = 1;
    double value = 0.0;
    std::vector<double> contributions;  // |k|^{n-a} ||D^a h|| per order a
    bool noise_flag = false;            // highest derivatives look noise-dominated
};

inline NormReport weighted_norm(const Eigen::VectorXcd& h, int n, int k, const Grid& g) {
    if (h.size() != g.n) throw std::invalid_argument("weighted_norm: size mismatch");
    if (n < 0) throw std::invalid_argument("weighted_norm: n >= 0");
    NormReport rep;
    rep.n = n;
    rep.k = k;
    std::vector<Complex> d(h.data(), h.data() + h.size());
    double prev = l2_norm(d, g.h());
    for (int a = 0; a <= n; ++a) {
        const double norm_a = a == 0 ? prev : l2_norm(d, g.h());
        rep.contributions.push_back(std::pow(std::abs(k), n - a) * norm_a);
        rep.value += rep.contributions.back();
        if (a > 0 && norm_a >= 0.5 * prev / g.h()) rep.noise_flag = true;
        if (a < n) {
            prev = norm_a;
            d = finite_difference(d, g.h());
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Fractional H^r on the periodified extension via transform multipliers <xi>^r.
// ---------------------------------------------------------------------------

namespace detail {

inline int next_pow2(int n) {
    int p = 1;
    while (p < n) p *= 2;
    return p;
}

/// Discrete Fourier magnitudes |h_hat(xi_j)| with signed frequencies, using
/// the integral convention h_hat(xi) = int e^{-i x xi} h(x) dx.
inline void dft_magnitudes(const Eigen::VectorXcd& h, double step, int pad,
                           std::vector<double>& xi, std::vector<double>& mag) {
    const int n = detail::next_pow2(static_cast<int>(h.size()) * pad);
    std::vector<Complex> in(n, Complex(0.0, 0.0));
    for (int i = 0; i < h.size(); ++i) in[i] = h[i];
    std::vector<Complex> out(n);
    Eigen::FFT<double> fft;
    fft.fwd(out, in);
    const double L = n * step;
    xi.resize(n);
    mag.resize(n);
    for (int j = 0; j < n; ++j) {
        const int js = j <= n / 2 ? j : j - n;
        xi[j] = 2.0 * M_PI * js / L;
        mag[j] = step * std::abs(out[j]);
    }
}

}  // namespace detail

/// ||h||_{H^r} by the transform, r in {0, 1/2, 1}; h compactly supported in g.
inline double fractional_norm(const Eigen::VectorXcd& h, double r, const Grid& g, int pad = 4) {
    std::vector<double> xi, mag;
    detail::dft_magnitudes(h, g.h(), pad, xi, mag);
    double s = 0.0;
    const double L = mag.size() * g.h();
    for (size_t j = 0; j < mag.size(); ++j) {
        const double bracket = std::sqrt(1.0 + xi[j] * xi[j]);
        s += std::pow(bracket, 2.0 * r) * mag[j] * mag[j];
    }
    return std::sqrt(s / L);
}

/// ratio ||h||_{H^r} / (|k|^{r-1} ||h||_{H^1_k}); bounded uniformly in k.
inline double interpolation_constant(const Eigen::VectorXcd& h, double r, int k, const Grid& g) {
    if (r < 0.0 || r > 1.0) throw std::invalid_argument("interpolation_constant: r in [0,1]");
    const double hr = fractional_norm(h, r, g);
    const NormReport h1k = weighted_norm(h, 1, k, g);
    return hr / (std::pow(std::abs(k), r - 1.0) * h1k.value);
}

// ---------------------------------------------------------------------------
// Late-time carrier fits for the interior and boundary asymptotic shapes.
// ---------------------------------------------------------------------------

struct ProfileDecomposition {
    double t_mid = 0.0;
    std::vector<int> y_index;  // indices into the snapshot y grid
    Eigen::VectorXcd alpha_in, beta_in, gamma_in;      // interior profiles
    Eigen::VectorXcd alpha1, beta1, alpha2, beta2;     // boundary expansion
    Eigen::VectorXd residual, residual_single, condition;
    Eigen::VectorXd residual_N;  // boundary-fit remainder per y
};

namespace detail {

struct CarrierFit {
    Eigen::VectorXcd amps;
    double residual = 0.0;
    double cond = 0.0;
};

inline CarrierFit solve_carrier_ls(const Eigen::MatrixXcd& X, const Eigen::VectorXcd& z) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    CarrierFit fit;
    fit.amps = svd.solve(z);
    const double zn = z.norm();
    fit.residual = zn > 0.0 ? (X * fit.amps - z).norm() / zn : 0.0;
    fit.cond = svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
    return fit;
}

}  // namespace detail

/// Three-carrier least squares on supp chi_in: the rescaled target
/// psi(t, y) k^2 t^2 against e^{-ikb(y)t}, e^{-ikb(0)t}, e^{-ikb(1)t} with
/// constant amplitudes per window (the rescaling is what makes the
/// slowly-varying-amplitude assumption hold over a decade-long window).
inline ProfileDecomposition extract_interior_profiles(const std::vector<double>& times,
                                                      const Eigen::MatrixXcd& psi, const Grid& y,
                                                      int k, const flow::ShearFlow& flw,
                                                      double cond_cap = 1e6) {
    const int M = static_cast<int>(times.size());
    if (M < 9) throw std::invalid_argument("extract_interior_profiles: need >= 9 times");
    if (psi.cols() != M || psi.rows() != y.n)
        throw std::invalid_argument("extract_interior_profiles: shape mismatch");
    const double b0 = flw.b(0.0), b1 = flw.b(1.0);
    const double span = times.back() - times.front();

    std::vector<int> idx;
    double min_gap = 1e300;
    for (int i = 0; i < y.n; ++i) {
        const double yv = y.node(i);
        if (flow::CutoffSet::chi_in(yv) <= 0.0) continue;
        idx.push_back(i);
        const double b = flw.b(yv);
        min_gap = std::min({min_gap, std::abs(b - b0), std::abs(b - b1)});
    }
    min_gap = std::min(min_gap, std::abs(b1 - b0));
    if (idx.empty()) throw std::invalid_argument("extract_interior_profiles: empty chi_in");
    if (k * span * min_gap < 2.0 * M_PI / 3.0)
        throw std::invalid_argument("extract_interior_profiles: window too short for the phase gaps");

    ProfileDecomposition out;
    out.y_index = idx;
    out.t_mid = 0.5 * (times.front() + times.back());
    const int ny = static_cast<int>(idx.size());
    out.alpha_in.resize(ny);
    out.beta_in.resize(ny);
    out.gamma_in.resize(ny);
    out.residual.resize(ny);
    out.residual_single.resize(ny);
    out.condition.resize(ny);

    for (int p = 0; p < ny; ++p) {
        const double by = flw.b(y.node(idx[p]));
        Eigen::MatrixXcd X(M, 3);
        Eigen::VectorXcd z(M);
        for (int m = 0; m < M; ++m) {
            X(m, 0) = std::exp(Complex(0.0, -k * by * times[m]));
            X(m, 1) = std::exp(Complex(0.0, -k * b0 * times[m]));
            X(m, 2) = std::exp(Complex(0.0, -k * b1 * times[m]));
            z[m] = psi(idx[p], m) * (k * k * times[m] * times[m]);
        }
        const auto fit = detail::solve_carrier_ls(X, z);
        const auto single = detail::solve_carrier_ls(X.col(0), z);
        out.alpha_in[p] = fit.amps[0];
        out.beta_in[p] = fit.amps[1];
        out.gamma_in[p] = fit.amps[2];
        out.residual[p] = fit.residual;
        out.residual_single[p] = single.residual;
        out.condition[p] = fit.cond;
        if (fit.cond > cond_cap) {
            out.alpha_in[p] = out.beta_in[p] = out.gamma_in[p] =
                Complex(std::nan(""), std::nan(""));
        }
    }
    return out;
}

/// Two-carrier boundary fit on supp chi_b0 with per-carrier polynomial in
/// 1/(kt) up to order N-2, on the rescaled target psi k^2 t^2.
inline ProfileDecomposition boundary_expansion_fit(const std::vector<double>& times,
                                                   const Eigen::MatrixXcd& psi, const Grid& y,
                                                   int k, const flow::ShearFlow& flw, int N = 4,
                                                   double cond_cap = 1e8) {
    const int M = static_cast<int>(times.size());
    if (M < 9) throw std::invalid_argument("boundary_expansion_fit: need >= 9 times");
    if (times.front() <= 0.0 || times.back() < 10.0 * times.front() * (1.0 - 1e-12))
        throw std::invalid_argument("boundary_expansion_fit: t range must span a decade");
    if (N < 3) throw std::invalid_argument("boundary_expansion_fit: N >= 3");
    const int orders = N - 2;
    const double b0 = flw.b(0.0);

    std::vector<int> idx;
    for (int i = 0; i < y.n; ++i)
        if (flow::CutoffSet::chi_b0(y.node(i)) > 0.0 && y.contains(y.node(i))) idx.push_back(i);
    if (idx.empty()) throw std::invalid_argument("boundary_expansion_fit: empty chi_b0");

    ProfileDecomposition out;
    out.y_index = idx;
    out.t_mid = std::sqrt(times.front() * times.back());
    const int ny = static_cast<int>(idx.size());
    out.alpha1.resize(ny);
    out.beta1.resize(ny);
    out.alpha2 = Eigen::VectorXcd::Zero(ny);
    out.beta2 = Eigen::VectorXcd::Zero(ny);
    out.residual_N.resize(ny);
    out.condition.resize(ny);

    const double span = times.back() - times.front();
    for (int p = 0; p < ny; ++p) {
        const double by = flw.b(y.node(idx[p]));
        // The two carriers separate only through the relative phase
        // k (b(y) - b(0)) t; rows whose phase spread over the window stays
        // under 2pi/3 are numerically collinear at any conditioning cap, so
        // refuse them outright instead of returning garbage amplitudes.
        if (k * std::abs(by - b0) * span < 2.0 * M_PI / 3.0) {
            out.alpha1[p] = out.beta1[p] = Complex(std::nan(""), std::nan(""));
            out.residual_N[p] = std::nan("");
            out.condition[p] = std::numeric_limits<double>::infinity();
            continue;
        }
        Eigen::MatrixXcd X(M, 2 * orders);
        Eigen::VectorXcd z(M);
        for (int m = 0; m < M; ++m) {
            const double t = times[m];
            const Complex ca = std::exp(Complex(0.0, -k * by * t));
            const Complex cb = std::exp(Complex(0.0, -k * b0 * t));
            for (int j = 0; j < orders; ++j) {
                const double decay = std::pow(k * t, -j);
                X(m, 2 * j) = ca * decay;
                X(m, 2 * j + 1) = cb * decay;
            }
            z[m] = psi(idx[p], m) * (k * k * t * t);
        }
        const auto fit = detail::solve_carrier_ls(X, z);
        out.alpha1[p] = fit.amps[0];
        out.beta1[p] = fit.amps[1];
        if (orders >= 2) {
            out.alpha2[p] = fit.amps[2];
            out.beta2[p] = fit.amps[3];
        }
        out.residual_N[p] = fit.residual;
        out.condition[p] = fit.cond;
        if (fit.cond > cond_cap) {
            out.alpha1[p] = out.beta1[p] = Complex(std::nan(""), std::nan(""));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Decay-exponent regression.
// ---------------------------------------------------------------------------

struct DecayFit {
    double slope = 0.0;
    double ci95 = 0.0;
    double intercept = 0.0;
};

inline DecayFit decay_exponent(const std::vector<double>& ts, const std::vector<double>& vals) {
    const int n = static_cast<int>(ts.size());
    if (n < 8 || vals.size() != ts.size())
        throw std::invalid_argument("decay_exponent: need >= 8 samples");
    if (ts.back() < 10.0 * ts.front() * (1.0 - 1e-12))
        throw std::invalid_argument("decay_exponent: need a decade of t");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        if (!(vals[i] > 0.0) || !(ts[i] > 0.0))
            throw std::domain_error("decay_exponent: nonpositive sample");
        const double x = std::log(ts[i]), yv = std::log(vals[i]);
        sx += x;
        sy += yv;
        sxx += x * x;
        sxy += x * yv;
    }
    DecayFit fit;
    const double det = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy - fit.slope * sx) / n;
    double rss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = std::log(vals[i]) - fit.slope * std::log(ts[i]) - fit.intercept;
        rss += r * r;
    }
    if (n > 2) {
        const double se = std::sqrt(rss / (n - 2) / (sxx - sx * sx / n));
        fit.ci95 = 1.96 * se;
    }
    return fit;
}

// ---------------------------------------------------------------------------
// Transform growth bound for h = f log^m(x + i eps): report
// sup_xi |h_hat(xi)| <xi> / (1 + log^{m-1} <xi>).
// ---------------------------------------------------------------------------

struct BoundReport {
    double sup_ratio = 0.0;
    double argmax_xi = 0.0;
    double alias_ratio = 0.0;
};

inline BoundReport fourier_log_check(const Eigen::VectorXd& f, const Grid& g, int m,
                                     double epsilon, int pad = 8) {
    if (m < 1 || m > 3) throw std::invalid_argument("fourier_log_check: m in {1,2,3}");
    if (pad < 8) throw std::invalid_argument("fourier_log_check: zero-padding factor >= 8");
    if (f.size() != g.n) throw std::invalid_argument("fourier_log_check: size mismatch");
    Eigen::VectorXcd h(g.n);
    for (int i = 0; i < g.n; ++i) {
        Complex lg = std::log(Complex(g.node(i), epsilon));
        Complex pw = 1.0;
        for (int q = 0; q < m; ++q) pw *= lg;
        h[i] = f[i] * pw;
    }
    std::vector<double> xi, mag;
    detail::dft_magnitudes(h, g.h(), pad, xi, mag);

    BoundReport rep;
    double peak = 0.0, tail = 0.0;
    const double nyq = M_PI / g.h();
    for (size_t j = 0; j < mag.size(); ++j) {
        peak = std::max(peak, mag[j]);
        if (std::abs(xi[j]) >= 0.5 * nyq) tail = std::max(tail, mag[j]);
        const double br = std::sqrt(1.0 + xi[j] * xi[j]);
        const double denom = m == 1 ? 1.0 : 1.0 + std::pow(std::log(br), m - 1);
        const double ratio = mag[j] * br / denom;
        if (ratio > rep.sup_ratio) {
            rep.sup_ratio = ratio;
            rep.argmax_xi = xi[j];
        }
    }
    rep.alias_ratio = peak > 0.0 ? tail / peak : 0.0;
    if (rep.alias_ratio > 1e-6)
        throw std::runtime_error("fourier_log_check: aliasing detected at the grid Nyquist");
    return rep;
}

}  // namespace invdamp::analysis
