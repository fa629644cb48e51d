#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace invdamp {

/// Uniform grid on [lo, hi] with n nodes (n >= 2), node(0) == lo, node(n-1) == hi.
struct Grid {
    double lo = 0.0;
    double hi = 1.0;
    int n = 2;

    Grid() = default;
    Grid(double lo_, double hi_, int n_) : lo(lo_), hi(hi_), n(n_) {
        if (!(hi > lo) || n < 2) throw std::invalid_argument("Grid: need hi > lo and n >= 2");
    }

    double h() const { return (hi - lo) / (n - 1); }
    double node(int i) const { return lo + i * h(); }

    Eigen::VectorXd nodes() const {
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i) x[i] = node(i);
        return x;
    }

    /// Composite-trapezoid quadrature weights: h/2 at the ends, h inside.
    Eigen::VectorXd trapezoid_weights() const {
        Eigen::VectorXd q = Eigen::VectorXd::Constant(n, h());
        q[0] *= 0.5;
        q[n - 1] *= 0.5;
        return q;
    }

    /// Index of the closest node <= x (clamped to [0, n-2]).
    int cell_of(double x) const {
        int i = static_cast<int>(std::floor((x - lo) / h()));
        if (i < 0) i = 0;
        if (i > n - 2) i = n - 2;
        return i;
    }

    bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Centered first difference (one-sided at the ends), second-order inside.
template <typename Vec>
Vec finite_difference(const Vec& f, double h) {
    const auto n = f.size();
    if (n < 2) throw std::invalid_argument("finite_difference: need >= 2 samples");
    Vec d(n);
    d[0] = (f[1] - f[0]) / h;
    for (Eigen::Index i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d[n - 1] = (f[n - 1] - f[n - 2]) / h;
    return d;
}

/// Trapezoid L2 norm of samples on a uniform grid of spacing h.
template <typename Vec>
double l2_norm(const Vec& f, double h) {
    const auto n = f.size();
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double w = (i == 0 || i == n - 1) ? 0.5 * h : h;
        s += w * std::norm(f[i]);
    }
    return std::sqrt(s);
}

/// Cubic (4-point Lagrange) interpolation of uniformly sampled data at x.
/// Falls back to linear in the first/last cell. Out-of-range x returns 0
/// (fields here are compactly supported on their grids).
template <typename Vec>
auto interp_cubic(const Grid& g, const Vec& f, double x) -> typename Vec::Scalar {
    using Scalar = typename Vec::Scalar;
    if (x < g.lo || x > g.hi) return Scalar(0);
    const double h = g.h();
    int i = g.cell_of(x);
    if (i == 0 || i >= g.n - 2) {  // linear at the edges
        const double t = (x - g.node(i)) / h;
        return static_cast<Scalar>((1.0 - t) * f[i] + t * f[i + 1]);
    }
    // Nodes i-1..i+2, local coordinate t in [0,1] across [i, i+1].
    const double t = (x - g.node(i)) / h;
    const double tm = t + 1.0, tp = t - 1.0, tq = t - 2.0;
    const double c0 = -t * tp * tq / 6.0;
    const double c1 = tm * tp * tq / 2.0;
    const double c2 = -tm * t * tq / 2.0;
    const double c3 = tm * t * tp / 6.0;
    return static_cast<Scalar>(c0 * f[i - 1] + c1 * f[i] + c2 * f[i + 1] + c3 * f[i + 2]);
}

}  // namespace invdamp
