#pragma once

#include "invdamp/cutoffs.hpp"
#include "invdamp/flow.hpp"
#include "invdamp/grid.hpp"
#include "invdamp/smooth.hpp"

#include <cmath>
#include <stdexcept>

namespace invdamp::green {

/// Dirichlet Green function of (k^2 - d^2/dy^2) on [0,1]:
///   G_k(y,z) = sinh(k y_<) sinh(k (1 - y_>)) / (k sinh k),
/// evaluated in exponential form so it stays finite for large k.
inline double channel_kernel(double k, double y, double z) {
    if (y < 0.0 || y > 1.0 || z < 0.0 || z > 1.0)
        throw std::invalid_argument("channel_kernel: y, z must lie in [0,1]");
    const double lo = std::min(y, z), hi = std::max(y, z);
    return std::exp(k * (lo - hi)) * (-std::expm1(-2.0 * k * lo)) *
           (-std::expm1(-2.0 * k * (1.0 - hi))) / (2.0 * k * (-std::expm1(-2.0 * k)));
}

/// Extension of G_k to the line: for y inside supp psi and any real z,
///   G_k(y,z) = psi_k(y) [ e^{-k|z-y|} - r1(y) e^{-k|z|} - r0(y) e^{-k|z-1|} ] / (2k),
/// r1 = sinh(k(1-y))/sinh k, r0 = sinh(ky)/sinh k. Restricting to [0,1]^2
/// recovers channel_kernel; G_k(0,z) and G_k(1,z) vanish identically in z.
inline double extended_kernel(double k, double y, double z, const flow::CutoffSet& cut) {
    const double psi = cut.psi(y);
    if (psi == 0.0) return 0.0;
    return psi *
           (std::exp(-k * std::abs(z - y)) - sinh_ratio(k * (1.0 - y), k) * std::exp(-k * std::abs(z)) -
            sinh_ratio(k * y, k) * std::exp(-k * std::abs(z - 1.0))) /
           (2.0 * k);
}

/// Boundary factors of the split: b0 = phi_b0(y) e^{-k|z|} / k and
/// b1 = phi_b1(y) e^{-k|z-1|} / k, with fr + b0 + b1 == extended_kernel.
inline double phi_b0(double k, double y, const flow::CutoffSet& cut) {
    const double psi = cut.psi(y);
    if (psi == 0.0) return 0.0;
    return -0.5 * psi * sinh_ratio(k * (1.0 - y), k);
}

inline double phi_b1(double k, double y, const flow::CutoffSet& cut) {
    const double psi = cut.psi(y);
    if (psi == 0.0) return 0.0;
    return -0.5 * psi * sinh_ratio(k * y, k);
}

struct KernelSplit {
    double fr = 0.0;  // free part: psi_k(y) e^{-k|y-z|} / (2k)
    double b0 = 0.0;  // wall y=0 image charge
    double b1 = 0.0;  // wall y=1 image charge
    double sum() const { return fr + b0 + b1; }
};

inline KernelSplit split_kernel(double k, double y, double z, const flow::CutoffSet& cut) {
    KernelSplit s;
    const double psi = cut.psi(y);
    if (psi == 0.0) return s;
    s.fr = psi * std::exp(-k * std::abs(z - y)) / (2.0 * k);
    s.b0 = phi_b0(k, y, cut) * std::exp(-k * std::abs(z)) / k;
    s.b1 = phi_b1(k, y, cut) * std::exp(-k * std::abs(z - 1.0)) / k;
    return s;
}

/// Discrete verification that channel_kernel is the (k^2 - d^2) Dirichlet
/// Green function: interior finite-difference residual away from z = y, and
/// the derivative jump across z = y (exact value -1).
struct KernelResidualReport {
    double max_residual = 0.0;   // max |(k^2 - D2) G(y,.)| off the diagonal
    double jump = 0.0;           // one-sided estimate of [d_z G] at z = y
    double refinement_slope = 0.0;  // log2(residual(n) / residual(2n))
};

inline double kernel_residual_max(double k, int n) {
    const Grid g(0.0, 1.0, n);
    const double h = g.h();
    double worst = 0.0;
    for (int iy : {n / 4, n / 2, (3 * n) / 4}) {
        const double y = g.node(iy);
        for (int j = 1; j + 1 < n; ++j) {
            if (std::abs(j - iy) <= 1) continue;  // skip the kink cell
            const double z = g.node(j);
            const double d2 = (channel_kernel(k, y, z + h) - 2.0 * channel_kernel(k, y, z) +
                               channel_kernel(k, y, z - h)) /
                              (h * h);
            worst = std::max(worst, std::abs(k * k * channel_kernel(k, y, z) - d2));
        }
    }
    return worst;
}

inline KernelResidualReport kernel_residual_check(double k, int n) {
    if (n < 16) throw std::invalid_argument("kernel_residual_check: n too small");
    KernelResidualReport r;
    r.max_residual = kernel_residual_max(k, n);
    const double r2 = kernel_residual_max(k, 2 * n);
    r.refinement_slope = std::log2(r.max_residual / r2);
    const double y = 0.5, h = 1.0 / (n - 1);
    const double right = (channel_kernel(k, y, y + 2.0 * h) - channel_kernel(k, y, y + h)) / h;
    const double left = (channel_kernel(k, y, y - h) - channel_kernel(k, y, y - 2.0 * h)) / h;
    r.jump = right - left;
    return r;
}

}  // namespace invdamp::green
