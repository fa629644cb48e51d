#pragma once

#include <cmath>

namespace invdamp {

/// exp(-1/x) continued by 0 for x <= 0; the C-infinity mollifier seed.
inline double expm_seed(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

/// C-infinity step: 0 for x <= 0, 1 for x >= 1, strictly increasing between.
inline double smoothstep(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = expm_seed(x);
    const double b = expm_seed(1.0 - x);
    return a / (a + b);
}

/// C-infinity plateau: 1 on [in_lo, in_hi], 0 outside (out_lo, out_hi).
inline double plateau(double x, double out_lo, double in_lo, double in_hi, double out_hi) {
    return smoothstep((x - out_lo) / (in_lo - out_lo)) *
           smoothstep((out_hi - x) / (out_hi - in_hi));
}

/// Standard bump eta(s) = exp(-1/(1-s^2)) on |s| < 1, 0 outside, and its
/// first two derivatives (analytic, never finite-differenced).
inline double bump(double s) {
    const double u = 1.0 - s * s;
    if (u <= 1e-12) return 0.0;
    return std::exp(-1.0 / u);
}

inline double bump_d1(double s) {
    const double u = 1.0 - s * s;
    if (u <= 1e-12) return 0.0;
    return bump(s) * (-2.0 * s) / (u * u);
}

inline double bump_d2(double s) {
    const double u = 1.0 - s * s;
    if (u <= 1e-12) return 0.0;
    const double g = -2.0 * s / (u * u);                    // (log eta)'
    const double gp = -2.0 * (1.0 + 3.0 * s * s) / (u * u * u);  // (log eta)''
    return bump(s) * (g * g + gp);
}

/// sinh(a)/sinh(b) for b > 0, evaluated in exponential form so large
/// arguments neither overflow nor cancel: e^{a-b} (1-e^{-2a}) / (1-e^{-2b}).
inline double sinh_ratio(double a, double b) {
    if (a == 0.0) return 0.0;
    if (a < 0.0) return -sinh_ratio(-a, b);
    return std::exp(a - b) * (-std::expm1(-2.0 * a)) / (-std::expm1(-2.0 * b));
}

}  // namespace invdamp
