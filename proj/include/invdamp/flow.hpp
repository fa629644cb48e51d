#pragma once

#include "invdamp/grid.hpp"
#include "invdamp/smooth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace invdamp::flow {

enum class Family { couette, perturbed_couette };

/// Monotone background shear b(y) on the extended line, with exact closed-form
/// derivatives. Couette is b(y) = y; the perturbed family is
/// b(y) = y + a * eta((y - c)/W) with eta the standard bump, so b' = 1 + (a/W) eta'
/// and b'' = (a/W^2) eta'' are analytic and b'' is supported on [c-W, c+W].
struct ShearFlow {
    Family family = Family::couette;
    double amplitude = 0.0;
    double center = 0.5;
    double width = 0.2;

    Grid extended{-2.5, 3.5, 2048};  // cached sample grid (diagnostics, scans)
    double c_min = 1.0;              // min b' over the extended grid
    double d2b_lo = 0.0, d2b_hi = 0.0;  // support of b'' (empty if lo == hi)

    double b(double y) const {
        if (family == Family::couette) return y;
        return y + amplitude * bump((y - center) / width);
    }
    double db(double y) const {
        if (family == Family::couette) return 1.0;
        return 1.0 + amplitude / width * bump_d1((y - center) / width);
    }
    double d2b(double y) const {
        if (family == Family::couette) return 0.0;
        return amplitude / (width * width) * bump_d2((y - center) / width);
    }

    /// Safeguarded Newton for y with b(y) = v; |b(y) - v| <= 1e-13 * max(1,|v|).
    double inverse_b(double v) const {
        if (family == Family::couette) return v;
        double lo = extended.lo, hi = extended.hi;
        if (v < b(lo) || v > b(hi))
            throw std::invalid_argument("inverse_b: value outside the range of b");
        const double tol = 1e-13 * std::max(1.0, std::abs(v));
        double y = std::clamp(v, lo, hi);  // b ~ identity: good start
        for (int it = 0; it < 100; ++it) {
            const double r = b(y) - v;
            if (std::abs(r) <= tol) return y;
            if (r > 0.0) hi = y; else lo = y;
            const double step = r / db(y);
            double ynext = y - step;
            if (!(ynext > lo && ynext < hi)) ynext = 0.5 * (lo + hi);  // bisect
            y = ynext;
        }
        throw std::runtime_error("inverse_b: no convergence");
    }

    /// B(v) = b'(b^{-1}(v)) and dB/dv = b''(y)/b'(y) at y = b^{-1}(v).
    double B_of_v(double v) const { return db(inverse_b(v)); }
    double dB_of_v(double v) const {
        const double y = inverse_b(v);
        return d2b(y) / db(y);
    }

    bool in_range(double v) const { return v >= b(extended.lo) && v <= b(extended.hi); }
};

/// Validates monotonicity (b' > 0 everywhere, reported as c_min) and, for the
/// perturbed family, that the bump support sits inside [-1, 2].
inline ShearFlow build_flow(Family family, double amplitude = 0.0, double center = 0.5,
                            double width = 0.2, Grid extended = Grid{-2.5, 3.5, 2048}) {
    ShearFlow f;
    f.family = family;
    f.extended = extended;
    if (family == Family::perturbed_couette) {
        if (width <= 0.0) throw std::invalid_argument("build_flow: width must be positive");
        f.amplitude = amplitude;
        f.center = center;
        f.width = width;
        f.d2b_lo = center - width;
        f.d2b_hi = center + width;
        if (f.d2b_lo < -1.0 || f.d2b_hi > 2.0)
            throw std::invalid_argument("build_flow: bump support must lie inside [-1, 2]");
        // min of b' = 1 + (a/W) eta'(s): scan s at high resolution (eta' is a
        // fixed shape; 20001 samples resolve its extrema to ~1e-8).
        double m = 1.0;
        for (int i = 0; i <= 20000; ++i) {
            const double s = -1.0 + 2.0 * i / 20000.0;
            m = std::min(m, 1.0 + amplitude / width * bump_d1(s));
        }
        f.c_min = m;
        if (!(f.c_min > 0.0))
            throw std::invalid_argument("build_flow: flow is not monotone (min b' = " +
                                        std::to_string(f.c_min) + ")");
    }
    return f;
}

}  // namespace invdamp::flow
