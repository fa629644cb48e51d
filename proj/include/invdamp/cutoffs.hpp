#pragma once

#include "invdamp/flow.hpp"
#include "invdamp/smooth.hpp"

#include <stdexcept>

namespace invdamp::flow {

/// The fixed cutoff family for one wavenumber k:
///  - psi(y):   1 on [0,1], supported in (-delta0/k, 1 + delta0/k), monotone flanks;
///  - upsilon_j(w), j=1,2,3: partition of unity on the w-line with
///      upsilon1 = 1 for w <= b(delta0), upsilon3 = 1 for w >= b(1-delta0),
///      upsilon2 = 1 on [b(2 delta0), b(1-2 delta0)], transitions disjoint;
///  - chi_in:   1 on [1/8, 7/8], 0 outside (1/16, 15/16);
///  - chi_b0:   1 on [-1/8, 1/8], 0 outside (-1/4, 1/4); chi_b1(y) = chi_b0(1-y).
struct CutoffSet {
    int k = 1;
    double delta0 = 0.05;
    // Breakpoints of the upsilon transitions, in w = b(y) coordinates.
    double w_d1 = 0.0, w_d2 = 0.0;  // [b(delta0), b(2 delta0)]
    double w_u2 = 0.0, w_u1 = 0.0;  // [b(1-2 delta0), b(1-delta0)]

    double margin() const { return delta0 / k; }

    double psi(double y) const {
        const double m = margin();
        return smoothstep((y + m) / m) * smoothstep((1.0 + m - y) / m);
    }

    double upsilon1(double w) const { return 1.0 - smoothstep((w - w_d1) / (w_d2 - w_d1)); }
    double upsilon3(double w) const { return smoothstep((w - w_u2) / (w_u1 - w_u2)); }
    double upsilon2(double w) const { return 1.0 - upsilon1(w) - upsilon3(w); }
    double upsilon(int j, double w) const {
        switch (j) {
            case 1: return upsilon1(w);
            case 2: return upsilon2(w);
            case 3: return upsilon3(w);
            default: throw std::invalid_argument("upsilon: j must be 1, 2 or 3");
        }
    }

    static double chi_in(double y) {
        return plateau(y, 1.0 / 16.0, 1.0 / 8.0, 7.0 / 8.0, 15.0 / 16.0);
    }
    static double chi_b0(double y) {
        return plateau(y, -0.25, -0.125, 0.125, 0.25);
    }
    static double chi_b1(double y) { return chi_b0(1.0 - y); }
};

inline CutoffSet build_cutoffs(int k, double delta0, const ShearFlow& f) {
    if (k < 1) throw std::invalid_argument("build_cutoffs: k must be a positive integer");
    if (!(delta0 > 0.0 && delta0 < 0.1))
        throw std::invalid_argument("build_cutoffs: delta0 must lie in (0, 1/10)");
    CutoffSet c;
    c.k = k;
    c.delta0 = delta0;
    c.w_d1 = f.b(delta0);
    c.w_d2 = f.b(2.0 * delta0);
    c.w_u2 = f.b(1.0 - 2.0 * delta0);
    c.w_u1 = f.b(1.0 - delta0);
    return c;
}

}  // namespace invdamp::flow
