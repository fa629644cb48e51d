#pragma once

#include "invdamp/flow.hpp"
#include "invdamp/smooth.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace invdamp::flow {

/// Initial vorticity profile on the channel, given by a global closed form so
/// the extension beyond [0,1] is the formula itself times a fixed C-infinity
/// plateau (1 on [0,1], 0 outside [-0.5, 1.5] -- comfortably inside [-2,2]).
struct VorticityProfile {
    enum class Kind { bump, constant, poly, plateau };
    Kind kind = Kind::bump;
    double scale = 1.0;
    // bump
    double center = 0.5, width = 0.2;
    // poly: y^p0 (1-y)^p1
    int p0 = 1, p1 = 1;
    // plateau: 1 on [in_lo, in_hi], 0 outside (out_lo, out_hi)
    double out_lo = 1.0 / 16.0, in_lo = 1.0 / 8.0, in_hi = 7.0 / 8.0, out_hi = 15.0 / 16.0;

    double eval(double y) const {
        switch (kind) {
            case Kind::bump: return scale * bump((y - center) / width);
            case Kind::constant: return scale;
            case Kind::poly: return scale * std::pow(y, p0) * std::pow(1.0 - y, p1);
            case Kind::plateau: return scale * invdamp::plateau(y, out_lo, in_lo, in_hi, out_hi);
        }
        return 0.0;
    }

    /// Order of vanishing at endpoint e in {0,1}; 99 stands for C-infinity flat.
    int vanishing_order(int e) const {
        const double y = static_cast<double>(e);
        switch (kind) {
            case Kind::bump: return std::abs(eval(y)) > 0.0 ? 0 : 99;
            case Kind::constant: return 0;
            case Kind::poly: return e == 0 ? p0 : p1;
            case Kind::plateau: return std::abs(eval(y)) >= std::abs(scale) ? 0 : 99;
        }
        return 0;
    }
};

struct VorticityMode {
    int k = 1;
    VorticityProfile profile;
    std::array<int, 2> requested_order{0, 0};
    std::array<double, 2> boundary_values{0.0, 0.0};
    double support_lo = -0.5, support_hi = 1.5;

    /// The extended initial vorticity omega0(y).
    double omega0(double y) const {
        if (y <= support_lo || y >= support_hi) return 0.0;
        return profile.eval(y) * plateau(y, -0.5, 0.0, 1.0, 1.5);
    }

    /// f0(v) = omega0(b^{-1}(v)).
    double f0(const ShearFlow& f, double v) const {
        if (!f.in_range(v)) return 0.0;
        return omega0(f.inverse_b(v));
    }
};

inline VorticityMode build_vorticity(const VorticityProfile& p, int k,
                                     std::array<int, 2> vanishing = {0, 0}) {
    if (k < 1) throw std::invalid_argument("build_vorticity: k must be a positive integer");
    for (int e : {0, 1})
        if (vanishing[e] < 0 || vanishing[e] > 2)
            throw std::invalid_argument("build_vorticity: vanishing order must be 0, 1, or 2");
    VorticityMode m;
    m.k = k;
    m.profile = p;
    m.requested_order = vanishing;
    for (int e : {0, 1}) {
        if (p.vanishing_order(e) < vanishing[e])
            throw std::invalid_argument(
                "build_vorticity: requested endpoint vanishing inconsistent with profile");
        m.boundary_values[e] = p.eval(static_cast<double>(e));
    }
    if (p.kind == VorticityProfile::Kind::bump) {
        m.support_lo = std::max(-0.5, p.center - p.width);
        m.support_hi = std::min(1.5, p.center + p.width);
    }
    return m;
}

}  // namespace invdamp::flow
