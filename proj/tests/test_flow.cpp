#include <catch2/catch_amalgamated.hpp>

#include <invdamp/cutoffs.hpp>
#include <invdamp/flow.hpp>
#include <invdamp/vorticity.hpp>

#include <cmath>

using namespace invdamp::flow;
using Catch::Approx;

TEST_CASE("couette flow is the identity shear", "[flow]") {
    const ShearFlow f = build_flow(Family::couette);
    for (double y : {-2.0, -0.3, 0.0, 0.41, 1.0, 2.7}) {
        CHECK(f.b(y) == y);
        CHECK(f.db(y) == 1.0);
        CHECK(f.d2b(y) == 0.0);
        CHECK(f.inverse_b(y) == y);
    }
    CHECK(f.c_min == 1.0);
    CHECK(f.B_of_v(0.3) == 1.0);
    CHECK(f.dB_of_v(0.3) == 0.0);
}

TEST_CASE("perturbed flow: monotone, exact derivatives, invertible", "[flow]") {
    const ShearFlow f = build_flow(Family::perturbed_couette, 0.05, 0.5, 0.25);
    CHECK(f.c_min > 0.0);
    CHECK(f.d2b_lo == Approx(0.25));
    CHECK(f.d2b_hi == Approx(0.75));

    // b'' vanishes identically outside the bump support.
    CHECK(f.d2b(0.2) == 0.0);
    CHECK(f.d2b(0.8) == 0.0);
    CHECK(f.d2b(0.4) != 0.0);

    // b' agrees with a finite difference of b.
    const double h = 1e-6;
    for (double y : {0.3, 0.5, 0.62}) {
        const double d_fd = (f.b(y + h) - f.b(y - h)) / (2 * h);
        CHECK(f.db(y) == Approx(d_fd).margin(1e-8));
    }

    // inverse_b round trips to near machine precision.
    for (double y : {-1.5, 0.0, 0.37, 0.5, 0.81, 1.0, 2.2}) {
        const double v = f.b(y);
        CHECK(f.inverse_b(v) == Approx(y).margin(1e-10));
    }
    CHECK_THROWS_AS(f.inverse_b(100.0), std::invalid_argument);

    // The deviation from couette is linear in the amplitude (up to the
    // rounding of y + a*eta and the cancellation in recovering a*eta here).
    const ShearFlow f2 = build_flow(Family::perturbed_couette, 0.1, 0.5, 0.25);
    for (double y : {0.3, 0.45, 0.6}) {
        CHECK(f2.b(y) - y == Approx(2.0 * (f.b(y) - y)).epsilon(1e-13));
    }
}

TEST_CASE("build_flow rejects non-monotone and out-of-range bumps", "[flow]") {
    CHECK_THROWS_AS(build_flow(Family::perturbed_couette, 2.0, 0.5, 0.2),
                    std::invalid_argument);  // min b' < 0
    CHECK_THROWS_AS(build_flow(Family::perturbed_couette, 0.01, 0.5, 1.6),
                    std::invalid_argument);  // support leaves [-1, 2]
    CHECK_THROWS_AS(build_flow(Family::perturbed_couette, 0.01, 0.5, -0.1),
                    std::invalid_argument);
}

TEST_CASE("cutoffs form a partition of unity with the right flats", "[cutoffs]") {
    const ShearFlow f = build_flow(Family::perturbed_couette, 0.03, 0.5, 0.25);
    const CutoffSet c = build_cutoffs(2, 0.05, f);

    CHECK(c.margin() == Approx(0.025));
    CHECK(c.psi(0.0) == 1.0);
    CHECK(c.psi(1.0) == 1.0);
    CHECK(c.psi(0.5) == 1.0);
    CHECK(c.psi(-c.margin()) == 0.0);
    CHECK(c.psi(1.0 + c.margin()) == 0.0);
    const double pmid = c.psi(-0.5 * c.margin());
    CHECK(pmid > 0.0);
    CHECK(pmid < 1.0);

    for (int i = 0; i <= 400; ++i) {
        const double w = f.b(-0.2) + (f.b(1.2) - f.b(-0.2)) * i / 400.0;
        const double u1 = c.upsilon(1, w), u2 = c.upsilon(2, w), u3 = c.upsilon(3, w);
        REQUIRE(u1 + u2 + u3 == Approx(1.0).margin(1e-14));
        REQUIRE(u1 >= 0.0);
        REQUIRE(u2 >= -1e-15);
        REQUIRE(u3 >= 0.0);
    }
    CHECK(c.upsilon1(f.b(0.05)) == 1.0);
    CHECK(c.upsilon1(f.b(0.10)) == 0.0);
    CHECK(c.upsilon2(f.b(0.10)) == Approx(1.0).margin(1e-15));
    CHECK(c.upsilon2(f.b(0.90)) == Approx(1.0).margin(1e-15));
    CHECK(c.upsilon3(f.b(0.95)) == 1.0);
    CHECK(c.upsilon3(f.b(0.90)) == 0.0);
    CHECK_THROWS_AS(c.upsilon(4, 0.5), std::invalid_argument);

    CHECK(CutoffSet::chi_in(0.5) == 1.0);
    CHECK(CutoffSet::chi_in(1.0 / 8.0) == 1.0);
    CHECK(CutoffSet::chi_in(1.0 / 16.0) == 0.0);
    CHECK(CutoffSet::chi_in(15.0 / 16.0) == 0.0);
    CHECK(CutoffSet::chi_b0(0.0) == 1.0);
    CHECK(CutoffSet::chi_b0(0.125) == 1.0);
    CHECK(CutoffSet::chi_b0(0.25) == 0.0);
    CHECK(CutoffSet::chi_b1(1.0) == 1.0);
    CHECK(CutoffSet::chi_b1(0.75) == 0.0);

    CHECK_THROWS_AS(build_cutoffs(0, 0.05, f), std::invalid_argument);
    CHECK_THROWS_AS(build_cutoffs(1, 0.2, f), std::invalid_argument);
}

TEST_CASE("vorticity profiles and their extension", "[vorticity]") {
    VorticityProfile bumpy;
    bumpy.kind = VorticityProfile::Kind::bump;
    bumpy.scale = 2.0;
    bumpy.center = 0.5;
    bumpy.width = 0.2;
    const VorticityMode m = build_vorticity(bumpy, 1);

    CHECK(bumpy.eval(0.5) == Approx(2.0 * std::exp(-1.0)).epsilon(1e-15));
    CHECK(m.support_lo == Approx(0.3));
    CHECK(m.support_hi == Approx(0.7));
    CHECK(m.omega0(0.5) == Approx(bumpy.eval(0.5)));
    CHECK(m.omega0(0.29) == 0.0);
    CHECK(m.omega0(0.71) == 0.0);

    // On [0,1] the extension plateau is identically 1.
    VorticityProfile flat;
    flat.kind = VorticityProfile::Kind::constant;
    flat.scale = 1.5;
    const VorticityMode mc = build_vorticity(flat, 1);
    for (double y : {0.0, 0.25, 0.5, 1.0}) CHECK(mc.omega0(y) == Approx(1.5));
    CHECK(mc.omega0(-0.5) == 0.0);
    CHECK(mc.omega0(1.5) == 0.0);
    CHECK(mc.omega0(-3.0) == 0.0);
    const double tail = mc.omega0(1.2);  // inside the taper
    CHECK(tail > 0.0);
    CHECK(tail < 1.5);
    CHECK(mc.boundary_values[0] == Approx(1.5));
    CHECK(mc.boundary_values[1] == Approx(1.5));

    // Requested endpoint vanishing must be consistent with the profile.
    CHECK_THROWS_AS(build_vorticity(flat, 1, {1, 0}), std::invalid_argument);
    VorticityProfile poly;
    poly.kind = VorticityProfile::Kind::poly;
    poly.p0 = 2;
    poly.p1 = 1;
    CHECK_NOTHROW(build_vorticity(poly, 1, {2, 1}));
    CHECK_THROWS_AS(build_vorticity(poly, 1, {2, 2}), std::invalid_argument);
    CHECK_THROWS_AS(build_vorticity(flat, 0), std::invalid_argument);
    CHECK_THROWS_AS(build_vorticity(flat, 1, {3, 0}), std::invalid_argument);

    // f0 is omega0 composed with the inverse shear.
    const ShearFlow f = build_flow(Family::perturbed_couette, 0.05, 0.5, 0.25);
    for (double y : {0.1, 0.42, 0.77}) {
        CHECK(m.f0(f, f.b(y)) == Approx(m.omega0(y)).margin(1e-12));
    }
    CHECK(m.f0(f, f.b(f.extended.hi) + 1.0) == 0.0);
}
