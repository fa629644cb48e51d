#include <catch2/catch_amalgamated.hpp>

#include <invdamp/grid.hpp>
#include <invdamp/smooth.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <vector>

using invdamp::Grid;
using Catch::Approx;

TEST_CASE("grid basics", "[grid]") {
    Grid g(0.0, 1.0, 11);
    CHECK(g.h() == Approx(0.1));
    CHECK(g.node(0) == Approx(0.0));
    CHECK(g.node(10) == Approx(1.0));
    CHECK(g.nodes().size() == 11);
    CHECK(g.nodes()[3] == Approx(0.3));

    CHECK(g.contains(0.0));
    CHECK(g.contains(1.0));
    CHECK_FALSE(g.contains(-1e-12));
    CHECK_FALSE(g.contains(1.0 + 1e-12));

    CHECK(g.cell_of(0.05) == 0);
    CHECK(g.cell_of(0.95) == 9);
    CHECK(g.cell_of(-5.0) == 0);   // clamped below
    CHECK(g.cell_of(5.0) == 9);    // clamped above
    CHECK(g.cell_of(1.0) == 9);    // right endpoint maps to the last cell

    CHECK_THROWS_AS(Grid(1.0, 0.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(Grid(0.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(Grid(0.0, 0.0, 5), std::invalid_argument);
}

TEST_CASE("trapezoid weights integrate constants exactly", "[grid]") {
    Grid g(-0.5, 1.5, 37);
    const Eigen::VectorXd q = g.trapezoid_weights();
    CHECK(q.sum() == Approx(2.0).epsilon(1e-14));
    CHECK(q[0] == Approx(0.5 * g.h()));
    CHECK(q[36] == Approx(0.5 * g.h()));
    CHECK(q[17] == Approx(g.h()));

    // Trapezoid is exact on affine integrands.
    const Eigen::VectorXd x = g.nodes();
    double s = 0.0;
    for (int i = 0; i < g.n; ++i) s += q[i] * (2.0 * x[i] - 0.25);
    CHECK(s == Approx(2.0 * (1.5 * 1.5 - 0.5 * 0.5) / 2.0 - 0.25 * 2.0).epsilon(1e-13));
}

TEST_CASE("finite difference is second order inside", "[grid]") {
    auto err_for = [](int n) {
        Grid g(0.0, 1.0, n);
        Eigen::VectorXd f(n);
        for (int i = 0; i < n; ++i) f[i] = std::sin(g.node(i));
        const Eigen::VectorXd d = invdamp::finite_difference(f, g.h());
        double emax = 0.0;
        for (int i = 1; i + 1 < n; ++i)
            emax = std::max(emax, std::abs(d[i] - std::cos(g.node(i))));
        return emax;
    };
    const double e1 = err_for(101);
    const double e2 = err_for(201);
    CHECK(e1 < 2e-5);
    CHECK(e1 / e2 > 3.4);  // halving h should cut the error ~4x
    CHECK(e1 / e2 < 4.6);

    std::vector<double> tiny{1.0};
    CHECK_THROWS_AS(invdamp::finite_difference(tiny, 0.1), std::invalid_argument);
}

TEST_CASE("l2 norm of the unit function on [0,1] is 1", "[grid]") {
    Grid g(0.0, 1.0, 57);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(g.n);
    CHECK(invdamp::l2_norm(ones, g.h()) == Approx(1.0).epsilon(1e-14));

    // Complex samples go through std::norm.
    std::vector<std::complex<double>> z(g.n, {0.0, 1.0});
    CHECK(invdamp::l2_norm(z, g.h()) == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("cubic interpolation is exact on cubics away from the edges", "[grid]") {
    Grid g(-1.0, 2.0, 61);
    auto p = [](double x) { return ((0.5 * x - 1.0) * x + 2.0) * x - 0.75; };
    Eigen::VectorXd f(g.n);
    for (int i = 0; i < g.n; ++i) f[i] = p(g.node(i));

    for (double x : {-0.8, -0.3, 0.1, 0.77, 1.4, 1.83}) {
        CHECK(invdamp::interp_cubic(g, f, x) == Approx(p(x)).margin(1e-12));
    }

    // Outside the grid the field is treated as compactly supported.
    CHECK(invdamp::interp_cubic(g, f, -1.0 - 1e-9) == 0.0);
    CHECK(invdamp::interp_cubic(g, f, 2.0 + 1e-9) == 0.0);

    // First and last cells fall back to linear interpolation.
    const double xe = g.lo + 0.4 * g.h();
    const double lin = 0.6 * f[0] + 0.4 * f[1];
    CHECK(invdamp::interp_cubic(g, f, xe) == Approx(lin).margin(1e-13));

    // Node values are reproduced exactly.
    CHECK(invdamp::interp_cubic(g, f, g.node(30)) == Approx(f[30]).margin(1e-13));
}

TEST_CASE("smoothstep and plateau hit their flats", "[smooth]") {
    CHECK(invdamp::smoothstep(-0.5) == 0.0);
    CHECK(invdamp::smoothstep(0.0) == 0.0);
    CHECK(invdamp::smoothstep(1.0) == 1.0);
    CHECK(invdamp::smoothstep(2.0) == 1.0);
    CHECK(invdamp::smoothstep(0.5) == Approx(0.5).epsilon(1e-14));  // odd symmetry about 1/2
    const double s1 = invdamp::smoothstep(0.3);
    const double s2 = invdamp::smoothstep(0.7);
    CHECK(s1 + s2 == Approx(1.0).epsilon(1e-14));
    CHECK(s1 > 0.0);
    CHECK(s1 < 0.5);

    CHECK(invdamp::plateau(0.5, 0.0, 0.25, 0.75, 1.0) == 1.0);
    CHECK(invdamp::plateau(0.25, 0.0, 0.25, 0.75, 1.0) == 1.0);
    CHECK(invdamp::plateau(-0.1, 0.0, 0.25, 0.75, 1.0) == 0.0);
    CHECK(invdamp::plateau(1.1, 0.0, 0.25, 0.75, 1.0) == 0.0);
    const double pl = invdamp::plateau(0.1, 0.0, 0.25, 0.75, 1.0);
    CHECK(pl > 0.0);
    CHECK(pl < 1.0);
}

TEST_CASE("bump derivatives match high-order finite differences", "[smooth]") {
    CHECK(invdamp::bump(0.0) == Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(invdamp::bump(1.0) == 0.0);
    CHECK(invdamp::bump(-1.0) == 0.0);
    CHECK(invdamp::bump(2.0) == 0.0);
    CHECK(invdamp::bump_d1(0.0) == 0.0);

    const double h = 1e-5;
    for (double s : {-0.7, -0.2, 0.0, 0.35, 0.8}) {
        const double d1_fd =
            (invdamp::bump(s - 2 * h) - 8 * invdamp::bump(s - h) + 8 * invdamp::bump(s + h) -
             invdamp::bump(s + 2 * h)) /
            (12 * h);
        const double d2_fd =
            (-invdamp::bump(s - 2 * h) + 16 * invdamp::bump(s - h) - 30 * invdamp::bump(s) +
             16 * invdamp::bump(s + h) - invdamp::bump(s + 2 * h)) /
            (12 * h * h);
        CHECK(invdamp::bump_d1(s) == Approx(d1_fd).margin(1e-9));
        CHECK(invdamp::bump_d2(s) == Approx(d2_fd).margin(1e-6));
    }
}

TEST_CASE("sinh_ratio matches the naive quotient and survives extremes", "[smooth]") {
    for (double a : {-3.0, -0.4, 0.2, 1.0, 5.0}) {
        for (double b : {0.5, 1.0, 6.0}) {
            CHECK(invdamp::sinh_ratio(a, b) ==
                  Approx(std::sinh(a) / std::sinh(b)).epsilon(1e-13));
        }
    }
    CHECK(invdamp::sinh_ratio(0.0, 2.0) == 0.0);

    // Large arguments: naive sinh overflows near 710, the ratio must not.
    const double r = invdamp::sinh_ratio(900.0, 1000.0);
    CHECK(std::isfinite(r));
    CHECK(r == Approx(std::exp(-100.0)).epsilon(1e-12));

    // Small arguments: ratio -> a/b without catastrophic cancellation.
    CHECK(invdamp::sinh_ratio(1e-9, 2e-9) == Approx(0.5).epsilon(1e-6));
}
