#include <catch2/catch_amalgamated.hpp>

#include <invdamp/oracle.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <complex>

using namespace invdamp;
using oracle::Complex;
using Catch::Approx;

namespace {

flow::VorticityMode bump_mode(int k = 1) {
    flow::VorticityProfile p;
    p.kind = flow::VorticityProfile::Kind::bump;
    p.center = 0.5;
    p.width = 0.2;
    return flow::build_vorticity(p, k);
}

}  // namespace

TEST_CASE("elliptic solve against a manufactured solution", "[oracle]") {
    const Grid y(0.0, 1.0, 201);
    for (int k : {1, 3}) {
        Eigen::VectorXcd omega(y.n);
        for (int i = 0; i < y.n; ++i)
            omega[i] = -(M_PI * M_PI + k * k) * std::sin(M_PI * y.node(i));
        const Eigen::VectorXcd psi = oracle::elliptic_solve(omega, k, y);
        double emax = 0.0;
        for (int i = 0; i < y.n; ++i)
            emax = std::max(emax, std::abs(psi[i] - std::sin(M_PI * y.node(i))));
        CHECK(emax < 1e-3);
        CHECK(psi[0] == Complex(0.0, 0.0));
        CHECK(psi[y.n - 1] == Complex(0.0, 0.0));
        // The discrete equation itself is solved to machine precision.
        CHECK(oracle::elliptic_residual(psi, omega, k, y) < 1e-10);
    }
    Eigen::VectorXcd wrong(5);
    CHECK_THROWS_AS(oracle::elliptic_solve(wrong, 1, y), std::invalid_argument);
}

TEST_CASE("couette evolution matches the exact phase rotation", "[oracle]") {
    const int k = 1;
    const Grid y(0.0, 1.0, 101);
    const flow::ShearFlow flw = flow::build_flow(flow::Family::couette);
    const flow::VorticityMode mode = bump_mode(k);

    const auto series = oracle::evolve_vorticity(mode, flw, k, y, 10.0, 0.04, 2);
    REQUIRE(series.size() == 3);
    CHECK(series.back().t == Approx(10.0));
    const auto ref = oracle::couette_reference(mode, flw, k, y, 10.0);
    const double rel = (series.back().omega - ref.omega).norm() / ref.omega.norm();
    CHECK(rel < 1e-6);

    // Pure phase rotation: amplitudes are conserved.
    double amp_drift = 0.0;
    for (int i = 0; i < y.n; ++i)
        amp_drift = std::max(amp_drift,
                             std::abs(std::abs(series.back().omega[i]) - mode.omega0(y.node(i))));
    CHECK(amp_drift < 1e-6);

    // The stored psi solves the elliptic problem for the stored omega.
    CHECK(oracle::elliptic_residual(series.back().psi, series.back().omega, k, y) < 1e-9);
}

TEST_CASE("time stepper converges at fourth order", "[oracle]") {
    const int k = 1;
    const Grid y(0.0, 1.0, 101);
    const flow::ShearFlow flw = flow::build_flow(flow::Family::couette);
    const flow::VorticityMode mode = bump_mode(k);
    const auto ref = oracle::couette_reference(mode, flw, k, y, 10.0);

    auto err_at = [&](double dt) {
        const auto s = oracle::evolve_vorticity(mode, flw, k, y, 10.0, dt, 1);
        return (s.back().omega - ref.omega).norm() / ref.omega.norm();
    };
    const double e1 = err_at(0.1);
    const double e2 = err_at(0.05);
    CHECK(e1 / e2 > 12.0);
    CHECK(e1 / e2 < 20.0);
}

TEST_CASE("evolution guards", "[oracle]") {
    const Grid y(0.0, 1.0, 51);
    const flow::ShearFlow flw = flow::build_flow(flow::Family::couette);
    const flow::VorticityMode mode = bump_mode(1);
    CHECK_THROWS_AS(oracle::evolve_vorticity(mode, flw, 1, y, 1.0, 0.2, 1),
                    std::invalid_argument);  // dt over the phase-accuracy cap
    CHECK_THROWS_AS(oracle::evolve_vorticity(mode, flw, 1, y, 1.0, 0.05, 0),
                    std::invalid_argument);

    const flow::ShearFlow pert = flow::build_flow(flow::Family::perturbed_couette, 0.05, 0.5, 0.25);
    CHECK_THROWS_AS(oracle::couette_reference(mode, pert, 1, y, 1.0), std::invalid_argument);
}

TEST_CASE("embedded eigenvalue scan is clean for the shipped flows", "[oracle]") {
    const flow::ShearFlow couette = flow::build_flow(flow::Family::couette);
    const auto rc = oracle::embedded_eigenvalue_scan(couette, 1);
    CHECK(rc.n_coarse == 201);
    CHECK(rc.n_fine == 258);
    CHECK(rc.band_lo == Approx(0.0));
    CHECK(rc.band_hi == Approx(1.0));
    CHECK(rc.eigenvalues.size() == 258);
    CHECK(rc.clean());

    const flow::ShearFlow pert = flow::build_flow(flow::Family::perturbed_couette, 0.05, 0.5, 0.25);
    const auto rp = oracle::embedded_eigenvalue_scan(pert, 1);
    CHECK(rp.band_hi == Approx(1.0));  // the bump vanishes at the walls
    CHECK(rp.clean());
}
