#pragma once

// The ten-criterion acceptance gate. Both the standalone harness binary and
// the CLI `verify` subcommand drive this; each criterion returns a CheckResult
// with the measured values it judged so verdict lines are self-explanatory.

#include "invdamp/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace invdamp::acceptance {

namespace fs = std::filesystem;
using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Scenario catalogue.
// ---------------------------------------------------------------------------

inline scenario::Scenario couette_sc(int k) {
    scenario::Scenario s;
    s.name = "couette-k" + std::to_string(k);
    s.family = flow::Family::couette;
    s.ks = {k};
    return s;
}

inline scenario::Scenario pert_bump_sc(int k) {
    scenario::Scenario s;
    s.name = "pert-bump-k" + std::to_string(k);
    s.family = flow::Family::perturbed_couette;
    s.amplitude = 0.05;
    // Width chosen in the resonance-free region of this family: an Evans scan
    // of the Rayleigh problem finds resolvent poles at 0.324 - 0.016i (width
    // 0.25), 0.367 - 0.030i (0.20) and 0.278 - 0.002i (0.30) for k = 1, all
    // of which sit inside the epsilon ladder and wreck the extrapolated
    // absorption limit; at width 0.35 the scan box [0,1] x [-0.15, 0) is
    // pole-free for k in {1, 2, 4}.
    s.flow_width = 0.35;
    s.ks = {k};
    return s;
}

/// Decay-rate scenario: constant omega0 over the channel (the profile's
/// plateau roll-off sits outside [0,1], so on the channel the data is
/// analytic). Compactly supported bump data carries a slowly decaying
/// quasi-stationary transient whose crossover lands inside the fit window
/// t in [5, 50] and biases the fitted slopes at either k; analytic data is
/// already in the asymptotic regime at t = 5. Three rungs suffice here
/// because snapshots extrapolate from the bottom three.
inline scenario::Scenario orr_sc(flow::Family fam, int k) {
    scenario::Scenario s;
    const bool pert = fam == flow::Family::perturbed_couette;
    s.name = (pert ? std::string("pert-orr-k") : std::string("couette-orr-k")) +
             std::to_string(k);
    s.family = fam;
    if (pert) {
        s.amplitude = 0.05;
        s.flow_width = 0.35;  // resonance-free width, see pert_bump_sc
    }
    s.profile.kind = flow::VorticityProfile::Kind::constant;
    s.ladder.eps0 = 0.025;
    s.ladder.rungs = 3;
    s.ks = {k};
    return s;
}

inline scenario::Scenario pert_const_sc() {
    scenario::Scenario s;
    s.name = "pert-const";
    s.family = flow::Family::perturbed_couette;
    s.amplitude = 0.05;
    s.flow_width = 0.35;  // resonance-free width, see pert_bump_sc
    s.profile.kind = flow::VorticityProfile::Kind::constant;
    s.ks = {1};
    return s;
}

inline scenario::Scenario pert_plateau_sc() {
    scenario::Scenario s;
    s.name = "pert-plateau";
    s.family = flow::Family::perturbed_couette;
    s.amplitude = 0.05;
    s.flow_width = 0.35;  // resonance-free width, see pert_bump_sc
    s.profile.kind = flow::VorticityProfile::Kind::plateau;
    s.vanishing = {2, 2};
    s.ks = {1};
    return s;
}

// ---------------------------------------------------------------------------
// Shared state: solved modes and late-time snapshot matrices are reused
// across criteria.
// ---------------------------------------------------------------------------

struct Harness {
    Grid ychan{0.0, 1.0, 201};
    std::vector<double> late = pipeline::detail::log_spaced(5.0, 50.0, 12);
    std::map<std::string, pipeline::ModeRun> runs;
    std::map<std::string, Eigen::MatrixXcd> snaps;

    pipeline::ModeRun& get(const scenario::Scenario& sc) {
        auto it = runs.find(sc.name);
        if (it == runs.end())
            it = runs.emplace(sc.name, pipeline::run_mode(sc, sc.ks[0], nullptr)).first;
        return it->second;
    }

    const Eigen::MatrixXcd& late_snapshots(const scenario::Scenario& sc) {
        auto it = snaps.find(sc.name);
        if (it == snaps.end()) {
            auto& run = get(sc);
            Eigen::MatrixXcd psi(ychan.n, static_cast<int>(late.size()));
            for (size_t m = 0; m < late.size(); ++m)
                psi.col(static_cast<int>(m)) = pipeline::snapshot(run, late[m], ychan).psi;
            it = snaps.emplace(sc.name, std::move(psi)).first;
        }
        return it->second;
    }
};

namespace detail {

inline double median(std::vector<double> v) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double max_finite_abs(const Eigen::VectorXcd& v) {
    double m = 0.0;
    for (int i = 0; i < v.size(); ++i)
        if (std::isfinite(v[i].real())) m = std::max(m, std::abs(v[i]));
    return m;
}

inline std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Criteria.
// ---------------------------------------------------------------------------

inline report::CheckResult a1(Harness& h) {
    const auto t0 = std::chrono::steady_clock::now();
    auto& run = h.get(pert_bump_sc(1));
    auto res = pipeline::check_oracle_equivalence(run, {0.0, 1.0, 2.0, 5.0, 10.0}, h.ychan);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.measured["seconds"] = secs;
    res.pass = res.pass && secs <= 600.0;
    return res;
}

inline report::CheckResult a2(Harness& h) {
    auto res =
        pipeline::check_couette_exactness(scenario::instantiate(couette_sc(1), 1), h.ychan);
    res.id = "A2";
    return res;
}

inline report::CheckResult a3(Harness& h) {
    report::CheckResult res;
    res.id = "A3";
    res.pass = true;
    nlohmann::json combos = nlohmann::json::array();
    for (const auto& sc :
         {orr_sc(flow::Family::couette, 1), orr_sc(flow::Family::couette, 2),
          orr_sc(flow::Family::perturbed_couette, 1), orr_sc(flow::Family::perturbed_couette, 2)}) {
        auto& run = h.get(sc);
        const auto one = pipeline::check_orr_rates(run, h.ychan);
        nlohmann::json j = one.measured;
        j["scenario"] = sc.name;
        combos.push_back(j);
        res.pass = res.pass && one.pass;
    }
    res.measured = {{"combos", combos}};
    return res;
}

inline report::CheckResult a4() {
    report::CheckResult res;
    res.id = "A4";
    res.pass = true;
    density::LadderSpec spec;
    spec.w_nodes_override = 81;
    double worst = 1e300;
    nlohmann::json per_k = nlohmann::json::array();
    for (int k : {1, 2, 4}) {
        // resonance-free width, see pert_bump_sc
        const auto flw = flow::build_flow(flow::Family::perturbed_couette, 0.05, 0.5, 0.35);
        const auto cut = flow::build_cutoffs(k, 0.05, flw);
        const auto mode = flow::build_vorticity(flow::VorticityProfile{}, k);
        const auto ctx = density::build_context(k, -1, flw, cut, mode, spec);
        std::vector<Eigen::VectorXd> sigma;
        for (const auto& rung : ctx.rungs) {
            const density::GramFactor F(density::h1k_gram(rung.v, k));
            Eigen::VectorXd s(rung.w.n);
#pragma omp parallel for schedule(static)
            for (int c = 0; c < rung.w.n; ++c)
                s[c] = density::lap_sigma_min(ctx, rung, rung.w.node(c), F);
            sigma.push_back(s);
        }
        double k_worst = 1e300, k_min_sigma = 1e300;
        for (size_t r = 1; r < sigma.size(); ++r)
            for (int c = 0; c < sigma[r].size(); ++c)
                k_worst = std::min(k_worst, sigma[r][c] / sigma[0][c]);
        for (const auto& s : sigma) k_min_sigma = std::min(k_min_sigma, s.minCoeff());
        per_k.push_back({{"k", k}, {"worst_ratio", k_worst}, {"min_sigma", k_min_sigma}});
        worst = std::min(worst, k_worst);
        if (k_worst < 0.1) res.pass = false;
    }
    res.measured = {{"per_k", per_k}, {"worst_ratio", worst}, {"floor", 0.1}};
    return res;
}

inline report::CheckResult a5(Harness& h) {
    auto res = pipeline::check_log_coefficient(h.get(pert_plateau_sc()));
    res.id = "A5";
    return res;
}

inline report::CheckResult a6(Harness& h) {
    auto& rn = h.get(pert_const_sc());    // omega0(0) = 1
    auto& rv = h.get(pert_plateau_sc());  // omega0(0) = 0

    auto d0_max = [](const pipeline::ModeRun& run) {
        const auto& ctx = run.minus.ctx;
        const int bot = static_cast<int>(ctx.rungs.size()) - 1;
        const auto phi = density::solve_boundary_response(ctx, bot, 0);
        const auto D =
            singularity::analytic_boundary_coefficient_w(run.minus.fields.back(), phi, ctx, 0);
        return D.val.cwiseAbs().maxCoeff();
    };
    const double dn = d0_max(rn), dv = d0_max(rv);

    auto beta1_max = [&](const scenario::Scenario& sc, const pipeline::ModeRun& run) {
        const auto& psi = h.late_snapshots(sc);
        const auto bf =
            analysis::boundary_expansion_fit(h.late, psi, h.ychan, 1, run.setup.flw, 4);
        return detail::max_finite_abs(bf.beta1);
    };
    const double bn = beta1_max(pert_const_sc(), rn), bv = beta1_max(pert_plateau_sc(), rv);

    report::CheckResult res;
    res.id = "A6";
    const double d_ratio = dn / std::max(dv, 1e-300);
    const double b_ratio = bn / std::max(bv, 1e-300);
    res.measured = {{"d0_nonvanishing", dn},    {"d0_vanishing", dv},
                    {"d0_ratio", d_ratio},      {"beta1_nonvanishing", bn},
                    {"beta1_vanishing", bv},    {"beta1_ratio", b_ratio}};
    res.pass = d_ratio >= 10.0 && b_ratio >= 10.0;
    return res;
}

inline report::CheckResult a7(Harness& h) {
    auto& rn = h.get(pert_const_sc());
    auto& rv = h.get(pert_plateau_sc());

    auto profiles = [&](const scenario::Scenario& sc, const pipeline::ModeRun& run) {
        return analysis::extract_interior_profiles(h.late, h.late_snapshots(sc), h.ychan, 1,
                                                   run.setup.flw);
    };
    const auto pn = profiles(pert_const_sc(), rn);
    const auto pv = profiles(pert_plateau_sc(), rv);

    std::vector<double> r3(pn.residual.data(), pn.residual.data() + pn.residual.size());
    std::vector<double> r1(pn.residual_single.data(),
                           pn.residual_single.data() + pn.residual_single.size());
    const double med3 = detail::median(r3), med1 = detail::median(r1);

    const double side_n = detail::max_finite_abs(pn.beta_in) + detail::max_finite_abs(pn.gamma_in);
    const double side_v = detail::max_finite_abs(pv.beta_in) + detail::max_finite_abs(pv.gamma_in);
    const double drop = side_n / std::max(side_v, 1e-300);

    report::CheckResult res;
    res.id = "A7";
    res.measured = {{"median_residual_three", med3},
                    {"median_residual_single", med1},
                    {"residual_ratio", med3 / std::max(med1, 1e-300)},
                    {"side_carriers_nonvanishing", side_n},
                    {"side_carriers_vanishing", side_v},
                    {"drop", drop}};
    res.pass = med3 <= 0.1 * med1 && drop >= 10.0;
    return res;
}

inline report::CheckResult a8() {
    auto res = pipeline::check_fourier_log(scenario::instantiate(pert_const_sc(), 1));
    res.id = "A8";
    return res;
}

inline report::CheckResult a9(Harness& h) {
    auto res = pipeline::check_rescaled_band(h.get(pert_const_sc()), h.ychan);
    res.id = "A9";
    return res;
}

inline report::CheckResult a10() {
    report::CheckResult res;
    res.id = "A10";
    const int k = 1;
    const auto flw = flow::build_flow(flow::Family::perturbed_couette, 0.05, 0.5, 0.35);
    const Grid y(0.0, 1.0, 201);
    const auto times = pipeline::detail::log_spaced(5.0, 50.0, 12);
    const int M = static_cast<int>(times.size());
    const double b0 = flw.b(0.0), b1 = flw.b(1.0);

    // Interior three-carrier recovery on exactly realizable data.
    auto alpha = [](double yv) { return Complex(1.0 + 0.3 * std::sin(3.0 * yv), 0.2 * yv); };
    auto beta = [](double yv) { return Complex(0.4 * std::cos(2.0 * yv), -0.1); };
    auto gamma = [](double yv) { return Complex(-0.25, 0.15 * yv * yv); };
    Eigen::MatrixXcd psi(y.n, M);
    for (int m = 0; m < M; ++m)
        for (int i = 0; i < y.n; ++i) {
            const double t = times[m], yv = y.node(i);
            psi(i, m) = (alpha(yv) * std::exp(Complex(0.0, -k * flw.b(yv) * t)) +
                         beta(yv) * std::exp(Complex(0.0, -k * b0 * t)) +
                         gamma(yv) * std::exp(Complex(0.0, -k * b1 * t))) /
                        (k * k * t * t);
        }
    const auto prof = analysis::extract_interior_profiles(times, psi, y, k, flw);
    double err_in = 0.0;
    for (size_t p = 0; p < prof.y_index.size(); ++p) {
        const double yv = y.node(prof.y_index[p]);
        err_in = std::max({err_in, std::abs(prof.alpha_in[p] - alpha(yv)),
                           std::abs(prof.beta_in[p] - beta(yv)),
                           std::abs(prof.gamma_in[p] - gamma(yv))});
    }

    // Boundary expansion recovery.
    auto a1f = [](double yv) { return Complex(0.8, 0.1 * yv); };
    auto a2f = [](double yv) { return Complex(-0.3 * yv, 0.2); };
    auto b1f = [](double) { return Complex(0.5, -0.25); };
    auto b2f = [](double yv) { return Complex(0.1, 0.05 * yv); };
    for (int m = 0; m < M; ++m)
        for (int i = 0; i < y.n; ++i) {
            const double t = times[m], yv = y.node(i);
            const Complex ca = std::exp(Complex(0.0, -k * flw.b(yv) * t));
            const Complex cb = std::exp(Complex(0.0, -k * b0 * t));
            psi(i, m) =
                (ca * (a1f(yv) + a2f(yv) / (k * t)) + cb * (b1f(yv) + b2f(yv) / (k * t))) /
                (k * k * t * t);
        }
    const auto bf = analysis::boundary_expansion_fit(times, psi, y, k, flw, 4);
    double err_b = 0.0;
    for (size_t p = 0; p < bf.y_index.size(); ++p) {
        if (!std::isfinite(bf.alpha1[p].real())) continue;
        const double yv = y.node(bf.y_index[p]);
        err_b = std::max({err_b, std::abs(bf.alpha1[p] - a1f(yv)),
                          std::abs(bf.alpha2[p] - a2f(yv)), std::abs(bf.beta1[p] - b1f(yv)),
                          std::abs(bf.beta2[p] - b2f(yv))});
    }

    // Log-coefficient recovery.
    const double eps = 2e-3;
    const Grid xg(-0.1, 0.1, 401);
    Eigen::VectorXd xs(xg.n);
    Eigen::VectorXcd hs(xg.n);
    const Complex c1t(0.7, -0.2), c0t(0.3, 0.1), c2t(-1.1, 0.4);
    for (int i = 0; i < xg.n; ++i) {
        xs[i] = xg.node(i);
        hs[i] = c1t * std::log(Complex(xs[i], -eps)) + c0t + c2t * xs[i];
    }
    const auto lf = singularity::fit_log_coefficient(xs, hs, eps, -1);
    const double err_l =
        std::max({std::abs(lf.c1 - c1t), std::abs(lf.c0 - c0t), std::abs(lf.c2 - c2t)});

    // Determinism: identical config reproduces bit-identical artifacts, with
    // and without the Theta cache.
    scenario::Scenario tiny = couette_sc(1);
    tiny.name = "tiny-couette";
    tiny.channel_nodes = 65;
    tiny.ladder.rungs = 3;
    tiny.ladder.kappa = 3.0;
    tiny.times = {1.0, 2.0};
    const fs::path base = fs::current_path() / "acceptance_a10";
    fs::remove_all(base);
    const fs::path cache = base / "cache";
    const auto rep1 = pipeline::run_scenario(tiny, base / "out1", &cache);
    pipeline::run_scenario(tiny, base / "out2", &cache);  // warm cache
    pipeline::run_scenario(tiny, base / "out3", nullptr);
    bool identical = rep1.all_pass();
    for (const char* f : {"report.json", "stream_k1.csv", "log_fit_k1.csv"})
        identical =
            identical && detail::slurp(base / "out1" / f) == detail::slurp(base / "out2" / f);
    for (const char* f : {"stream_k1.csv", "log_fit_k1.csv"})
        identical =
            identical && detail::slurp(base / "out1" / f) == detail::slurp(base / "out3" / f);

    res.measured = {{"interior_recovery", err_in},
                    {"boundary_recovery", err_b},
                    {"log_recovery", err_l},
                    {"bit_identical", identical}};
    res.pass = err_in <= 1e-6 && err_b <= 1e-6 && err_l <= 1e-6 && identical;
    return res;
}

// ---------------------------------------------------------------------------
// Gate driver.
// ---------------------------------------------------------------------------

/// Run the criteria whose ids appear in `only` (empty = all ten), invoking
/// `on_result` after each. Exceptions become failing results.
inline std::vector<report::CheckResult> run_gate(
    const std::vector<std::string>& only = {},
    const std::function<void(const report::CheckResult&)>& on_result = {}) {
    Harness h;
    const std::vector<std::pair<std::string, std::function<report::CheckResult()>>> gate = {
        {"A1", [&] { return a1(h); }},  {"A2", [&] { return a2(h); }},
        {"A3", [&] { return a3(h); }},  {"A4", [] { return a4(); }},
        {"A5", [&] { return a5(h); }},  {"A6", [&] { return a6(h); }},
        {"A7", [&] { return a7(h); }},  {"A8", [] { return a8(); }},
        {"A9", [&] { return a9(h); }},  {"A10", [] { return a10(); }},
    };
    std::vector<report::CheckResult> out;
    for (const auto& [id, fn] : gate) {
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        report::CheckResult r;
        try {
            r = fn();
        } catch (const std::exception& e) {
            r.id = id;
            r.pass = false;
            r.measured = {{"error", e.what()}};
        }
        if (on_result) on_result(r);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace invdamp::acceptance
