// Command-line front end: scenario configs in, CSV tables and a JSON report
// out. Subcommands cover the oracle alone (simulate), the spectral-density
// ladders (density), the full pipeline (profiles), the acceptance gate
// (verify) and kernel tables (dump-kernel).

#include <invdamp/acceptance.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

namespace fs = std::filesystem;
using namespace invdamp;

std::vector<std::string> split_checks(const std::string& s) {
    std::vector<std::string> out;
    if (s.empty() || s == "none") return out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

int cmd_simulate(const scenario::Scenario& sc, const fs::path& out) {
    fs::create_directories(out);
    report::RunReport rep;
    rep.scenario = sc.name;
    rep.config_hash = sc.config_hash();
    const Grid y(0.0, 1.0, sc.channel_nodes);
    for (int k : sc.ks) {
        const auto ms = scenario::instantiate(sc, k);
        double bmax = 0.0;
        for (int i = 0; i < y.n; ++i) bmax = std::max(bmax, std::abs(ms.flw.b(y.node(i))));
        const double dt = 0.08 / (k * bmax);
        std::vector<std::vector<double>> rows;
        for (double t : sc.times) {
            oracle::EvolutionState st;
            if (t > 0.0) {
                st = oracle::evolve_vorticity(ms.mode, ms.flw, k, y, t, dt, 1).back();
            } else {
                st.t = 0.0;
                st.omega.resize(y.n);
                for (int i = 0; i < y.n; ++i) st.omega[i] = ms.mode.omega0(y.node(i));
                st.psi = oracle::elliptic_solve(st.omega, k, y);
            }
            for (int i = 0; i < y.n; ++i)
                rows.push_back({t, y.node(i), st.omega[i].real(), st.omega[i].imag(),
                                st.psi[i].real(), st.psi[i].imag()});
        }
        io::csv_write(out / ("oracle_k" + std::to_string(k) + ".csv"),
                      {"t", "y", "re_omega", "im_omega", "re_psi", "im_psi"}, rows);
    }
    rep.manifest = {{"version", "1.0.0"}, {"subcommand", "simulate"}};
    report::write_report(out / "report.json", rep);
    return 0;
}

int cmd_density(const scenario::Scenario& sc, const fs::path& out, const fs::path* cache) {
    fs::create_directories(out);
    report::RunReport rep;
    rep.scenario = sc.name;
    rep.config_hash = sc.config_hash();
    for (int k : sc.ks) {
        const auto run = pipeline::run_mode(sc, k, cache);
        std::vector<std::vector<double>> rows;
        for (const auto& f : run.minus.fields)
            for (int c = 0; c < f.w.n; ++c)
                rows.push_back({f.epsilon, f.w.node(c), f.residuals[c]});
        io::csv_write(out / ("density_k" + std::to_string(k) + ".csv"),
                      {"epsilon", "w", "residual"}, rows);
        rep.checks.push_back({"conjugation_k" + std::to_string(k),
                              run.conjugation_deviation <= 1e-10,
                              {{"deviation", run.conjugation_deviation}}});
    }
    rep.manifest = {{"version", "1.0.0"}, {"subcommand", "density"}};
    report::write_report(out / "report.json", rep);
    return rep.all_pass() ? 0 : 1;
}

int cmd_dump_kernel(const scenario::Scenario& sc, const fs::path& out) {
    fs::create_directories(out);
    for (int k : sc.ks) {
        const auto flw = scenario::instantiate(sc, k).flw;
        const auto cut = flow::build_cutoffs(k, sc.delta0, flw);
        const Grid yg(0.0, 1.0, 101), zg(-0.25, 1.25, 151);
        std::vector<std::vector<double>> rows;
        for (int i = 0; i < yg.n; ++i)
            for (int j = 0; j < zg.n; ++j) {
                const double y = yg.node(i), z = zg.node(j);
                const auto s = green::split_kernel(k, y, z, cut);
                const double chan =
                    (z >= 0.0 && z <= 1.0) ? green::channel_kernel(k, y, z) : 0.0;
                rows.push_back({y, z, chan, s.fr, s.b0, s.b1, s.sum()});
            }
        io::csv_write(out / ("kernel_k" + std::to_string(k) + ".csv"),
                      {"y", "z", "channel", "free", "bdry0", "bdry1", "extended"}, rows);
    }
    return 0;
}

int cmd_verify(const fs::path& out, const std::vector<std::string>& only) {
    int failed = 0;
    const auto results = acceptance::run_gate(only, [&](const report::CheckResult& r) {
        std::printf("%-4s %s %s\n", r.id.c_str(), r.pass ? "PASS" : "FAIL",
                    r.measured.dump().c_str());
        std::fflush(stdout);
        if (!r.pass) ++failed;
    });
    if (!out.empty()) {
        fs::create_directories(out);
        report::RunReport rep;
        rep.scenario = "acceptance-gate";
        rep.checks = results;
        rep.manifest = {{"version", "1.0.0"}, {"subcommand", "verify"}};
        report::write_report(out / "report.json", rep);
    }
    std::printf("acceptance: %d/%d passed\n", static_cast<int>(results.size()) - failed,
                static_cast<int>(results.size()));
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"linear inviscid damping pipeline"};
    app.require_subcommand(1);

    std::string config, out = "out", cache, checks;
    int threads = 0;
    app.add_option("--config", config, "scenario config file (JSON)");
    app.add_option("--out", out, "output directory");
    app.add_option("--threads", threads, "worker threads (0 = runtime default)");
    app.add_option("--checks", checks, "comma-separated check ids, or 'none'");
    app.add_option("--cache-dir", cache, "directory for cached density fields");

    auto* sim = app.add_subcommand("simulate", "time-stepped oracle only");
    auto* den = app.add_subcommand("density", "solve the spectral-density ladders");
    auto* pro = app.add_subcommand("profiles", "full pipeline: stream, fits, report");
    auto* ver = app.add_subcommand("verify", "run the acceptance gate");
    auto* dmp = app.add_subcommand("dump-kernel", "write kernel tables");

    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    try {
        const fs::path out_dir(out);
        const fs::path cache_dir(cache);
        const fs::path* cache_ptr = cache.empty() ? nullptr : &cache_dir;
        const auto only = split_checks(checks);

        if (ver->parsed()) return cmd_verify(out_dir, only);

        if (config.empty()) {
            std::fprintf(stderr, "error: --config is required for this subcommand\n");
            return 2;
        }
        scenario::Scenario sc = scenario::load_scenario(config);
        if (!checks.empty()) sc.checks = only;

        if (sim->parsed()) return cmd_simulate(sc, out_dir);
        if (den->parsed()) return cmd_density(sc, out_dir, cache_ptr);
        if (dmp->parsed()) return cmd_dump_kernel(sc, out_dir);
        if (pro->parsed()) {
            const auto rep = pipeline::run_scenario(sc, out_dir, cache_ptr);
            return rep.all_pass() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
