#pragma once

#include "invdamp/cutoffs.hpp"
#include "invdamp/density.hpp"
#include "invdamp/flow.hpp"
#include "invdamp/io.hpp"
#include "invdamp/vorticity.hpp"

#include <json.hpp>

#include <array>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace invdamp::scenario {

using nlohmann::json;

struct Scenario {
    std::string name = "unnamed";
    // flow
    flow::Family family = flow::Family::couette;
    double amplitude = 0.0, flow_center = 0.5, flow_width = 0.2;
    // vorticity
    flow::VorticityProfile profile;
    std::array<int, 2> vanishing{0, 0};
    // modes and cutoffs
    std::vector<int> ks{1};
    double delta0 = 0.05;
    // ladder
    density::LadderSpec ladder;
    // outputs
    int channel_nodes = 201;
    std::vector<double> times{0.0, 1.0, 2.0, 5.0, 10.0};
    std::vector<std::string> checks;  // empty = "none"
    std::uint64_t seed = 0;
    double memory_cap_mb = 4096.0;

    json canonical() const;
    std::string config_hash() const { return io::hex64(io::fnv1a(canonical().dump())); }
};

inline json Scenario::canonical() const {
    json j;
    j["name"] = name;
    j["flow"] = {{"family", family == flow::Family::couette ? "couette" : "perturbed_couette"},
                 {"amplitude", amplitude},
                 {"center", flow_center},
                 {"width", flow_width}};
    const char* kinds[] = {"bump", "constant", "poly", "plateau"};
    j["vorticity"] = {{"profile", kinds[static_cast<int>(profile.kind)]},
                      {"scale", profile.scale},
                      {"center", profile.center},
                      {"width", profile.width},
                      {"p0", profile.p0},
                      {"p1", profile.p1},
                      {"plateau", {profile.out_lo, profile.in_lo, profile.in_hi, profile.out_hi}},
                      {"vanishing", vanishing}};
    j["k"] = ks;
    j["delta0"] = delta0;
    j["ladder"] = {{"eps0", ladder.eps0},       {"rungs", ladder.rungs},
                   {"ratio", ladder.ratio},     {"kappa", ladder.kappa},
                   {"w_margin", ladder.w_margin}, {"w_nodes", ladder.w_nodes_override}};
    j["channel_nodes"] = channel_nodes;
    j["times"] = times;
    j["checks"] = checks;
    j["seed"] = seed;
    j["memory_cap_mb"] = memory_cap_mb;
    return j;
}

inline Scenario parse_scenario(const json& j) {
    Scenario s;
    try {
        s.name = j.value("name", std::string("unnamed"));
        if (j.contains("flow")) {
            const auto& f = j.at("flow");
            const std::string fam = f.value("family", std::string("couette"));
            if (fam == "couette") {
                s.family = flow::Family::couette;
            } else if (fam == "perturbed_couette") {
                s.family = flow::Family::perturbed_couette;
            } else {
                throw std::invalid_argument("unknown flow family: " + fam);
            }
            s.amplitude = f.value("amplitude", 0.0);
            s.flow_center = f.value("center", 0.5);
            s.flow_width = f.value("width", 0.2);
        }
        if (j.contains("vorticity")) {
            const auto& v = j.at("vorticity");
            const std::string kind = v.value("profile", std::string("bump"));
            if (kind == "bump") s.profile.kind = flow::VorticityProfile::Kind::bump;
            else if (kind == "constant") s.profile.kind = flow::VorticityProfile::Kind::constant;
            else if (kind == "poly") s.profile.kind = flow::VorticityProfile::Kind::poly;
            else if (kind == "plateau") s.profile.kind = flow::VorticityProfile::Kind::plateau;
            else throw std::invalid_argument("unknown vorticity profile: " + kind);
            s.profile.scale = v.value("scale", 1.0);
            s.profile.center = v.value("center", 0.5);
            s.profile.width = v.value("width", 0.2);
            s.profile.p0 = v.value("p0", 1);
            s.profile.p1 = v.value("p1", 1);
            if (v.contains("plateau")) {
                const auto p = v.at("plateau").get<std::vector<double>>();
                if (p.size() != 4) throw std::invalid_argument("plateau needs 4 breakpoints");
                s.profile.out_lo = p[0];
                s.profile.in_lo = p[1];
                s.profile.in_hi = p[2];
                s.profile.out_hi = p[3];
            }
            if (v.contains("vanishing")) {
                const auto o = v.at("vanishing").get<std::vector<int>>();
                if (o.size() != 2) throw std::invalid_argument("vanishing needs 2 orders");
                s.vanishing = {o[0], o[1]};
            }
        }
        if (j.contains("k")) s.ks = j.at("k").get<std::vector<int>>();
        s.delta0 = j.value("delta0", 0.05);
        if (j.contains("ladder")) {
            const auto& l = j.at("ladder");
            s.ladder.eps0 = l.value("eps0", 0.1);
            s.ladder.rungs = l.value("rungs", 5);
            s.ladder.ratio = l.value("ratio", 0.5);
            s.ladder.kappa = l.value("kappa", 3.5);
            s.ladder.w_margin = l.value("w_margin", 0.3);
            s.ladder.w_nodes_override = l.value("w_nodes", 0);
        }
        s.channel_nodes = j.value("channel_nodes", 201);
        if (j.contains("times")) s.times = j.at("times").get<std::vector<double>>();
        if (j.contains("checks")) {
            if (j.at("checks").is_string()) {
                if (j.at("checks").get<std::string>() != "none")
                    s.checks = {j.at("checks").get<std::string>()};
            } else {
                s.checks = j.at("checks").get<std::vector<std::string>>();
            }
        }
        s.seed = j.value("seed", 0ull);
        s.memory_cap_mb = j.value("memory_cap_mb", 4096.0);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config schema violation: ") + e.what());
    }
    if (s.ks.empty()) throw std::invalid_argument("config: k list must be nonempty");
    for (int k : s.ks)
        if (k < 1) throw std::invalid_argument("config: k must be positive");
    if (s.channel_nodes < 17) throw std::invalid_argument("config: channel_nodes >= 17");
    return s;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    json j;
    in >> j;
    return parse_scenario(j);
}

/// Instantiated per-k working set.
struct ModeSetup {
    int k = 1;
    flow::ShearFlow flw;
    flow::CutoffSet cut;
    flow::VorticityMode mode;
};

inline ModeSetup instantiate(const Scenario& s, int k) {
    ModeSetup m;
    m.k = k;
    m.flw = flow::build_flow(s.family, s.amplitude, s.flow_center, s.flow_width);
    m.cut = flow::build_cutoffs(k, s.delta0, m.flw);
    m.mode = flow::build_vorticity(s.profile, k, s.vanishing);
    return m;
}

/// Estimated footprint of the ladder fields (both iota branches plus two
/// boundary responses); the resource guard for run_scenario.
inline double ladder_megabytes(const density::AbsorptionContext& ctx) {
    double bytes = 0.0;
    for (const auto& r : ctx.rungs)
        bytes += 16.0 * static_cast<double>(r.v.n) * r.w.n * 4.0;
    return bytes / (1024.0 * 1024.0);
}

}  // namespace invdamp::scenario
