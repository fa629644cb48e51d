#pragma once

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace invdamp::report {

using nlohmann::json;

struct CheckResult {
    std::string id;
    bool pass = false;
    json measured;  // named measured values and thresholds
};

struct RunReport {
    std::string scenario;
    std::string config_hash;
    json manifest;  // grids, versions, cache state
    std::vector<CheckResult> checks;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

inline json to_json(const RunReport& r) {
    json j;
    j["scenario"] = r.scenario;
    j["config_hash"] = r.config_hash;
    j["manifest"] = r.manifest;
    j["checks"] = json::array();
    for (const auto& c : r.checks)
        j["checks"].push_back({{"id", c.id}, {"pass", c.pass}, {"measured", c.measured}});
    return j;
}

inline RunReport from_json(const json& j) {
    RunReport r;
    r.scenario = j.at("scenario").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.manifest = j.at("manifest");
    for (const auto& c : j.at("checks"))
        r.checks.push_back({c.at("id").get<std::string>(), c.at("pass").get<bool>(),
                            c.at("measured")});
    return r;
}

inline void write_report(const std::filesystem::path& path, const RunReport& r) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_report: cannot open " + path.string());
    out << to_json(r).dump(2) << "\n";
    if (!out) throw std::runtime_error("write_report: write failed for " + path.string());
}

inline RunReport read_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_report: cannot open " + path.string());
    json j;
    in >> j;
    return from_json(j);
}

}  // namespace invdamp::report
