// Experiment reports and their CSV / JSON serialization.
//
// A report is an ordered list of parameters (strings), measured quantities
// (doubles) and verdicts (booleans); every verdict is a recomputable
// inequality over the measured values. Serialization is deterministic:
// fixed field order, shortest round-trip formatting for doubles, and no
// wall-clock data in the files (timings go to stderr), so two runs with
// the same parameters and seed produce byte-identical files.

#pragma once

#include <charconv>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace multitree {

inline const char* engine_version() { return "multitree 0.1.0"; }

struct ExperimentReport {
    std::string id;
    std::vector<std::pair<std::string, std::string>> parameters;
    std::vector<std::pair<std::string, double>> measured;
    std::vector<std::pair<std::string, bool>> verdicts;
    std::string generator;  // empty when the experiment is deterministic
    std::uint64_t seed = 0;
    double runtime_ms = 0.0;  // reported on stderr only

    void param(std::string key, std::string value) {
        parameters.emplace_back(std::move(key), std::move(value));
    }
    void param(std::string key, std::uint64_t value) {
        parameters.emplace_back(std::move(key), std::to_string(value));
    }
    void measure(std::string key, double value) {
        measured.emplace_back(std::move(key), value);
    }
    void verdict(std::string key, bool pass) { verdicts.emplace_back(std::move(key), pass); }

    double measured_value(const std::string& key) const {
        for (const auto& [k, v] : measured)
            if (k == key) return v;
        throw std::out_of_range("report has no measured value " + key);
    }

    bool all_pass() const {
        for (const auto& [k, v] : verdicts)
            if (!v) return false;
        return true;
    }
};

// Shortest representation that round-trips exactly.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline nlohmann::ordered_json report_json(const ExperimentReport& r) {
    nlohmann::ordered_json j;
    j["experiment"] = r.id;
    j["engine"] = engine_version();
    if (!r.generator.empty()) {
        j["generator"] = r.generator;
        j["seed"] = r.seed;
    }
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.parameters) params[k] = v;
    j["parameters"] = params;
    nlohmann::ordered_json meas = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.measured) meas[k] = v;
    j["measured"] = meas;
    nlohmann::ordered_json verd = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.verdicts) verd[k] = v;
    j["verdicts"] = verd;
    return j;
}

inline nlohmann::ordered_json reports_json(const std::vector<ExperimentReport>& rs) {
    nlohmann::ordered_json j;
    j["engine"] = engine_version();
    j["reports"] = nlohmann::ordered_json::array();
    for (const auto& r : rs) j["reports"].push_back(report_json(r));
    return j;
}

// Long-format CSV, one row per field:
//   experiment,section,key,value
// with section one of param / measured / verdict; the JSON output mirrors
// these rows exactly.
inline void write_csv_header(std::ostream& out) { out << "experiment,section,key,value\n"; }

inline void write_csv(std::ostream& out, const ExperimentReport& r) {
    if (!r.generator.empty()) {
        out << r.id << ",param,generator," << r.generator << '\n';
        out << r.id << ",param,seed," << r.seed << '\n';
    }
    for (const auto& [k, v] : r.parameters)
        out << r.id << ",param," << k << ',' << v << '\n';
    for (const auto& [k, v] : r.measured)
        out << r.id << ",measured," << k << ',' << format_double(v) << '\n';
    for (const auto& [k, v] : r.verdicts)
        out << r.id << ",verdict," << k << ',' << (v ? "true" : "false") << '\n';
}

}  // namespace multitree
