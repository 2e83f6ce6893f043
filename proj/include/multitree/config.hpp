// Verdict thresholds.
//
// The pass/fail margins of the counterexample experiments (growth ratios,
// stability factors, the level-set violation margin) live in a config file
// rather than in code; configs/verdicts.json in the repository is the
// canonical copy and the built-in values below mirror it.

#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace multitree {

struct VerdictConfig {
    // counterexample growth: measured ratio between consecutive scales
    double small_energy_growth_min = 1.5;
    double partial_energy_growth_min = 1.5;
    // stability of measured constants across scales (max/min)
    double stability_factor = 2.0;
    // required violation margin over the tree level-set theorem
    double levelset_margin = 10.0;
    // factor-2 window for the depth comparison of the majorization constant
    double d1_stability_factor = 2.0;
};

inline VerdictConfig load_verdict_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open verdict config: " + path);
    nlohmann::json j;
    in >> j;
    VerdictConfig c;
    c.small_energy_growth_min = j.at("small_energy_growth_min").get<double>();
    c.partial_energy_growth_min = j.at("partial_energy_growth_min").get<double>();
    c.stability_factor = j.at("stability_factor").get<double>();
    c.levelset_margin = j.at("levelset_margin").get<double>();
    c.d1_stability_factor = j.at("d1_stability_factor").get<double>();
    return c;
}

// Falls back to the built-in mirror when no file is given.
inline VerdictConfig load_verdict_config_or_default(const std::string& path) {
    if (path.empty()) return VerdictConfig{};
    return load_verdict_config(path);
}

}  // namespace multitree
