#pragma once

#include "orra/config.hpp"
#include "orra/oracle_regret.hpp"
#include "orra/trace.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace orra::harness {

struct RunResult {
    Trace trace;
    std::size_t oracle_clamped = 0;  // iterations whose target was outside the fleet range
    double first_clamp_time = -1.0;
};

/// Closed loop: grid measurement, injection error, mode selection, one
/// optimizer iteration, battery update, AGC and grid integration. One trace
/// row per control interval plus a closing row.
RunResult simulate(const ScenarioConfig& config);

/// Directory named by ORRA_OUTPUT_DIR, else ./orra_out.
std::filesystem::path output_dir();

/// Writes `<name>.csv` into `out_dir` and returns its path.
std::filesystem::path run_scenario(const ScenarioConfig& config,
                                   const std::filesystem::path& out_dir);

/// Summary of one run: nadir, settling, signal RMS values.
nlohmann::json run_summary(const ScenarioConfig& config, const Trace& trace);

struct AblationArm {
    std::string label;
    Signal signal;
    bool bess;
};
const std::vector<AblationArm>& ablation_arms();

/// Runs AIE+BESS, ACE+BESS, AIE, ACE on the same seed. Writes one trace per
/// arm and returns the comparison summary.
nlohmann::json run_ablation(const ScenarioConfig& config, const std::filesystem::path& out_dir,
                            std::vector<Trace>* traces = nullptr);

/// Regret at each horizon (iterations counted from the scenario start time),
/// fitted slope and per-stage lemma checks.
nlohmann::json run_regret_study(const ScenarioConfig& config, const std::vector<long>& horizons,
                                const Trace* precomputed = nullptr);

}  // namespace orra::harness
