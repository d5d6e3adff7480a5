#pragma once

#include "orra/aie_signal.hpp"
#include "orra/bess.hpp"
#include "orra/comm_graph.hpp"
#include "orra/degradation.hpp"
#include "orra/grid_sim.hpp"
#include "orra/orra.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace orra::harness {

enum class Signal { Aie, Ace };
enum class ScenarioKind { None, Step, Fluctuation };

/// Where a battery sits in area 1. Generator buses take their own injection
/// error; other buses copy the mode of generator bus `follows` after `hops`
/// control intervals.
struct BusPlacement {
    bool generator = true;
    std::size_t index = 0;  // generator index (own bus or followed bus)
    std::size_t hops = 0;

    bool operator==(const BusPlacement&) const = default;
};

struct BatteryConfig {
    bess::BessParams params;
    double initial_soc = 0.5;
    BusPlacement bus;
};

struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::Step;
    double start_s = 10.0;
    double magnitude_mw = 5.0;
    double amplitude_mw = 6.0;
    double hold_s = 60.0;
    bool antithetic = false;  // odd holds repeat the previous draw with opposite sign

    /// Net-load disturbance of area 1 at time t.
    double disturbance(double t, std::uint64_t seed) const;
};

struct AieConfig {
    double d_prime_fraction = 0.015;  // of area load, per Hz
    bool surrogate = true;
    aie::RbfSettings rbf;
    double mode_sign = -1.0;
    double frr_measurement_sign = -1.0;
};

struct ScenarioConfig {
    std::string name = "scenario";
    std::uint64_t seed = 1;
    double duration_s = 300.0;
    double tau_s = 0.1;
    int substeps = 10;
    Signal signal = Signal::Aie;
    bool bess_enabled = true;
    bool log_oracle = true;
    ScenarioSpec scenario;
    std::vector<BatteryConfig> fleet;
    degradation::AgingParams aging;
    comm::Topology topology;
    grid::GridParams grid;
    AieConfig aie;
    opt::LearningSchedule optimizer;

    std::size_t steps() const;
    /// Throws a ConfigError subclass naming the first violated rule.
    void validate() const;
};

/// Unknown keys are rejected; missing keys take defaults. Throws ConfigError.
ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ScenarioConfig& config);
void save_config(const ScenarioConfig& config, const std::filesystem::path& path);

/// Five batteries, ring-plus-chord graph, 5 MW step at 10 s, 300 s.
ScenarioConfig case_study_1();
/// Same fleet, 30 minutes of uniform +-6 MW fluctuations.
ScenarioConfig case_study_2();

}  // namespace orra::harness
