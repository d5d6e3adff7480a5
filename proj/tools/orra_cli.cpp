// Command-line front end: run, ablation, regret, verify, validate, preset.
#include "orra/analysis.hpp"
#include "orra/config.hpp"
#include "orra/error.hpp"
#include "orra/figures.hpp"
#include "orra/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

namespace {

using namespace orra;
using namespace orra::harness;

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

int cmd_run(const std::string& config_path) {
    const auto cfg = load_config(config_path);
    const auto dir = output_dir();
    const auto start = std::chrono::steady_clock::now();
    const auto result = simulate(cfg);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.trace.write_csv(dir / (cfg.name + ".csv"));
    auto summary = run_summary(cfg, result.trace);
    summary["wall_clock_s"] = wall;
    summary["oracle_clamped_steps"] = result.oracle_clamped;
    const auto fleet = check_fleet(result.trace);
    summary["fleet_ok"] = fleet.ok;
    if (cfg.scenario.kind == ScenarioKind::Step && cfg.bess_enabled) write_fig5(result.trace, dir);
    if (cfg.scenario.kind == ScenarioKind::Fluctuation) write_fig7(result.trace, dir);
    write_json(dir / (cfg.name + "_summary.json"), summary);
    std::cout << summary.dump(2) << '\n';
    return fleet.ok ? kOk : kNumericalError;
}

int cmd_ablation(const std::string& config_path) {
    const auto cfg = load_config(config_path);
    const auto dir = output_dir();
    std::vector<Trace> traces;
    const auto report = run_ablation(cfg, dir, &traces);
    std::vector<std::string> labels;
    for (const auto& arm : ablation_arms()) labels.push_back(arm.label);
    write_fig6(traces, labels, dir);
    write_json(dir / (cfg.name + "_ablation.json"), report);
    std::cout << report.dump(2) << '\n';
    return kOk;
}

int cmd_regret(const std::string& config_path, const std::vector<long>& horizons) {
    const auto cfg = load_config(config_path);
    const auto report = run_regret_study(cfg, horizons);
    write_json(output_dir() / (cfg.name + "_regret.json"), report);
    std::cout << report.dump(2) << '\n';
    return kOk;
}

int cmd_verify(const std::string& trace_path) {
    const auto trace = Trace::read_csv(trace_path);
    const auto report = verify_report(trace);
    std::cout << report.dump(2) << '\n';
    return report.value("pass", false) ? kOk : kNumericalError;
}

int cmd_validate(const std::string& config_path) {
    const auto cfg = load_config(config_path);
    std::cout << "ok: " << cfg.name << ", " << cfg.fleet.size() << " batteries, " << cfg.steps()
              << " control intervals\n";
    return kOk;
}

int cmd_preset(const std::string& which) {
    if (which == "case1") {
        std::cout << to_json(case_study_1()).dump(2) << '\n';
    } else if (which == "case2") {
        std::cout << to_json(case_study_2()).dump(2) << '\n';
    } else {
        throw ConfigError("unknown preset '" + which + "' (case1, case2)");
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed BESS allocation for AGC: simulation and checks"};
    app.require_subcommand(1);

    std::string path;
    std::vector<long> horizons;
    std::string preset;

    auto* run = app.add_subcommand("run", "Simulate one scenario and write its trace");
    run->add_option("config", path, "Scenario JSON")->required();
    auto* ablation = app.add_subcommand("ablation", "AIE/ACE with and without BESS");
    ablation->add_option("config", path, "Scenario JSON")->required();
    auto* regret = app.add_subcommand("regret", "Dynamic regret at several horizons");
    regret->add_option("config", path, "Scenario JSON")->required();
    regret->add_option("--horizons", horizons, "Iterations after the event")->required();
    auto* verify = app.add_subcommand("verify", "Check invariants of a trace CSV");
    verify->add_option("trace", path, "Trace CSV")->required();
    auto* validate = app.add_subcommand("validate", "Parse and validate a scenario JSON");
    validate->add_option("config", path, "Scenario JSON")->required();
    auto* pre = app.add_subcommand("preset", "Print a built-in scenario as JSON");
    pre->add_option("name", preset, "case1 or case2")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*run) return cmd_run(path);
        if (*ablation) return cmd_ablation(path);
        if (*regret) return cmd_regret(path, horizons);
        if (*verify) return cmd_verify(path);
        if (*validate) return cmd_validate(path);
        if (*pre) return cmd_preset(preset);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const IncompleteTraceError& e) {
        std::cerr << "trace error: " << e.what() << '\n';
        return kConfigError;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumericalError;
    }
    return kOk;
}
