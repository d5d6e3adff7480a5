// Python binding. Configs and reports cross the boundary as JSON text; the
// orra package wraps them into dicts.
#include "orra/analysis.hpp"
#include "orra/comm_graph.hpp"
#include "orra/config.hpp"
#include "orra/degradation.hpp"
#include "orra/error.hpp"
#include "orra/harness.hpp"
#include "orra/oracle_regret.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace py = pybind11;
using namespace orra;

namespace {

harness::ScenarioConfig config_from(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return harness::parse_config(j);
}

py::dict trace_dict(const harness::Trace& t) {
    py::dict columns;
    for (const auto& name : t.columns()) columns[py::str(name)] = t.column(name);
    py::dict out;
    out["columns"] = columns;
    out["meta"] = std::map<std::string, std::string>(t.meta.begin(), t.meta.end());
    return out;
}

}  // namespace

PYBIND11_MODULE(_orra, m) {
    m.doc() = "Distributed online BESS coordination for AGC: simulator, optimizer and checks.";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.attr("TRACE_SCHEMA_VERSION") = harness::kTraceSchemaVersion;

    m.def("preset", [](const std::string& name) {
        if (name == "case1") return harness::to_json(harness::case_study_1()).dump();
        if (name == "case2") return harness::to_json(harness::case_study_2()).dump();
        throw ConfigError("unknown preset '" + name + "' (case1, case2)");
    }, py::arg("name"), "Preset scenario config as JSON text.");

    m.def("normalize_config", [](const std::string& text) {
        return harness::to_json(config_from(text)).dump();
    }, py::arg("config_json"), "Validate a config and return it with defaults filled in.");

    m.def("simulate", [](const std::string& text) {
        const auto cfg = config_from(text);
        harness::RunResult run;
        {
            py::gil_scoped_release release;
            run = harness::simulate(cfg);
        }
        auto out = trace_dict(run.trace);
        out["oracle_clamped"] = run.oracle_clamped;
        out["summary"] = harness::run_summary(cfg, run.trace).dump();
        return out;
    }, py::arg("config_json"), "Closed-loop run; returns trace columns, metadata and a JSON summary.");

    m.def("run_scenario", [](const std::string& text, const std::filesystem::path& out_dir) {
        const auto cfg = config_from(text);
        py::gil_scoped_release release;
        std::filesystem::create_directories(out_dir);
        return harness::run_scenario(cfg, out_dir);
    }, py::arg("config_json"), py::arg("out_dir"), "Writes <name>.csv and returns its path.");

    m.def("verify", [](const std::filesystem::path& trace_path) {
        return harness::verify_report(harness::Trace::read_csv(trace_path)).dump();
    }, py::arg("trace_path"), "Verification report of a trace CSV as JSON text.");

    m.def("read_trace", [](const std::filesystem::path& path) {
        return trace_dict(harness::Trace::read_csv(path));
    }, py::arg("path"));

    m.def("rainflow", [](const std::vector<double>& soc) {
        degradation::ResidueStack residues;
        std::vector<std::tuple<double, double>> events;
        long k = 0;
        for (double x : soc) {
            auto step = degradation::rainflow_step(x, k++, residues);
            for (const auto& e : step.closed) events.emplace_back(e.depth, e.n_cyc);
            residues = std::move(step.residues);
        }
        for (const auto& e : degradation::residual_half_cycles(residues))
            events.emplace_back(e.depth, e.n_cyc);
        return events;
    }, py::arg("soc"), "Streaming rainflow count plus the residue flush, as (depth, n_cyc) pairs.");

    m.def("metropolis_weights",
          [](std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
              const auto w = comm::build_metropolis_weights({n, edges});
              std::vector<std::vector<double>> out(n, std::vector<double>(n));
              for (std::size_t i = 0; i < n; ++i)
                  for (std::size_t j = 0; j < n; ++j) out[i][j] = w(i, j);
              return out;
          },
          py::arg("n"), py::arg("edges"));

    m.def("regret_slope", [](const std::vector<double>& horizons, const std::vector<double>& regret) {
        const auto fit = regret::regret_slope(horizons, regret);
        return std::make_tuple(fit.slope, fit.sublinear());
    }, py::arg("horizons"), py::arg("regret"), "Fitted log-log slope of |Reg| and the sublinear verdict.");
}
