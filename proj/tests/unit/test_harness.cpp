#include "orra/analysis.hpp"
#include "orra/config.hpp"
#include "orra/error.hpp"
#include "orra/figures.hpp"
#include "orra/harness.hpp"
#include "orra/trace.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace orra;
using namespace orra::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("orra_unit_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ScenarioConfig short_case1(double duration) {
    auto cfg = case_study_1();
    cfg.duration_s = duration;
    return cfg;
}

}  // namespace

TEST_CASE("shipped configs match the presets") {
    const fs::path root = ORRA_SOURCE_DIR;
    CHECK(to_json(load_config(root / "configs/case_study_1.json")) == to_json(case_study_1()));
    CHECK(to_json(load_config(root / "configs/case_study_2.json")) == to_json(case_study_2()));
}

TEST_CASE("config round trip") {
    for (const auto& cfg : {case_study_1(), case_study_2()}) {
        const auto j = to_json(cfg);
        CHECK(to_json(parse_config(j)) == j);
    }
    const auto dir = scratch("config");
    save_config(case_study_2(), dir / "c2.json");
    CHECK(to_json(load_config(dir / "c2.json")) == to_json(case_study_2()));
}

TEST_CASE("config errors") {
    auto j = to_json(case_study_1());
    j["surprise"] = 1;
    CHECK_THROWS_AS(parse_config(j), ConfigError);

    auto bad_exp = to_json(case_study_1());
    bad_exp["optimizer"]["alpha"] = 0.2;
    CHECK_THROWS_AS(parse_config(bad_exp), ConfigError);

    auto bad_soc = case_study_1();
    bad_soc.fleet[0].initial_soc = 0.95;
    CHECK_THROWS_AS(bad_soc.validate(), ConfigError);

    auto split = case_study_1();
    split.topology.edges = {{0, 1}, {2, 3}};
    CHECK_THROWS_AS(split.validate(), ConfigError);

    CHECK_THROWS_AS(load_config("/nonexistent/orra.json"), ConfigError);
}

TEST_CASE("fluctuation scenario") {
    const auto cfg = case_study_2();
    const auto& s = cfg.scenario;
    CHECK(s.kind == ScenarioKind::Fluctuation);
    for (double t = 0.0; t < cfg.duration_s; t += 13.0) {
        const double v = s.disturbance(t, cfg.seed);
        CHECK(std::abs(v) <= 6.0);
        CHECK(v == s.disturbance(t, cfg.seed));
    }
    if (s.antithetic) {
        const double t0 = s.start_s + 1.0;
        CHECK(s.disturbance(t0 + s.hold_s, cfg.seed) == -s.disturbance(t0, cfg.seed));
    }
    auto step = case_study_1().scenario;
    CHECK(step.disturbance(9.9, 1) == 0.0);
    CHECK(step.disturbance(10.1, 1) == 5.0);
}

TEST_CASE("trace csv round trip and schema line") {
    Trace t({"a", "b"});
    t.meta["name"] = "x";
    t.meta["event_s"] = "10";
    t.add_row({1.0, 0.1});
    t.add_row({NAN, -2.5e-17});
    const auto csv = t.to_csv();
    CHECK(csv.rfind("# ", 0) == 0);
    CHECK(csv.find("schema") != std::string::npos);
    const auto back = Trace::parse_csv(csv);
    CHECK(back.rows() == 2);
    CHECK(back.at(0, "b") == 0.1);
    CHECK(std::isnan(back.at(1, "a")));
    CHECK(back.at(1, "b") == -2.5e-17);
    CHECK(back.meta_number("event_s") == 10.0);
    CHECK(back.to_csv() == csv);

    CHECK_THROWS_AS(Trace::parse_csv("a,b\n1,2\n"), IncompleteTraceError);
    CHECK_THROWS_AS(Trace::parse_csv(csv + "1\n"), IncompleteTraceError);
    CHECK_THROWS_AS(t.index("nope"), IncompleteTraceError);
    CHECK_THROWS_AS(t.add_row({1.0}), DimensionError);
}

TEST_CASE("output directory variable") {
    ::setenv("ORRA_OUTPUT_DIR", "/tmp/orra_unit_env", 1);
    CHECK(output_dir() == fs::path("/tmp/orra_unit_env"));
    ::unsetenv("ORRA_OUTPUT_DIR");
    CHECK(output_dir() == fs::path("orra_out"));
}

TEST_CASE("runs are deterministic and the schema is stable") {
    const auto cfg = short_case1(30.0);
    const auto dir_a = scratch("det_a");
    const auto dir_b = scratch("det_b");
    const auto a = run_scenario(cfg, dir_a);
    const auto b = run_scenario(cfg, dir_b);
    CHECK(slurp(a) == slurp(b));

    auto other = case_study_2();
    other.duration_s = 20.0;
    CHECK(simulate(other).trace.columns() == simulate(cfg).trace.columns());
}

TEST_CASE("zero-disturbance run stays at rest") {
    auto cfg = case_study_1();
    cfg.duration_s = 10.0;
    cfg.scenario.kind = ScenarioKind::None;
    const auto trace = simulate(cfg).trace;
    for (const char* col : {"df1_hz", "df2_hz", "ptie_mw", "pm1_mw", "pbess_mw", "aie1_mw",
                            "target_mw", "agc1_mw", "disturbance_mw"}) {
        for (double v : trace.column(col)) CHECK(v == 0.0);
    }
    for (std::size_t i = 0; i < cfg.fleet.size(); ++i) {
        for (double v : trace.column("d_" + std::to_string(i))) CHECK(v == 0.0);
        for (double v : trace.column("lambda_" + std::to_string(i))) CHECK(v == 0.0);
        const auto soc = trace.column("soc_" + std::to_string(i));
        for (double v : soc) CHECK(v == cfg.fleet[i].initial_soc);
    }
}

TEST_CASE("case study 1 qualitative shape") {
    const auto run = simulate(case_study_1());
    const auto& trace = run.trace;
    CHECK(check_fleet(trace).ok);
    const auto p = trace.column("pbess_mw");
    const std::size_t event = row_at_time(trace, 10.0);
    double peak = 0.0;
    for (std::size_t r = event; r < p.size(); ++r) peak = std::max(peak, p[r]);
    CHECK(peak > 0.5);
    CHECK(std::abs(p.back()) < 1e-2);
    CHECK(withdrawal_time(trace) < 300.0);
    CHECK(max_tracking_error(trace) <= 1e-9);
    CHECK(check_dual_bound(trace).violations == 0);

    const auto summary = run_summary(case_study_1(), trace);
    CHECK(summary.contains("nadir_hz"));
    CHECK(summary.contains("settling_s"));
}

TEST_CASE("ablation arms share the disturbance") {
    const auto cfg = short_case1(60.0);
    std::vector<Trace> traces;
    const auto dir = scratch("ablation");
    const auto summary = run_ablation(cfg, dir, &traces);
    REQUIRE(traces.size() == 4);
    for (const auto& t : traces) CHECK(t.column("disturbance_mw") == traces[0].column("disturbance_mw"));
    CHECK(summary["arms"].size() == 4);
    CHECK(summary.contains("bess_reduces_nadir"));
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dir)) files += e.path().extension() == ".csv";
    CHECK(files >= 4);
}

TEST_CASE("regret study report") {
    const auto cfg = short_case1(60.0);
    const auto report = run_regret_study(cfg, {100, 200, 300, 450});
    CHECK(report["regret"].size() == 4);
    CHECK(report.contains("slope"));
    CHECK(report.contains("lemmas_hold"));
}

TEST_CASE("verify report on a written trace") {
    auto cfg = case_study_2();
    cfg.duration_s = 120.0;
    const auto dir = scratch("verify");
    const auto path = run_scenario(cfg, dir);
    const auto report = verify_report(Trace::read_csv(path));
    CHECK(report["fleet"]["ok"].get<bool>());
    CHECK(report["tracking"]["ok"].get<bool>());
}

TEST_CASE("figure files") {
    const auto dir = scratch("figures");
    const auto trace = simulate(short_case1(40.0)).trace;
    write_fig5(trace, dir);
    for (const char* stem : {"fig5a", "fig5b", "fig5c"}) {
        CHECK(fs::exists(dir / (std::string(stem) + ".csv")));
        const auto svg = slurp(dir / (std::string(stem) + ".svg"));
        CHECK(svg.find("<svg") != std::string::npos);
        CHECK(svg.find("</svg>") != std::string::npos);
    }
}
