#include "orra/error.hpp"
#include "orra/grid_sim.hpp"

#include <doctest.h>

#include <cmath>

using namespace orra::grid;

namespace {

std::array<AreaInputs, 2> load_on_area1(const GridParams& p, double mw) {
    std::array<AreaInputs, 2> in;
    for (std::size_t a = 0; a < 2; ++a) in[a].du_gov.assign(p.areas[a].generators.size(), 0.0);
    in[0].disturbance = mw;
    return in;
}

std::vector<double> df_trajectory(const GridParams& p, double mw, int steps) {
    auto s = GridState::zero(p);
    const auto in = load_on_area1(p, mw);
    std::vector<double> out;
    for (int k = 0; k < steps; ++k) {
        s = grid_step(s, in, p, 0.01);
        out.push_back(s.areas[0].df);
    }
    return out;
}

}  // namespace

TEST_CASE("governor and turbine") {
    GeneratorParams p;
    GeneratorState s;
    for (int k = 0; k < 1000; ++k) governor_turbine_step(s, 0.0, 0.0, p, 0.01);
    CHECK(s.pm == 0.0);

    GeneratorParams fast = p;
    fast.ramp = 1e6;
    GeneratorState u;
    for (int k = 0; k < 2000; ++k) governor_turbine_step(u, 1.0, 0.0, fast, 0.01);
    CHECK(u.pm == doctest::Approx(1.0).epsilon(1e-9));

    // Droop: steady state du - df / R.
    GeneratorState d;
    for (int k = 0; k < 2000; ++k) governor_turbine_step(d, 1.0, 0.01, fast, 0.01);
    CHECK(d.pm == doctest::Approx(1.0 - 0.2).epsilon(1e-9));
}

TEST_CASE("ramp calibration") {
    GeneratorParams single;
    single.ramp = 0.027;
    GeneratorState s;
    for (int k = 0; k < 10000; ++k) governor_turbine_step(s, 10.0, 0.0, single, 0.01);
    CHECK(s.pm == doctest::Approx(2.7).epsilon(0.2));

    // Default area: three units at 0.009 MW/s each, sharing the command.
    AreaParams area;
    CHECK(area.aggregate_ramp() == doctest::Approx(0.027));
    std::vector<GeneratorState> units(area.generators.size());
    for (int k = 0; k < 10000; ++k) {
        for (std::size_t g = 0; g < units.size(); ++g) {
            governor_turbine_step(units[g], 10.0 * area.sigma[g], 0.0, area.generators[g], 0.01);
        }
    }
    double total = 0.0;
    for (const auto& u : units) total += u.pm;
    CHECK(total == doctest::Approx(2.7).epsilon(0.2));
}

TEST_CASE("ramp limit engages for large commands") {
    GeneratorParams limited;
    GeneratorParams linear = limited;
    linear.ramp = 1e9;
    linear.saturation = 1e9;
    GeneratorState a, b;
    double worst = 0.0, scale = 0.0;
    for (int k = 0; k < 3000; ++k) {
        governor_turbine_step(a, 10.0, 0.0, limited, 0.01);
        governor_turbine_step(b, 10.0, 0.0, linear, 0.01);
        worst = std::max(worst, std::abs(a.pm - b.pm));
        scale = std::max(scale, std::abs(b.pm));
    }
    CHECK(worst > 0.1 * scale);
}

TEST_CASE("sectional droop") {
    FrrSpec spec;
    CHECK(frr_response(0.005, spec) == 0.0);
    CHECK(frr_response(-0.01, spec) == 0.0);
    CHECK(frr_response(-0.05, spec) == doctest::Approx(1.6));
    for (double x : {0.003, 0.02, 0.07, 0.3}) CHECK(frr_response(-x, spec) == -frr_response(x, spec));
    spec.enabled = false;
    CHECK(frr_response(-0.05, spec) == 0.0);
}

TEST_CASE("zero input keeps the zero state") {
    GridParams p;
    auto s = GridState::zero(p);
    const auto in = load_on_area1(p, 0.0);
    for (int k = 0; k < 5000; ++k) s = grid_step(s, in, p, 0.01);
    CHECK(s.areas[0].df == 0.0);
    CHECK(s.areas[1].df == 0.0);
    CHECK(s.ptie == 0.0);
    CHECK(s.areas[0].pm_sum() == 0.0);
}

TEST_CASE("steady state of a sustained load step without AGC") {
    GridParams p;
    const auto df = df_trajectory(p, 5.0, 200000);
    // Both areas settle at the same df; total stiffness 2 (D + sum 1/R) plus
    // the two FRR blocks beyond their deadband.
    const double stiff = 2.0 * p.areas[0].bias();
    const double frr = 2.0 * p.areas[0].frr.slope;
    const double expect = -(5.0 + frr * p.areas[0].frr.deadband) / (stiff + frr);
    CHECK(df.back() == doctest::Approx(expect).epsilon(1e-4));
}

TEST_CASE("swing residual vanishes") {
    GridParams p;
    auto s = GridState::zero(p);
    auto in = load_on_area1(p, 3.0);
    in[0].bess_mw = 0.7;
    for (int k = 0; k < 500; ++k) {
        const auto next = grid_step(s, in, p, 0.01);
        for (std::size_t a = 0; a < 2; ++a) {
            CHECK(std::abs(swing_residual(s, next, a, in[a], p, 0.01)) < 1e-9);
        }
        s = next;
    }
}

TEST_CASE("small-signal linearity") {
    GridParams p;
    const auto one = df_trajectory(p, 1e-3, 3000);
    const auto two = df_trajectory(p, 2e-3, 3000);
    double worst = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < one.size(); ++k) {
        worst = std::max(worst, std::abs(two[k] - 2.0 * one[k]));
        scale = std::max(scale, std::abs(two[k]));
    }
    CHECK(worst <= 1e-6 * scale);
}

TEST_CASE("instability is reported by name") {
    GridParams p;
    auto s = GridState::zero(p);
    auto in = load_on_area1(p, NAN);
    try {
        grid_step(s, in, p, 0.01);
        FAIL("expected InstabilityError");
    } catch (const orra::InstabilityError& e) {
        CHECK(std::string(e.what()).find("area1") != std::string::npos);
    }
    CHECK_THROWS_AS(grid_step(s, load_on_area1(p, 0.0), p, 0.0), orra::ParameterError);
}

TEST_CASE("agc integrator is rate limited") {
    AgcController agc;
    agc.step(100.0, 0.1, 0.027, 1.0);
    CHECK(agc.setpoint == doctest::Approx(-0.027));
    agc.step(-0.1, 0.1, 0.027, 1.0);
    CHECK(agc.setpoint == doctest::Approx(-0.017));
}

TEST_CASE("scenarios") {
    CHECK(scenario_step_load(9.9) == 0.0);
    CHECK(scenario_step_load(10.1) == 5.0);
    for (double t = 0.0; t < 1800.0; t += 7.3) {
        const double v = scenario_fluctuation(t, 42);
        CHECK(v >= -6.0);
        CHECK(v <= 6.0);
        CHECK(v == scenario_fluctuation(t, 42));
    }
    CHECK(scenario_fluctuation(5.0, 42) == scenario_fluctuation(55.0, 42));
    CHECK(scenario_fluctuation(5.0, 1) != scenario_fluctuation(5.0, 2));
}

TEST_CASE("parameter validation") {
    AreaParams a;
    a.sigma = {0.5, 0.5, 0.5};
    CHECK_THROWS_AS(a.validate(), orra::ParameterError);
    a = {};
    a.generators[1].ramp = 0.0;
    CHECK_THROWS_AS(a.validate(), orra::ParameterError);
}
