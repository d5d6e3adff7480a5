#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace orra::grid {

/// One conventional generator: first-order governor and turbine with droop,
/// output ramp limit and saturation.
struct GeneratorParams {
    double droop_inv = 20.0;  // MW/Hz
    double t_gov = 0.2;       // s
    double t_turb = 0.5;      // s
    double ramp = 0.009;      // MW/s
    double saturation = 10.0; // MW

    void validate() const;
};

/// Sectional droop of the aggregated frequency-responsive resources.
struct FrrSpec {
    double deadband = 0.01;  // Hz
    double slope = 40.0;     // MW/Hz beyond the deadband
    bool enabled = true;

    void validate() const;
};

struct AreaParams {
    double two_h = 10.0;    // MW s/Hz
    double damping = 1.0;   // MW/Hz
    double load_mw = 100.0;
    double agc_gain = 0.1;  // 1/s
    std::vector<GeneratorParams> generators{3};
    std::vector<double> sigma{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    FrrSpec frr;

    /// D + sum 1/R, the constant frequency bias used by ACE.
    double bias() const;
    /// Aggregate ramp limit of the area's generators.
    double aggregate_ramp() const;
    void validate() const;
};

struct GridParams {
    std::array<AreaParams, 2> areas;
    double tie_sync = 2.0;  // MW/(Hz s)

    void validate() const;
};

struct GeneratorState {
    double gov = 0.0;  // governor output, MW
    double pm = 0.0;   // mechanical power deviation, MW

    bool operator==(const GeneratorState&) const = default;
};

struct AreaState {
    double df = 0.0;  // Hz
    std::vector<GeneratorState> generators;
    double frr = 0.0;          // FRR injection at the last step, MW
    double disturbance = 0.0;  // MW

    double pm_sum() const;
};

struct GridState {
    std::array<AreaState, 2> areas;
    double ptie = 0.0;  // flow from area 1 to area 2, MW
    double time = 0.0;  // s

    static GridState zero(const GridParams& params);
};

/// Inputs held constant over one integration step.
struct AreaInputs {
    double bess_mw = 0.0;           // net BESS injection
    std::vector<double> du_gov;     // governor setpoint per generator
    double disturbance = 0.0;       // net-load increase
};

/// Advances one generator by dt and returns the new mechanical power.
double governor_turbine_step(GeneratorState& state, double du_gov, double df,
                             const GeneratorParams& params, double dt);

/// Sectional droop injection: -slope * sign(df) * max(|df| - deadband, 0).
double frr_response(double df, const FrrSpec& spec);

/// One forward-Euler step of both areas and the tie line. Throws
/// InstabilityError naming the first non-finite state variable.
GridState grid_step(const GridState& state, const std::array<AreaInputs, 2>& inputs,
                    const GridParams& params, double dt);

/// 2H (df_next - df) / dt minus the net injection evaluated at `before`; zero
/// up to rounding for a forward-Euler step.
double swing_residual(const GridState& before, const GridState& after, std::size_t area,
                      const AreaInputs& inputs, const GridParams& params, double dt);

/// Integral AGC with a rate-limited setpoint: d(setpoint)/dt = clamp(-gain * signal, +-ramp).
struct AgcController {
    double setpoint = 0.0;

    void step(double signal, double gain, double ramp, double dt);
};

/// 0 before `start`, `magnitude` from `start` on.
double scenario_step_load(double t, double start = 10.0, double magnitude = 5.0);

/// Piecewise-constant uniform draws on [-amplitude, amplitude], one per hold
/// period, reproducible from the seed.
double scenario_fluctuation(double t, std::uint64_t seed, double amplitude = 6.0,
                            double hold = 60.0);

}  // namespace orra::grid
