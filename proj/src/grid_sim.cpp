#include "orra/grid_sim.hpp"

#include "orra/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace orra::grid {

void GeneratorParams::validate() const {
    if (!(droop_inv > 0.0 && t_gov > 0.0 && t_turb > 0.0 && ramp > 0.0 && saturation > 0.0)) {
        throw ParameterError("generator parameters must all be positive");
    }
}

void FrrSpec::validate() const {
    if (deadband < 0.0 || slope < 0.0) throw ParameterError("FRR deadband and slope must be >= 0");
}

double AreaParams::bias() const {
    double b = damping;
    for (const auto& g : generators) b += g.droop_inv;
    return b;
}

double AreaParams::aggregate_ramp() const {
    double r = 0.0;
    for (const auto& g : generators) r += g.ramp;
    return r;
}

void AreaParams::validate() const {
    if (!(two_h > 0.0 && damping > 0.0 && load_mw > 0.0 && agc_gain > 0.0)) {
        throw ParameterError("area inertia, damping, load and AGC gain must be positive");
    }
    if (generators.empty()) throw ParameterError("area needs at least one generator");
    if (sigma.size() != generators.size()) {
        throw ParameterError("one participation factor per generator required");
    }
    double total = 0.0;
    for (double s : sigma) {
        if (s < 0.0) throw ParameterError("participation factors must be nonnegative");
        total += s;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ParameterError("participation factors must sum to 1");
    for (const auto& g : generators) g.validate();
    frr.validate();
}

void GridParams::validate() const {
    for (const auto& a : areas) a.validate();
    if (!(tie_sync > 0.0)) throw ParameterError("tie-line coefficient must be positive");
}

double AreaState::pm_sum() const {
    double s = 0.0;
    for (const auto& g : generators) s += g.pm;
    return s;
}

GridState GridState::zero(const GridParams& params) {
    GridState s;
    for (std::size_t a = 0; a < 2; ++a) {
        s.areas[a].generators.assign(params.areas[a].generators.size(), {});
    }
    return s;
}

double governor_turbine_step(GeneratorState& state, double du_gov, double df,
                             const GeneratorParams& p, double dt) {
    const double gov_rate = (du_gov - df * p.droop_inv - state.gov) / p.t_gov;
    const double pm_rate = std::clamp((state.gov - state.pm) / p.t_turb, -p.ramp, p.ramp);
    state.gov += dt * gov_rate;
    state.pm = std::clamp(state.pm + dt * pm_rate, -p.saturation, p.saturation);
    return state.pm;
}

double frr_response(double df, const FrrSpec& spec) {
    if (!spec.enabled) return 0.0;
    const double excess = std::max(std::abs(df) - spec.deadband, 0.0);
    if (excess == 0.0) return 0.0;
    return df > 0.0 ? -spec.slope * excess : spec.slope * excess;
}

namespace {

double net_injection(const AreaState& area, std::size_t index, const AreaInputs& in,
                     const AreaParams& p, double ptie) {
    const double tie = index == 0 ? ptie : -ptie;
    return area.pm_sum() + in.bess_mw + frr_response(area.df, p.frr) - in.disturbance -
           p.damping * area.df - tie;
}

void require_finite(double v, const std::string& name) {
    if (!std::isfinite(v)) throw InstabilityError(name);
}

}  // namespace

GridState grid_step(const GridState& state, const std::array<AreaInputs, 2>& inputs,
                    const GridParams& params, double dt) {
    if (!(dt > 0.0)) throw ParameterError("integration step must be positive");
    GridState next = state;
    for (std::size_t a = 0; a < 2; ++a) {
        const auto& p = params.areas[a];
        const auto& in = inputs[a];
        const auto& cur = state.areas[a];
        auto& out = next.areas[a];
        if (in.du_gov.size() != cur.generators.size()) {
            throw DimensionError("grid_step: one governor setpoint per generator required");
        }
        const double accel = net_injection(cur, a, in, p, state.ptie) / p.two_h;
        for (std::size_t g = 0; g < cur.generators.size(); ++g) {
            governor_turbine_step(out.generators[g], in.du_gov[g], cur.df, p.generators[g], dt);
            require_finite(out.generators[g].pm,
                           "area" + std::to_string(a + 1) + ".pm" + std::to_string(g));
        }
        out.frr = frr_response(cur.df, p.frr);
        out.disturbance = in.disturbance;
        out.df = cur.df + dt * accel;
        require_finite(out.df, "area" + std::to_string(a + 1) + ".df");
    }
    next.ptie = state.ptie + dt * params.tie_sync * (state.areas[0].df - state.areas[1].df);
    require_finite(next.ptie, "ptie");
    next.time = state.time + dt;
    return next;
}

double swing_residual(const GridState& before, const GridState& after, std::size_t area,
                      const AreaInputs& inputs, const GridParams& params, double dt) {
    const auto& p = params.areas[area];
    const double accel = p.two_h * (after.areas[area].df - before.areas[area].df) / dt;
    return accel - net_injection(before.areas[area], area, inputs, p, before.ptie);
}

void AgcController::step(double signal, double gain, double ramp, double dt) {
    setpoint += dt * std::clamp(-gain * signal, -ramp, ramp);
}

double scenario_step_load(double t, double start, double magnitude) {
    return t >= start ? magnitude : 0.0;
}

double scenario_fluctuation(double t, std::uint64_t seed, double amplitude, double hold) {
    if (t < 0.0 || !(hold > 0.0)) return 0.0;
    const auto period = static_cast<std::uint64_t>(std::floor(t / hold));
    std::mt19937_64 engine(seed ^ (0x9E3779B97F4A7C15ULL * (period + 1)));
    const double unit = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    return amplitude * (2.0 * unit - 1.0);
}

}  // namespace orra::grid
