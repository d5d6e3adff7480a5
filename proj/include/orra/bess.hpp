#pragma once

#include <optional>

namespace orra::bess {

/// Physical and economic parameters of one battery. Powers in MW, energy in MWh.
struct BessParams {
    double capacity_mwh = 2.0;
    double charge_limit_mw = 1.0;
    double discharge_limit_mw = 1.0;
    double eta_c = 0.95;
    double eta_d = 0.95;
    double soc_min = 0.2;
    double soc_max = 0.8;
    double theta_a = 1000.0;  // $ per normalized lifetime
    double theta_b = 0.1;     // $/(MW^2 h)

    /// Throws ParameterError when an invariant is violated.
    void validate() const;
};

enum class Mode : int { Charge = 0, Discharge = 1 };

inline int to_int(Mode m) { return static_cast<int>(m); }

/// Charge/discharge pair. The optimizer's stacked variable is u = (d, -c).
struct Decision {
    double d = 0.0;
    double c = 0.0;

    double net() const { return d - c; }
    bool operator==(const Decision&) const = default;
};

struct BessState {
    double soc = 0.5;
    Mode mode = Mode::Discharge;
    Decision power;
};

/// Admissible range of the active power coordinate for one interval.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// SoC after applying (c, d) for tau seconds. Throws SocViolation when the
/// result leaves [soc_min - 1e-9, soc_max + 1e-9].
double soc_step(double soc, double c, double d, const BessParams& params, double tau_s);

/// Same as soc_step without the band check.
double soc_after(double soc, double c, double d, const BessParams& params, double tau_s);

/// d(soc)/d(d) and d(soc)/d(c) magnitudes for one interval.
double soc_per_mw_discharge(const BessParams& params, double tau_s);
double soc_per_mw_charge(const BessParams& params, double tau_s);

/// Sign convention mapping the AIE sign to the permitted direction.
/// With `aie_sign = +1` a positive AIE selects discharge (the raw mode rule);
/// `-1` selects discharge for negative AIE so that the permitted direction
/// matches the aggregate requirement sum(d - c) = -sum(AIE).
struct ModeConvention {
    double aie_sign = -1.0;
};

/// Generator buses follow the sign of their own AIE; non-generator buses copy
/// the delayed mode of the nearest generator bus. AIE == 0 holds the previous mode.
Mode mode_select(double aie, std::optional<Mode> delayed_generator_mode, bool is_generator_bus,
                 Mode prev_mode, ModeConvention convention = {});

/// Feasible interval of the active coordinate (d when discharging, c when charging).
Interval feasible_interval(double soc, Mode mode, const BessParams& params, double tau_s);

/// Euclidean projection onto {active in [lo, hi], inactive = 0}.
Decision project(const Decision& u, const Interval& interval, Mode mode);

}  // namespace orra::bess
