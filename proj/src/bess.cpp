#include "orra/bess.hpp"

#include "orra/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace orra::bess {

namespace {
constexpr double kSocSlack = 1e-9;
constexpr double kSecondsPerHour = 3600.0;
}  // namespace

void BessParams::validate() const {
    auto fail = [](const std::string& msg) { throw ParameterError("battery parameters: " + msg); };
    if (!(capacity_mwh > 0.0)) fail("capacity must be positive");
    if (charge_limit_mw < 0.0 || discharge_limit_mw < 0.0) fail("power limits must be nonnegative");
    if (!(eta_c > 0.0 && eta_c <= 1.0) || !(eta_d > 0.0 && eta_d <= 1.0))
        fail("efficiencies must lie in (0, 1]");
    if (!(soc_min >= 0.0 && soc_min < soc_max && soc_max <= 1.0))
        fail("SoC band must satisfy 0 <= min < max <= 1");
    if (theta_a < 0.0 || theta_b < 0.0) fail("cost coefficients must be nonnegative");
}

double soc_per_mw_discharge(const BessParams& p, double tau_s) {
    return (tau_s / kSecondsPerHour) / (p.eta_d * p.capacity_mwh);
}

double soc_per_mw_charge(const BessParams& p, double tau_s) {
    return p.eta_c * (tau_s / kSecondsPerHour) / p.capacity_mwh;
}

double soc_after(double soc, double c, double d, const BessParams& p, double tau_s) {
    return soc + soc_per_mw_charge(p, tau_s) * c - soc_per_mw_discharge(p, tau_s) * d;
}

double soc_step(double soc, double c, double d, const BessParams& p, double tau_s) {
    const double next = soc_after(soc, c, d, p, tau_s);
    if (next < p.soc_min - kSocSlack || next > p.soc_max + kSocSlack) {
        std::ostringstream msg;
        msg << "SoC " << next << " outside [" << p.soc_min << ", " << p.soc_max
            << "] after c=" << c << " d=" << d;
        throw SocViolation(msg.str());
    }
    return next;
}

Mode mode_select(double aie, std::optional<Mode> delayed_generator_mode, bool is_generator_bus,
                 Mode prev_mode, ModeConvention convention) {
    if (!is_generator_bus) return delayed_generator_mode.value_or(prev_mode);
    if (aie == 0.0) return prev_mode;
    const double signed_unit = convention.aie_sign * aie / std::abs(aie);
    return 0.5 * (signed_unit + 1.0) > 0.5 ? Mode::Discharge : Mode::Charge;
}

Interval feasible_interval(double soc, Mode mode, const BessParams& p, double tau_s) {
    if (mode == Mode::Discharge) {
        const double soc_room = std::max(0.0, soc - p.soc_min);
        return {0.0, std::min(p.discharge_limit_mw, soc_room / soc_per_mw_discharge(p, tau_s))};
    }
    const double soc_room = std::max(0.0, p.soc_max - soc);
    return {0.0, std::min(p.charge_limit_mw, soc_room / soc_per_mw_charge(p, tau_s))};
}

Decision project(const Decision& u, const Interval& interval, Mode mode) {
    if (mode == Mode::Discharge) return {std::clamp(u.d, interval.lo, interval.hi), 0.0};
    return {0.0, std::clamp(u.c, interval.lo, interval.hi)};
}

}  // namespace orra::bess
