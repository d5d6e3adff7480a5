#pragma once

#include "orra/bess.hpp"

#include <utility>
#include <vector>

namespace orra::degradation {

/// One unremoved extremum of the SoC trajectory.
struct Residue {
    long k = 0;
    double soc = 0.0;

    bool operator==(const Residue&) const = default;
};

/// Extrema not yet removed by rainflow counting, oldest first. Consecutive
/// values alternate in direction and time indexes strictly increase.
using ResidueStack = std::vector<Residue>;

/// A counted cycle: `n_cyc` is 1 for a closed full cycle and 0.5 for a half cycle.
struct CycleEvent {
    double depth = 0.0;
    double n_cyc = 0.5;

    bool operator==(const CycleEvent&) const = default;
    auto operator<=>(const CycleEvent&) const = default;
};

/// Power-law depth-to-loss coefficients. b >= 1 keeps the loss convex in depth.
struct AgingParams {
    double a = 5.24e-4;
    double b = 2.03;

    void validate() const;
};

struct RainflowStep {
    ResidueStack residues;
    std::vector<CycleEvent> closed;  // full cycles closed by this sample
    double mu = 0.0;                 // depth between the latest two residues, 0 without progress
    bool progressed = false;
};

/// Streaming four-point rainflow: append `soc` observed at index `k`, merge it
/// into the open half cycle or start a new one, then close every nested full cycle.
RainflowStep rainflow_step(double soc, long k, const ResidueStack& residues);

/// Half cycles formed by consecutive residues (the end-of-stream flush).
std::vector<CycleEvent> residual_half_cycles(const ResidueStack& residues);

/// True when directions alternate and time indexes increase.
bool is_valid_residue_stack(const ResidueStack& residues);

/// (n_cyc / 2) * a * depth^b
double lifetime_loss(const CycleEvent& event, const AgingParams& params);

/// Loss attributed to the residue half cycles of a stack.
double residue_damage(const ResidueStack& residues, const AgingParams& params);

/// Exact rainflow damage increment of one step: closed cycles plus the
/// change in residue half-cycle damage.
double step_damage(const ResidueStack& before, const RainflowStep& step, const AgingParams& params);

/// theta_a * (3600 / tau) * loss + theta_b * (d - c)^2, in $/h.
double usage_cost(double d, double c, double loss, double theta_a, double theta_b, double tau_s);

/// Direction and depth of the half cycle that is still open at the stack top.
struct OpenHalfCycle {
    int direction = 0;  // +1 rising SoC, -1 falling, 0 none yet
    double depth = 0.0;

    static OpenHalfCycle from(const ResidueStack& residues);
};

/// Per-interval usage cost of one battery with the residues frozen at the
/// start of the interval. Only the open half cycle reacts to the decision:
/// deepening it costs L(mu0 + v) - L(mu0), reversing starts a new half cycle L(v).
class CostModel {
public:
    CostModel(const bess::BessParams& bess, const AgingParams& aging, OpenHalfCycle open,
              double tau_s);

    double aging_loss(double d, double c) const;
    double operator()(double d, double c) const;

    /// (df/dd, df/dc): one-sided derivatives in the direction of increasing d and c.
    std::pair<double, double> gradient(double d, double c) const;

    /// Cost as a function of the signed power q = d - c (d = q+, c = q-).
    double cost_q(double q) const;
    /// Right derivative of cost_q; nondecreasing on each half line.
    double derivative_q(double q) const;
    double left_derivative_q(double q) const;

    const bess::BessParams& bess() const { return bess_; }

private:
    double soc_delta(double d, double c) const;
    double half_loss(double mu) const;
    double half_loss_derivative(double mu) const;
    double g(double dx) const;
    double g_right(double dx) const;
    double g_left(double dx) const;

    bess::BessParams bess_;
    AgingParams aging_;
    OpenHalfCycle open_;
    double tau_s_;
    double per_hour_;
    double kd_;
    double kc_;
};

/// Gradient of the frozen-residue cost at (d, c) for a battery whose residues
/// are `residues`.
std::pair<double, double> cost_gradient(double d, double c, const ResidueStack& residues,
                                        const bess::BessParams& bess, const AgingParams& aging,
                                        double tau_s);

}  // namespace orra::degradation
