#include "orra/degradation.hpp"

#include "orra/error.hpp"

#include <cmath>

namespace orra::degradation {

void AgingParams::validate() const {
    if (!(a > 0.0)) throw ParameterError("aging coefficient a must be positive");
    if (!(b >= 1.0)) throw ParameterError("aging exponent b must be at least 1");
}

RainflowStep rainflow_step(double soc, long k, const ResidueStack& residues) {
    RainflowStep out;
    out.residues = residues;
    auto& r = out.residues;

    if (r.empty()) {
        r.push_back({k, soc});
        return out;
    }
    const double last = r.back().soc;
    if (soc == last) return out;

    if (r.size() >= 2) {
        const bool rising = last > r[r.size() - 2].soc;
        if ((soc > last) == rising) {
            r.back() = {k, soc};
        } else {
            r.push_back({k, soc});
        }
    } else {
        r.push_back({k, soc});
    }
    out.progressed = true;

    // Four-point rule on the top of the stack: B-C closes when it is smaller
    // than A-B and no larger than C-D. The strict side matches the ASTM count
    // when ranges tie.
    while (r.size() >= 4) {
        const auto n = r.size();
        const double ab = std::abs(r[n - 3].soc - r[n - 4].soc);
        const double bc = std::abs(r[n - 2].soc - r[n - 3].soc);
        const double cd = std::abs(r[n - 1].soc - r[n - 2].soc);
        if (bc < ab && bc <= cd) {
            out.closed.push_back({bc, 1.0});
            r.erase(r.begin() + static_cast<long>(n - 3), r.begin() + static_cast<long>(n - 1));
        } else {
            break;
        }
    }
    out.mu = std::abs(r.back().soc - r[r.size() - 2].soc);
    return out;
}

std::vector<CycleEvent> residual_half_cycles(const ResidueStack& residues) {
    std::vector<CycleEvent> out;
    for (std::size_t i = 1; i < residues.size(); ++i) {
        out.push_back({std::abs(residues[i].soc - residues[i - 1].soc), 0.5});
    }
    return out;
}

bool is_valid_residue_stack(const ResidueStack& residues) {
    for (std::size_t i = 1; i < residues.size(); ++i) {
        if (residues[i].k <= residues[i - 1].k) return false;
        if (residues[i].soc == residues[i - 1].soc) return false;
    }
    for (std::size_t i = 2; i < residues.size(); ++i) {
        const bool up_prev = residues[i - 1].soc > residues[i - 2].soc;
        const bool up_now = residues[i].soc > residues[i - 1].soc;
        if (up_prev == up_now) return false;
    }
    return true;
}

double lifetime_loss(const CycleEvent& event, const AgingParams& params) {
    if (event.depth <= 0.0) return 0.0;
    return 0.5 * event.n_cyc * params.a * std::pow(event.depth, params.b);
}

double residue_damage(const ResidueStack& residues, const AgingParams& params) {
    double total = 0.0;
    for (const auto& e : residual_half_cycles(residues)) total += lifetime_loss(e, params);
    return total;
}

double step_damage(const ResidueStack& before, const RainflowStep& step, const AgingParams& params) {
    double total = residue_damage(step.residues, params) - residue_damage(before, params);
    for (const auto& e : step.closed) total += lifetime_loss(e, params);
    return total;
}

double usage_cost(double d, double c, double loss, double theta_a, double theta_b, double tau_s) {
    if (!(tau_s > 0.0)) throw ParameterError("control interval must be positive");
    const double net = d - c;
    return theta_a * (3600.0 / tau_s) * loss + theta_b * net * net;
}

OpenHalfCycle OpenHalfCycle::from(const ResidueStack& residues) {
    if (residues.size() < 2) return {};
    const double span = residues.back().soc - residues[residues.size() - 2].soc;
    return {span > 0.0 ? 1 : -1, std::abs(span)};
}

CostModel::CostModel(const bess::BessParams& bess, const AgingParams& aging, OpenHalfCycle open,
                     double tau_s)
    : bess_(bess),
      aging_(aging),
      open_(open),
      tau_s_(tau_s),
      per_hour_(3600.0 / tau_s),
      kd_(bess::soc_per_mw_discharge(bess, tau_s)),
      kc_(bess::soc_per_mw_charge(bess, tau_s)) {
    if (!(tau_s > 0.0)) throw ParameterError("control interval must be positive");
}

double CostModel::soc_delta(double d, double c) const { return kc_ * c - kd_ * d; }

double CostModel::half_loss(double mu) const { return lifetime_loss({mu, 0.5}, aging_); }

double CostModel::half_loss_derivative(double mu) const {
    return 0.25 * aging_.a * aging_.b * std::pow(std::max(mu, 0.0), aging_.b - 1.0);
}

double CostModel::g(double dx) const {
    if (open_.direction == 0) return half_loss(std::abs(dx));
    const double v = open_.direction * dx;
    if (v >= 0.0) return half_loss(open_.depth + v) - half_loss(open_.depth);
    return half_loss(-v);
}

double CostModel::g_right(double dx) const {
    const double dir = open_.direction;
    if (dir == 0) return dx >= 0.0 ? half_loss_derivative(dx) : -half_loss_derivative(-dx);
    const double v = dir * dx;
    if (v > 0.0 || (v == 0.0 && dir > 0)) return dir * half_loss_derivative(open_.depth + v);
    return -dir * half_loss_derivative(-v);
}

double CostModel::g_left(double dx) const {
    const double dir = open_.direction;
    if (dir == 0) return dx > 0.0 ? half_loss_derivative(dx) : -half_loss_derivative(-dx);
    const double v = dir * dx;
    if (v > 0.0 || (v == 0.0 && dir < 0)) return dir * half_loss_derivative(open_.depth + v);
    return -dir * half_loss_derivative(-v);
}

double CostModel::aging_loss(double d, double c) const { return g(soc_delta(d, c)); }

double CostModel::operator()(double d, double c) const {
    return usage_cost(d, c, aging_loss(d, c), bess_.theta_a, bess_.theta_b, tau_s_);
}

std::pair<double, double> CostModel::gradient(double d, double c) const {
    const double dx = soc_delta(d, c);
    const double wear = 2.0 * bess_.theta_b * (d - c);
    const double aging_scale = bess_.theta_a * per_hour_;
    return {-kd_ * g_left(dx) * aging_scale + wear, kc_ * g_right(dx) * aging_scale - wear};
}

double CostModel::cost_q(double q) const { return (*this)(std::max(q, 0.0), std::max(-q, 0.0)); }

double CostModel::derivative_q(double q) const {
    const double dx = soc_delta(std::max(q, 0.0), std::max(-q, 0.0));
    const double k = q >= 0.0 ? kd_ : kc_;
    return -k * g_left(dx) * bess_.theta_a * per_hour_ + 2.0 * bess_.theta_b * q;
}

double CostModel::left_derivative_q(double q) const {
    const double dx = soc_delta(std::max(q, 0.0), std::max(-q, 0.0));
    const double k = q > 0.0 ? kd_ : kc_;
    return -k * g_right(dx) * bess_.theta_a * per_hour_ + 2.0 * bess_.theta_b * q;
}

std::pair<double, double> cost_gradient(double d, double c, const ResidueStack& residues,
                                        const bess::BessParams& bess, const AgingParams& aging,
                                        double tau_s) {
    return CostModel(bess, aging, OpenHalfCycle::from(residues), tau_s).gradient(d, c);
}

}  // namespace orra::degradation
