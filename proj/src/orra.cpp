#include "orra/orra.hpp"

#include "orra/error.hpp"

#include <cmath>

namespace orra::opt {

void LearningSchedule::validate() const {
    auto fail = [](const std::string& msg) { throw ParameterError("learning schedule: " + msg); };
    if (!(kappa0 > 0.0) || !(eps0 > 0.0) || !(gamma > 0.0))
        fail("kappa0, eps0 and gamma must be positive");
    if (eps0 > 1.0) fail("eps0 must not exceed 1");
    if (!(alpha > 0.0 && alpha <= beta && beta < 1.0)) fail("need 0 < alpha <= beta < 1");
    constexpr double slack = 1e-12;
    if (2.0 * beta - 3.0 * alpha > slack) fail("need 2 beta - 3 alpha <= 0");
    if (2.0 * beta - alpha - 1.0 > slack) fail("need 2 beta - alpha - 1 <= 0");
    if (t_max < 1) fail("stage length must be at least 1");
    if (!(f_threshold > 0.0)) fail("frequency reset threshold must be positive");
}

double LearningSchedule::kappa_at(long stage_t) const {
    return stage_t <= 1 ? kappa0 : kappa0 * std::pow(static_cast<double>(stage_t), -alpha);
}

double LearningSchedule::eps_at(long stage_t) const {
    return stage_t <= 1 ? eps0 : eps0 * std::pow(static_cast<double>(stage_t), -beta);
}

ScheduleStep schedule_step(LearningSchedule& schedule, double df) {
    ScheduleStep out{schedule.kappa_at(schedule.t), schedule.eps_at(schedule.t), schedule.t, false};
    ++schedule.t;
    if (schedule.t >= schedule.t_max || std::abs(df) >= schedule.f_threshold) {
        schedule.t = 0;
        out.reset = true;
    }
    return out;
}

double constraint_h(const bess::Decision& u, double aie) { return u.d - u.c + aie; }

std::array<double, 2> gradient_s(std::pair<double, double> cost_grad, double lambda_mixed) {
    return {cost_grad.first + lambda_mixed, -cost_grad.second + lambda_mixed};
}

bess::Decision primal_update(const bess::Decision& u, const std::array<double, 2>& s, double kappa,
                             const bess::Interval& interval, bess::Mode mode) {
    const double d = u.d - kappa * s[0];
    const double neg_c = -u.c - kappa * s[1];
    return bess::project({d, -neg_c}, interval, mode);
}

double dual_update(double lambda_mixed, double y_mixed, double eps, double gamma, double kappa) {
    return (1.0 - eps) * lambda_mixed + gamma * kappa * y_mixed;
}

double tracking_update(double y_mixed, double h_new, double h_prev) {
    return y_mixed + h_new - h_prev;
}

std::vector<AgentState> initialize_agents(const std::vector<bess::Decision>& u0,
                                          const std::vector<double>& aie0) {
    if (u0.size() != aie0.size()) throw DimensionError("initialize_agents: size mismatch");
    std::vector<AgentState> out(u0.size());
    for (std::size_t i = 0; i < u0.size(); ++i) {
        out[i].u = u0[i];
        out[i].y = out[i].h_prev = constraint_h(u0[i], aie0[i]);
    }
    return out;
}

ScheduleStep orra_iteration(std::vector<AgentState>& agents, const comm::WeightMatrix& w,
                            const std::vector<AgentProblem>& problems, LearningSchedule& schedule,
                            double df) {
    const auto n = agents.size();
    if (problems.size() != n || w.size() != n) {
        throw DimensionError("orra_iteration: agents, problems and weights disagree in size");
    }
    const auto rates = schedule_step(schedule, df);

    Eigen::VectorXd lambda(static_cast<Eigen::Index>(n));
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        lambda(static_cast<Eigen::Index>(i)) = agents[i].lambda;
        y(static_cast<Eigen::Index>(i)) = agents[i].y;
    }
    const Eigen::VectorXd lambda_mixed = comm::mix(lambda, w);
    const Eigen::VectorXd y_mixed = comm::mix(y, w);

    for (std::size_t i = 0; i < n; ++i) {
        auto& a = agents[i];
        const auto& p = problems[i];
        a.lambda_mixed = lambda_mixed(static_cast<Eigen::Index>(i));
        a.y_mixed = y_mixed(static_cast<Eigen::Index>(i));
        a.s = gradient_s(p.cost.gradient(a.u.d, a.u.c), a.lambda_mixed);
        a.u = primal_update(a.u, a.s, rates.kappa, p.interval, p.mode);
        a.lambda = dual_update(a.lambda_mixed, a.y_mixed, rates.eps, schedule.gamma, rates.kappa);
        const double h_new = constraint_h(a.u, p.aie);
        a.y = tracking_update(a.y_mixed, h_new, a.h_prev);
        a.h_prev = h_new;
    }
    return rates;
}

}  // namespace orra::opt
