#pragma once

#include "orra/bess.hpp"
#include "orra/comm_graph.hpp"
#include "orra/degradation.hpp"

#include <array>
#include <vector>

namespace orra::opt {

/// Decaying stepsizes with stage resets.
struct LearningSchedule {
    double kappa0 = 5.0;
    double eps0 = 0.2;
    double gamma = 0.01;
    double alpha = 0.5;
    double beta = 0.75;
    long t = 0;
    long t_max = 600;
    double f_threshold = 0.05;  // Hz

    /// Positivity, 0 < alpha <= beta < 1, 2 beta - 3 alpha <= 0, 2 beta - alpha - 1 <= 0,
    /// eps0 <= 1. Throws ParameterError.
    void validate() const;
    double kappa_at(long t) const;
    double eps_at(long t) const;
};

struct ScheduleStep {
    double kappa = 0.0;
    double eps = 0.0;
    long t = 0;  // stage iteration these rates belong to
    bool reset = false;
};

/// Rates for the current t (t = 0 and t = 1 both give (kappa0, eps0)), then
/// advances t and resets it to 0 when it reaches t_max or |df| >= f_threshold.
ScheduleStep schedule_step(LearningSchedule& schedule, double df);

/// d - c + aie
double constraint_h(const bess::Decision& u, double aie);

/// (df/dd + lambda~, -df/dc + lambda~), the search direction on u = (d, -c).
std::array<double, 2> gradient_s(std::pair<double, double> cost_grad, double lambda_mixed);

/// Projected step on the stacked variable (d, -c).
bess::Decision primal_update(const bess::Decision& u, const std::array<double, 2>& s, double kappa,
                             const bess::Interval& interval, bess::Mode mode);

/// (1 - eps) lambda~ + gamma kappa y~
double dual_update(double lambda_mixed, double y_mixed, double eps, double gamma, double kappa);

/// y~ + h_new - h_prev
double tracking_update(double y_mixed, double h_new, double h_prev);

struct AgentState {
    bess::Decision u;
    double lambda = 0.0;
    double y = 0.0;
    double lambda_mixed = 0.0;
    double y_mixed = 0.0;
    double h_prev = 0.0;          // h_{t-1}(u_t)
    std::array<double, 2> s{};    // search direction of the last iteration
};

/// What agent i sees during one iteration.
struct AgentProblem {
    degradation::CostModel cost;
    bess::Interval interval;
    bess::Mode mode;
    double aie = 0.0;
};

/// lambda = 0, y = h_prev = u_d - u_c + aie.
std::vector<AgentState> initialize_agents(const std::vector<bess::Decision>& u0,
                                          const std::vector<double>& aie0);

/// One synchronous iteration over all agents: mix (lambda, y), search
/// direction, projected primal step, dual step, tracking step, then the
/// schedule advance. `df` drives the reset test.
ScheduleStep orra_iteration(std::vector<AgentState>& agents, const comm::WeightMatrix& w,
                            const std::vector<AgentProblem>& problems, LearningSchedule& schedule,
                            double df);

}  // namespace orra::opt
