#pragma once

#include "orra/bess.hpp"
#include "orra/degradation.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace orra::oracle {

struct CentralizedSolution {
    std::vector<bess::Decision> u_star;
    double nu = 0.0;
    double residual = 0.0;  // |sum(d - c) - target|
};

/// One agent of the per-step problem: convex cost and the signed range of
/// q = d - c allowed by its mode and interval.
struct OracleAgent {
    degradation::CostModel cost;
    bess::Interval interval;
    bess::Mode mode;

    double q_lo() const { return mode == bess::Mode::Discharge ? interval.lo : -interval.hi; }
    double q_hi() const { return mode == bess::Mode::Discharge ? interval.hi : -interval.lo; }
};

/// argmin_q cost(q) + nu q over [q_lo, q_hi], by bisection on the monotone
/// one-sided derivatives.
double best_response(const OracleAgent& agent, double nu);

/// Minimizes sum_i f_i(q_i) subject to sum_i q_i = target and each q_i in its
/// range, by bisection on the multiplier nu. Throws InfeasibleError carrying
/// the achievable range when target is outside it.
CentralizedSolution centralized_solve(const std::vector<OracleAgent>& agents, double target);

/// Marginal cost of net power for agent i at q (right derivative when q = 0).
double marginal_cost(const OracleAgent& agent, double q);

}  // namespace orra::oracle

namespace orra::regret {

/// Logged quantities of one iteration t. Stacked vectors use
/// u = (d_1, -c_1, ..., d_N, -c_N); per-agent vectors have length N.
struct IterationRecord {
    long stage = 0;
    double kappa = 0.0;
    double eps = 0.0;
    Eigen::VectorXd u;        // u_t
    Eigen::VectorXd u_star;   // u*_t
    Eigen::VectorXd s;        // s_t
    Eigen::VectorXd lambda;   // lambda_t
    Eigen::VectorXd lambda_mixed;
    Eigen::VectorXd y;        // y_t
    Eigen::VectorXd y_mixed;
    double cost = 0.0;        // sum_i f_{i,t}(u_{i,t})
    double oracle_cost = 0.0; // sum_i f_{i,t}(u*_{i,t}); NaN when missing
};

/// Per-iteration log plus the state after the final iteration, which closes
/// the u_{t+1} and lambda_{t+1} references of the last record.
struct RegretTrace {
    double gamma = 1.0;
    double b_u = 1.0;
    std::vector<IterationRecord> records;
    Eigen::VectorXd u_final;
    Eigen::VectorXd lambda_final;
    Eigen::VectorXd u_star_final;  // u*_{T+1} when available, else empty

    std::size_t agents() const;
    /// Records [begin, end) grouped by stage id.
    std::vector<std::pair<std::size_t, std::size_t>> stages() const;
    const Eigen::VectorXd& u_next(std::size_t t) const;
    const Eigen::VectorXd& lambda_next(std::size_t t) const;
};

/// sum_{t < T} (cost_t - oracle_cost_t). Throws IncompleteTraceError when a
/// record is missing or has no oracle cost.
double dynamic_regret(const RegretTrace& trace, std::size_t horizon);

struct Lemma1Terms {
    double lhs = 0.0;
    double primal = 0.0;       // sum (|u_t - u*_t|^2 - |u_{t+1} - u*_t|^2) / (2 kappa_t)
    double dual = 0.0;         // sum (|lbar_t|^2 - |lbar_{t+1}|^2) / (2 gamma kappa_t)
    double search = 0.0;       // sum kappa_t |s_t|^2 / 2
    double forgetting = 0.0;   // sum |gamma kappa_t y~_t - eps_t lbar_t|^2 / (2 gamma kappa_t)
    double tracking = 0.0;     // sum |lbar_t| |y~_t - ybar_t|
    double consensus = 0.0;    // sum 2 |u_t| |l~_t - lbar_t|
    double rhs = 0.0;
    bool holds = false;
    // Same bound with the dual term divided by 2 gamma eps_t instead of 2 gamma kappa_t.
    double dual_eps = 0.0;
    double rhs_eps = 0.0;
    bool holds_eps = false;
};

/// Both sides of the regret inequality over records [begin, end).
Lemma1Terms lemma1_check(const RegretTrace& trace, std::size_t begin, std::size_t end);

struct Lemma2Result {
    double s_t = 0.0;
    double v_t = 0.0;
    double bound = 0.0;
    bool holds = false;
};

/// S(T) <= 2 N B_u^2 / kappa_T + 2 N B_u V(T) over records [begin, end).
/// Throws PreconditionError when kappa increases inside the range.
Lemma2Result lemma2_check(const RegretTrace& trace, std::size_t begin, std::size_t end);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::size_t used = 0;
    std::vector<std::size_t> excluded;  // indexes with Reg == 0
    // A linear regret fitted with rounding must not pass as sublinear.
    bool sublinear() const { return slope < 1.0 - 1e-9; }
};

/// Least-squares slope of log |Reg| against log T. A negative regret (the
/// fleet spent less than the oracle by under-delivering) is fitted by its
/// magnitude; zeros are excluded. Throws PreconditionError with fewer than two usable points.
SlopeFit regret_slope(const std::vector<double>& horizons, const std::vector<double>& regret);

}  // namespace orra::regret
