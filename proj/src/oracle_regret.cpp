#include "orra/oracle_regret.hpp"

#include "orra/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace orra::oracle {

namespace {
constexpr int kBisectionIterations = 80;
constexpr int kBestResponseIterations = 200;
}  // namespace

double best_response(const OracleAgent& agent, double nu) {
    double lo = agent.q_lo();
    double hi = agent.q_hi();
    if (hi <= lo) return lo;
    if (agent.cost.derivative_q(lo) + nu >= 0.0) return lo;
    if (agent.cost.left_derivative_q(hi) + nu <= 0.0) return hi;
    for (int it = 0; it < kBestResponseIterations && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (agent.cost.derivative_q(mid) + nu < 0.0) {
            lo = mid;
        } else if (agent.cost.left_derivative_q(mid) + nu > 0.0) {
            hi = mid;
        } else {
            return mid;
        }
    }
    return 0.5 * (lo + hi);
}

double marginal_cost(const OracleAgent& agent, double q) { return agent.cost.derivative_q(q); }

CentralizedSolution centralized_solve(const std::vector<OracleAgent>& agents, double target) {
    if (agents.empty()) throw EmptyInputError("centralized_solve: no agents");
    double lo_sum = 0.0;
    double hi_sum = 0.0;
    double nu_max = 0.0;
    for (const auto& a : agents) {
        lo_sum += a.q_lo();
        hi_sum += a.q_hi();
        nu_max = std::max({nu_max, std::abs(a.cost.derivative_q(a.q_lo())),
                           std::abs(a.cost.left_derivative_q(a.q_hi()))});
    }
    constexpr double feas_tol = 1e-9;
    if (target < lo_sum - feas_tol || target > hi_sum + feas_tol) {
        std::ostringstream msg;
        msg << "ramping target " << target << " MW outside achievable range [" << lo_sum << ", "
            << hi_sum << "] MW";
        throw InfeasibleError(msg.str(), lo_sum, hi_sum);
    }
    nu_max = 2.0 * std::max(nu_max, 1.0);

    auto respond = [&](double nu, std::vector<double>& q) {
        double total = 0.0;
        for (std::size_t i = 0; i < agents.size(); ++i) {
            q[i] = best_response(agents[i], nu);
            total += q[i];
        }
        return total;
    };

    std::vector<double> q_lo(agents.size());
    std::vector<double> q_hi(agents.size());
    std::vector<double> q_mid(agents.size());
    double nu_lo = -nu_max;
    double nu_hi = nu_max;
    double s_lo = respond(nu_lo, q_lo);  // largest aggregate
    double s_hi = respond(nu_hi, q_hi);  // smallest aggregate
    for (int it = 0; it < kBisectionIterations; ++it) {
        const double nu = 0.5 * (nu_lo + nu_hi);
        const double s = respond(nu, q_mid);
        if (s > s_lo + 1e-9 || s < s_hi - 1e-9) {
            throw NumericalError("aggregate best response is not monotone in the multiplier");
        }
        if (s > target) {
            nu_lo = nu;
            s_lo = s;
            q_lo.swap(q_mid);
        } else {
            nu_hi = nu;
            s_hi = s;
            q_hi.swap(q_mid);
        }
    }

    // Blend the two bracket responses; both are Lagrangian minimizers for
    // (numerically) the same multiplier, so their combination is optimal too.
    const double w = s_lo > s_hi ? std::clamp((target - s_hi) / (s_lo - s_hi), 0.0, 1.0) : 0.0;
    CentralizedSolution out;
    out.nu = 0.5 * (nu_lo + nu_hi);
    double total = 0.0;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const double q = std::clamp(q_hi[i] + w * (q_lo[i] - q_hi[i]), agents[i].q_lo(),
                                    agents[i].q_hi());
        total += q;
        out.u_star.push_back(q >= 0.0 ? bess::Decision{q, 0.0} : bess::Decision{0.0, -q});
    }
    out.residual = std::abs(total - target);
    return out;
}

}  // namespace orra::oracle

namespace orra::regret {

std::size_t RegretTrace::agents() const {
    return records.empty() ? 0 : static_cast<std::size_t>(records.front().lambda.size());
}

std::vector<std::pair<std::size_t, std::size_t>> RegretTrace::stages() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t begin = 0;
    for (std::size_t t = 1; t <= records.size(); ++t) {
        if (t == records.size() || records[t].stage != records[begin].stage) {
            out.emplace_back(begin, t);
            begin = t;
        }
    }
    return out;
}

const Eigen::VectorXd& RegretTrace::u_next(std::size_t t) const {
    if (t + 1 < records.size()) return records[t + 1].u;
    if (u_final.size() == 0) throw IncompleteTraceError("final primal state missing");
    return u_final;
}

const Eigen::VectorXd& RegretTrace::lambda_next(std::size_t t) const {
    if (t + 1 < records.size()) return records[t + 1].lambda;
    if (lambda_final.size() == 0) throw IncompleteTraceError("final dual state missing");
    return lambda_final;
}

double dynamic_regret(const RegretTrace& trace, std::size_t horizon) {
    if (horizon > trace.records.size()) {
        throw IncompleteTraceError("horizon " + std::to_string(horizon) + " exceeds " +
                                   std::to_string(trace.records.size()) + " logged iterations");
    }
    double total = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
        const auto& r = trace.records[t];
        if (!std::isfinite(r.oracle_cost) || !std::isfinite(r.cost)) {
            throw IncompleteTraceError("missing cost entry at iteration " + std::to_string(t));
        }
        total += r.cost - r.oracle_cost;
    }
    return total;
}

namespace {

Eigen::VectorXd constant_like(const Eigen::VectorXd& v, double value) {
    return Eigen::VectorXd::Constant(v.size(), value);
}

void check_range(const RegretTrace& trace, std::size_t begin, std::size_t end) {
    if (begin >= end || end > trace.records.size()) {
        throw IncompleteTraceError("empty or out-of-range record window");
    }
}

}  // namespace

Lemma1Terms lemma1_check(const RegretTrace& trace, std::size_t begin, std::size_t end) {
    check_range(trace, begin, end);
    const double gamma = trace.gamma;
    Lemma1Terms out;
    for (std::size_t t = begin; t < end; ++t) {
        const auto& r = trace.records[t];
        if (!std::isfinite(r.oracle_cost)) {
            throw IncompleteTraceError("missing oracle cost at iteration " + std::to_string(t));
        }
        const Eigen::VectorXd lbar = constant_like(r.lambda, r.lambda.mean());
        const Eigen::VectorXd lbar_next = constant_like(r.lambda, trace.lambda_next(t).mean());
        const Eigen::VectorXd ybar = constant_like(r.y, r.y.mean());

        out.lhs += r.cost - r.oracle_cost;
        out.primal += ((r.u - r.u_star).squaredNorm() - (trace.u_next(t) - r.u_star).squaredNorm()) /
                      (2.0 * r.kappa);
        const double dl = lbar.squaredNorm() - lbar_next.squaredNorm();
        out.dual += dl / (2.0 * gamma * r.kappa);
        out.dual_eps += dl / (2.0 * gamma * r.eps);
        out.search += 0.5 * r.kappa * r.s.squaredNorm();
        out.forgetting +=
            (gamma * r.kappa * r.y_mixed - r.eps * lbar).squaredNorm() / (2.0 * gamma * r.kappa);
        out.tracking += lbar.norm() * (r.y_mixed - ybar).norm();
        out.consensus += 2.0 * r.u.norm() * (r.lambda_mixed - lbar).norm();
    }
    out.rhs = out.primal + out.dual + out.search + out.forgetting + out.tracking + out.consensus;
    out.holds = out.lhs <= out.rhs + 1e-6;
    out.rhs_eps = out.rhs - out.dual + out.dual_eps;
    out.holds_eps = out.lhs <= out.rhs_eps + 1e-6;
    return out;
}

Lemma2Result lemma2_check(const RegretTrace& trace, std::size_t begin, std::size_t end) {
    check_range(trace, begin, end);
    const double n = static_cast<double>(trace.agents());
    Lemma2Result out;
    for (std::size_t t = begin; t < end; ++t) {
        const auto& r = trace.records[t];
        if (t > begin && r.kappa > trace.records[t - 1].kappa * (1.0 + 1e-12)) {
            throw PreconditionError("stepsize increases at iteration " + std::to_string(t));
        }
        out.s_t += ((r.u - r.u_star).squaredNorm() - (trace.u_next(t) - r.u_star).squaredNorm()) /
                   (2.0 * r.kappa);
        const Eigen::VectorXd* next_star = nullptr;
        if (t + 1 < trace.records.size()) {
            next_star = &trace.records[t + 1].u_star;
        } else if (trace.u_star_final.size() != 0) {
            next_star = &trace.u_star_final;
        }
        if (next_star != nullptr) out.v_t += (*next_star - r.u_star).norm() / r.kappa;
    }
    const double kappa_T = trace.records[end - 1].kappa;
    out.bound = 2.0 * n * trace.b_u * trace.b_u / kappa_T + 2.0 * n * trace.b_u * out.v_t;
    out.holds = out.s_t <= out.bound + 1e-6;
    return out;
}

SlopeFit regret_slope(const std::vector<double>& horizons, const std::vector<double>& regret) {
    if (horizons.size() != regret.size()) throw DimensionError("regret_slope: size mismatch");
    SlopeFit fit;
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = 0; i < horizons.size(); ++i) {
        if (regret[i] != 0.0 && std::isfinite(regret[i]) && horizons[i] > 0.0) {
            x.push_back(std::log(horizons[i]));
            y.push_back(std::log(std::abs(regret[i])));
        } else {
            fit.excluded.push_back(i);
        }
    }
    fit.used = x.size();
    if (x.size() < 2) throw PreconditionError("regret_slope: fewer than two nonzero points");
    const double k = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = k * sxx - sx * sx;
    if (denom <= 0.0) throw PreconditionError("regret_slope: horizons must differ");
    fit.slope = (k * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / k;
    return fit;
}

}  // namespace orra::regret
