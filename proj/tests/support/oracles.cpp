#include "oracles.hpp"

#include "orra/comm_graph.hpp"
#include "orra/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace orra::testing {

using degradation::CycleEvent;

std::vector<CycleEvent> batch_rainflow(const std::vector<double>& series) {
    std::vector<double> tp;
    for (double x : series) {
        if (!tp.empty() && x == tp.back()) continue;
        if (tp.size() >= 2) {
            const bool was_rising = tp.back() > tp[tp.size() - 2];
            const bool rising = x > tp.back();
            if (was_rising == rising) {
                tp.back() = x;
                continue;
            }
        }
        tp.push_back(x);
    }

    std::vector<CycleEvent> events;
    std::vector<double> st;
    for (double p : tp) {
        st.push_back(p);
        while (st.size() >= 3) {
            const std::size_t n = st.size();
            const double x = std::abs(st[n - 1] - st[n - 2]);
            const double y = std::abs(st[n - 2] - st[n - 3]);
            if (x < y) break;
            if (n == 3) {
                // Y starts at the current start point.
                events.push_back({y, 0.5});
                st.erase(st.begin());
            } else {
                events.push_back({y, 1.0});
                st.erase(st.end() - 3, st.end() - 1);
            }
        }
    }
    for (std::size_t i = 1; i < st.size(); ++i) events.push_back({std::abs(st[i] - st[i - 1]), 0.5});
    return events;
}

std::vector<CycleEvent> streaming_rainflow(const std::vector<double>& series) {
    degradation::ResidueStack residues;
    std::vector<CycleEvent> events;
    long k = 0;
    for (double x : series) {
        auto step = degradation::rainflow_step(x, k++, residues);
        events.insert(events.end(), step.closed.begin(), step.closed.end());
        residues = std::move(step.residues);
    }
    const auto tail = degradation::residual_half_cycles(residues);
    events.insert(events.end(), tail.begin(), tail.end());
    return events;
}

double total_cost(const std::vector<oracle::OracleAgent>& agents, const std::vector<double>& q) {
    double total = 0.0;
    for (std::size_t i = 0; i < agents.size(); ++i) total += agents[i].cost.cost_q(q[i]);
    return total;
}

GridOptimum grid_brute_force(const std::vector<oracle::OracleAgent>& agents, double target,
                             double step) {
    const std::size_t n = agents.size();
    std::vector<long> lo(n), hi(n);
    long base = 0;
    long width = 0;
    for (std::size_t i = 0; i < n; ++i) {
        lo[i] = static_cast<long>(std::ceil(agents[i].q_lo() / step - 1e-9));
        hi[i] = static_cast<long>(std::floor(agents[i].q_hi() / step + 1e-9));
        if (hi[i] < lo[i]) throw std::invalid_argument("grid_brute_force: empty range");
        base += lo[i];
        width += hi[i] - lo[i];
    }
    const long want = std::lround(target / step) - base;
    if (want < 0 || want > width) throw std::invalid_argument("grid_brute_force: target out of range");

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> best(1, 0.0);
    std::vector<std::vector<long>> choice(n);
    for (std::size_t i = 0; i < n; ++i) {
        const long span = hi[i] - lo[i];
        std::vector<double> f(static_cast<std::size_t>(span + 1));
        for (long m = 0; m <= span; ++m) {
            f[static_cast<std::size_t>(m)] = agents[i].cost.cost_q(static_cast<double>(lo[i] + m) * step);
        }
        std::vector<double> next(best.size() + static_cast<std::size_t>(span), inf);
        auto& pick = choice[i];
        pick.assign(next.size(), -1);
        for (std::size_t s = 0; s < best.size(); ++s) {
            if (best[s] == inf) continue;
            for (long m = 0; m <= span; ++m) {
                const std::size_t idx = s + static_cast<std::size_t>(m);
                const double v = best[s] + f[static_cast<std::size_t>(m)];
                if (v < next[idx]) {
                    next[idx] = v;
                    pick[idx] = m;
                }
            }
        }
        best = std::move(next);
    }

    GridOptimum out;
    out.cost = best[static_cast<std::size_t>(want)];
    out.q.assign(n, 0.0);
    long s = want;
    for (std::size_t i = n; i-- > 0;) {
        const long m = choice[i][static_cast<std::size_t>(s)];
        out.q[i] = static_cast<double>(lo[i] + m) * step;
        s -= m;
    }
    return out;
}

namespace {

double uniform(std::mt19937_64& rng, double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(rng);
}

template <typename T>
T pick(std::mt19937_64& rng, std::initializer_list<T> values) {
    std::uniform_int_distribution<std::size_t> d(0, values.size() - 1);
    return *(values.begin() + d(rng));
}

degradation::CostModel random_cost(const bess::BessParams& p, int direction,
                                   double depth, double tau) {
    degradation::OpenHalfCycle open{direction, direction == 0 ? 0.0 : depth};
    return degradation::CostModel(p, degradation::AgingParams{}, open, tau);
}

}  // namespace

oracle::OracleAgent random_oracle_agent(std::mt19937_64& rng) {
    bess::BessParams p;
    p.theta_b = uniform(rng, 0.05, 0.2);
    const double tau = pick(rng, {0.1, 1.0, 10.0, 60.0});
    const int direction = pick(rng, {-1, 0, 1});
    const double depth = uniform(rng, 0.0, 0.4);
    const auto mode = uniform(rng, 0.0, 1.0) < 0.5 ? bess::Mode::Charge : bess::Mode::Discharge;
    // Range ends on the 1e-3 lattice so grid_brute_force searches the same box.
    bess::Interval interval{0.0, std::round(uniform(rng, 0.1, 1.0) * 1e3) / 1e3};
    return {random_cost(p, direction, depth, tau), interval, mode};
}

LemmaInstance random_lemma_instance(std::mt19937_64& rng, std::size_t max_agents,
                                    std::size_t max_iterations) {
    LemmaInstance inst;
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, max_agents)(rng);
    const std::size_t iters = std::uniform_int_distribution<std::size_t>(10, max_iterations)(rng);
    inst.agents = n;
    inst.iterations = iters;

    comm::Topology topo{n, {}};
    for (std::size_t i = 0; i + 1 < n; ++i) topo.edges.push_back({i, i + 1});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (uniform(rng, 0.0, 1.0) < 0.3) topo.edges.push_back({i, j});
        }
    }
    const auto w = comm::build_metropolis_weights(topo);

    auto& sched = inst.schedule;
    sched.kappa0 = uniform(rng, 0.2, 3.0);
    sched.eps0 = uniform(rng, 0.05, 0.8);
    sched.gamma = uniform(rng, 0.01, 1.0);
    sched.t_max = std::uniform_int_distribution<long>(5, static_cast<long>(iters))(rng);
    sched.validate();

    struct Agent {
        bess::BessParams params;
        bess::Mode mode;
        double hi;
        int direction;
        double depth;
        double tau;
        double share;
    };
    std::vector<Agent> fleet(n);
    double share_sum = 0.0;
    for (auto& a : fleet) {
        a.params.theta_b = uniform(rng, 0.05, 0.2);
        a.mode = uniform(rng, 0.0, 1.0) < 0.5 ? bess::Mode::Charge : bess::Mode::Discharge;
        a.hi = uniform(rng, 0.2, 1.0);
        a.direction = pick(rng, {-1, 1});
        a.depth = uniform(rng, 0.0, 0.4);
        a.tau = pick(rng, {0.1, 1.0, 10.0});
        a.share = uniform(rng, 0.0, 1.0) < 0.3 ? 0.0 : uniform(rng, 0.1, 1.0);
        share_sum += a.share;
    }
    if (share_sum == 0.0) {
        fleet[0].share = 1.0;
        share_sum = 1.0;
    }
    for (auto& a : fleet) a.share /= share_sum;

    double target = 0.0;
    auto build = [&](std::vector<opt::AgentProblem>& problems,
                     std::vector<oracle::OracleAgent>& oracle_agents, double& tgt) {
        problems.clear();
        oracle_agents.clear();
        double lo = 0.0, hi = 0.0;
        for (auto& a : fleet) {
            a.hi = std::clamp(a.hi + uniform(rng, -0.05, 0.05), 0.2, 1.0);
            a.depth = std::clamp(a.depth + uniform(rng, -0.02, 0.02), 0.0, 0.5);
            const bess::Interval interval{0.0, a.hi};
            oracle::OracleAgent oa{random_cost(a.params, a.direction, a.depth, a.tau), interval,
                                   a.mode};
            lo += oa.q_lo();
            hi += oa.q_hi();
            oracle_agents.push_back(oa);
        }
        tgt = std::clamp(tgt + uniform(rng, -0.15, 0.15), 0.9 * lo, 0.9 * hi);
        for (std::size_t i = 0; i < n; ++i) {
            problems.push_back({oracle_agents[i].cost, oracle_agents[i].interval, fleet[i].mode,
                                -tgt * fleet[i].share});
        }
    };

    auto stacked_u = [&](const std::vector<opt::AgentState>& agents) {
        Eigen::VectorXd v(2 * static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            v(2 * static_cast<Eigen::Index>(i)) = agents[i].u.d;
            v(2 * static_cast<Eigen::Index>(i) + 1) = -agents[i].u.c;
        }
        return v;
    };
    auto stacked_star = [&](const std::vector<bess::Decision>& u) {
        Eigen::VectorXd v(2 * static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            v(2 * static_cast<Eigen::Index>(i)) = u[i].d;
            v(2 * static_cast<Eigen::Index>(i) + 1) = -u[i].c;
        }
        return v;
    };
    auto per_agent = [&](const std::vector<opt::AgentState>& agents, double opt::AgentState::*m) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = agents[i].*m;
        return v;
    };

    auto& trace = inst.trace;
    trace.gamma = sched.gamma;
    trace.b_u = 1.0;

    std::vector<opt::AgentState> agents;
    std::vector<opt::AgentProblem> problems;
    std::vector<oracle::OracleAgent> oracle_agents;
    long stage = 0;
    for (std::size_t t = 0; t < iters; ++t) {
        build(problems, oracle_agents, target);
        if (agents.empty()) {
            std::vector<double> aie0;
            for (const auto& p : problems) aie0.push_back(p.aie);
            agents = opt::initialize_agents(std::vector<bess::Decision>(n), aie0);
        }
        regret::IterationRecord rec;
        rec.u = stacked_u(agents);
        rec.lambda = per_agent(agents, &opt::AgentState::lambda);
        rec.y = per_agent(agents, &opt::AgentState::y);
        const auto sol = oracle::centralized_solve(oracle_agents, target);
        rec.u_star = stacked_star(sol.u_star);
        rec.cost = 0.0;
        rec.oracle_cost = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            rec.cost += problems[i].cost(agents[i].u.d, agents[i].u.c);
            rec.oracle_cost += problems[i].cost(sol.u_star[i].d, sol.u_star[i].c);
        }
        const auto rates = opt::orra_iteration(agents, w, problems, sched, 0.0);
        rec.stage = stage;
        rec.kappa = rates.kappa;
        rec.eps = rates.eps;
        if (rates.reset) ++stage;
        rec.lambda_mixed = per_agent(agents, &opt::AgentState::lambda_mixed);
        rec.y_mixed = per_agent(agents, &opt::AgentState::y_mixed);
        rec.s.resize(2 * static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            rec.s(2 * static_cast<Eigen::Index>(i)) = agents[i].s[0];
            rec.s(2 * static_cast<Eigen::Index>(i) + 1) = agents[i].s[1];
        }
        trace.records.push_back(std::move(rec));
    }
    trace.u_final = stacked_u(agents);
    trace.lambda_final = per_agent(agents, &opt::AgentState::lambda);
    build(problems, oracle_agents, target);
    trace.u_star_final = stacked_star(oracle::centralized_solve(oracle_agents, target).u_star);
    return inst;
}

}  // namespace orra::testing
