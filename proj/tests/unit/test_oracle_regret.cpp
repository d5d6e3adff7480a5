#include "oracles.hpp"
#include "orra/error.hpp"
#include "orra/oracle_regret.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace orra;
using namespace orra::oracle;

namespace {

OracleAgent quadratic(double theta_b, double hi, bess::Mode mode) {
    bess::BessParams p;
    p.theta_b = theta_b;
    p.theta_a = 0.0;
    return {degradation::CostModel(p, {}, {}, 0.1), {0.0, hi}, mode};
}

regret::IterationRecord zero_record(std::size_t n, double kappa) {
    regret::IterationRecord r;
    r.kappa = kappa;
    r.eps = 0.5;
    for (auto* v : {&r.u, &r.u_star, &r.s}) *v = Eigen::VectorXd::Zero(2 * static_cast<Eigen::Index>(n));
    for (auto* v : {&r.lambda, &r.lambda_mixed, &r.y, &r.y_mixed})
        *v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    return r;
}

}  // namespace

TEST_CASE("centralized solve examples") {
    std::vector<OracleAgent> idle(3, quadratic(0.1, 1.0, bess::Mode::Discharge));
    auto zero = centralized_solve(idle, 0.0);
    for (const auto& u : zero.u_star) {
        CHECK(u.d == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(u.c == 0.0);
    }

    std::vector<OracleAgent> twins(2, quadratic(0.1, 1.0, bess::Mode::Discharge));
    auto half = centralized_solve(twins, 1.0);
    CHECK(half.u_star[0].d == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(half.u_star[1].d == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(half.residual <= 1e-6);
    auto grid = testing::grid_brute_force(twins, 1.0);
    CHECK(grid.q[0] == doctest::Approx(0.5).epsilon(2e-3));

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<OracleAgent> agents;
        double lo = 0.0, hi = 0.0;
        for (int i = 0; i < 3; ++i) {
            agents.push_back(quadratic(0.05 + 0.2 * u(rng), 0.1 + 0.9 * u(rng),
                                       u(rng) < 0.5 ? bess::Mode::Charge : bess::Mode::Discharge));
            lo += agents.back().q_lo();
            hi += agents.back().q_hi();
        }
        const double target = lo + (hi - lo) * u(rng);
        const auto sol = centralized_solve(agents, target);
        const auto ref = testing::grid_brute_force(agents, target);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(std::abs(sol.u_star[i].d - sol.u_star[i].c - ref.q[i]) <= 2e-3);
        }
    }
}

TEST_CASE("centralized solve reports infeasible targets") {
    std::vector<OracleAgent> agents(2, quadratic(0.1, 0.5, bess::Mode::Discharge));
    try {
        centralized_solve(agents, 1.5);
        FAIL("expected InfeasibleError");
    } catch (const InfeasibleError& e) {
        CHECK(e.achievable_lo() == doctest::Approx(0.0));
        CHECK(e.achievable_hi() == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS(centralized_solve({}, 0.0), EmptyInputError);
}

TEST_CASE("interior marginal costs equalize at the optimum") {
    std::mt19937_64 rng(23);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<OracleAgent> agents;
        const auto mode = trial % 2 ? bess::Mode::Charge : bess::Mode::Discharge;
        double lo = 0.0, hi = 0.0;
        for (int i = 0; i < 4; ++i) {
            auto a = testing::random_oracle_agent(rng);
            a.mode = mode;
            lo += a.q_lo();
            hi += a.q_hi();
            agents.push_back(a);
        }
        const double target = lo + (hi - lo) * std::uniform_real_distribution<double>(0.1, 0.9)(rng);
        const auto sol = centralized_solve(agents, target);
        CHECK(sol.residual <= 1e-6);
        std::vector<double> mc;
        for (std::size_t i = 0; i < agents.size(); ++i) {
            const double q = sol.u_star[i].d - sol.u_star[i].c;
            CHECK(q >= agents[i].q_lo() - 1e-12);
            CHECK(q <= agents[i].q_hi() + 1e-12);
            if (std::abs(q) > 1e-6 && q > agents[i].q_lo() + 1e-6 && q < agents[i].q_hi() - 1e-6) {
                mc.push_back(marginal_cost(agents[i], q));
                CHECK(mc.back() + sol.nu == doctest::Approx(0.0).epsilon(1e-6).scale(1.0));
            }
        }
        if (mc.size() >= 2) {
            ++checked;
            for (double m : mc) CHECK(std::abs(m - mc.front()) <= 1e-6);
        }
    }
    CHECK(checked > 50);
}

TEST_CASE("best response is monotone in the multiplier") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = testing::random_oracle_agent(rng);
        double prev = INFINITY;
        for (double nu = -5.0; nu <= 5.0; nu += 0.05) {
            const double q = best_response(a, nu);
            CHECK(q <= prev + 1e-12);
            prev = q;
        }
    }
}

TEST_CASE("dynamic regret") {
    regret::RegretTrace tr;
    auto r = zero_record(1, 1.0);
    r.cost = 1.2;
    r.oracle_cost = 1.0;
    tr.records.push_back(r);
    CHECK(regret::dynamic_regret(tr, 1) == doctest::Approx(0.2));
    tr.records[0].cost = 1.0;
    CHECK(regret::dynamic_regret(tr, 1) == 0.0);
    tr.records[0].oracle_cost = NAN;
    CHECK_THROWS_AS(regret::dynamic_regret(tr, 1), IncompleteTraceError);
    CHECK_THROWS_AS(regret::dynamic_regret(tr, 2), IncompleteTraceError);
}

TEST_CASE("lemma checks on an all-zero log") {
    regret::RegretTrace tr;
    for (int t = 0; t < 10; ++t) tr.records.push_back(zero_record(3, 1.0 / std::sqrt(t + 1.0)));
    tr.u_final = Eigen::VectorXd::Zero(6);
    tr.lambda_final = Eigen::VectorXd::Zero(3);
    tr.u_star_final = Eigen::VectorXd::Zero(6);
    const auto l1 = regret::lemma1_check(tr, 0, 10);
    CHECK(l1.lhs == 0.0);
    CHECK(l1.rhs == 0.0);
    CHECK(l1.holds);
    const auto l2 = regret::lemma2_check(tr, 0, 10);
    CHECK(l2.v_t == 0.0);
    CHECK(l2.s_t <= 2.0 * 3 * 1.0 / tr.records.back().kappa);
    CHECK(l2.holds);

    tr.records[4].kappa = 5.0;
    CHECK_THROWS_AS(regret::lemma2_check(tr, 0, 10), PreconditionError);
}

TEST_CASE("lemma 2 with a static optimum") {
    regret::RegretTrace tr;
    Eigen::VectorXd star(4);
    star << 0.4, 0.0, 0.0, -0.3;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(4);
    for (int t = 0; t < 30; ++t) {
        auto r = zero_record(2, 0.5 / std::sqrt(t + 1.0));
        r.u = u;
        r.u_star = star;
        tr.records.push_back(r);
        u += 0.2 * (star - u);
    }
    tr.u_final = u;
    tr.lambda_final = Eigen::VectorXd::Zero(2);
    tr.u_star_final = star;
    const auto l2 = regret::lemma2_check(tr, 0, 30);
    CHECK(l2.v_t == 0.0);
    CHECK(l2.bound == doctest::Approx(2.0 * 2 * 1.0 / tr.records.back().kappa));
    CHECK(l2.holds);
}

TEST_CASE("regret slope fitter") {
    const std::vector<double> t{10, 30, 100, 300, 1000};
    std::vector<double> sq, lin, neg;
    for (double h : t) {
        sq.push_back(3.0 * std::sqrt(h));
        lin.push_back(0.7 * h);
        neg.push_back(-2.0 * std::pow(h, 0.4));
    }
    const auto a = regret::regret_slope(t, sq);
    CHECK(a.slope == doctest::Approx(0.5).epsilon(0.02));
    CHECK(a.sublinear());
    const auto b = regret::regret_slope(t, lin);
    CHECK(b.slope == doctest::Approx(1.0).epsilon(0.02));
    CHECK_FALSE(b.sublinear());
    CHECK(regret::regret_slope(t, neg).slope == doctest::Approx(0.4).epsilon(0.02));

    std::vector<double> with_zero = sq;
    with_zero[2] = 0.0;
    const auto c = regret::regret_slope(t, with_zero);
    CHECK(c.used == 4);
    REQUIRE(c.excluded.size() == 1);
    CHECK(c.excluded[0] == 2);
    CHECK_THROWS_AS(regret::regret_slope({10, 100}, {0.0, 1.0}), PreconditionError);
}

TEST_CASE("random lemma instances are well formed") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 10; ++i) {
        const auto inst = testing::random_lemma_instance(rng);
        CHECK(inst.agents >= 2);
        CHECK(inst.agents <= 4);
        CHECK(inst.iterations <= 50);
        CHECK(inst.trace.records.size() == inst.iterations);
        CHECK(std::isfinite(regret::dynamic_regret(inst.trace, inst.iterations)));
        for (const auto& [b, e] : inst.trace.stages()) {
            const auto l1 = regret::lemma1_check(inst.trace, b, e);
            CHECK(std::isfinite(l1.lhs));
            CHECK(std::isfinite(l1.rhs));
        }
    }
}
