#pragma once

// Reference implementations used only by the tests. They deliberately take a
// different route from the library code they check.

#include "orra/degradation.hpp"
#include "orra/oracle_regret.hpp"
#include "orra/orra.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace orra::testing {

/// Batch rainflow count of a whole series: turning points first, then the
/// three-point range comparison with a moving start point. Every range not
/// closed as a full cycle is reported as a half cycle.
std::vector<degradation::CycleEvent> batch_rainflow(const std::vector<double>& series);

/// Streams the series through rainflow_step and flushes the residue at the end.
std::vector<degradation::CycleEvent> streaming_rainflow(const std::vector<double>& series);

struct GridOptimum {
    std::vector<double> q;
    double cost = 0.0;
};

/// Exhaustive search over q_i on the lattice step * Z intersected with each
/// agent's range, subject to sum q_i = round(target / step) * step. Solved as a
/// min-plus convolution so N = 4 with 1 MW ranges stays tractable.
GridOptimum grid_brute_force(const std::vector<oracle::OracleAgent>& agents, double target,
                             double step = 1e-3);

/// Random convex per-step problem: heterogeneous quadratic weights, an open
/// half cycle of random direction and depth, random mode and a range whose
/// end lies on the 1e-3 MW lattice.
oracle::OracleAgent random_oracle_agent(std::mt19937_64& rng);

struct LemmaInstance {
    regret::RegretTrace trace;
    std::size_t agents = 0;
    std::size_t iterations = 0;
    opt::LearningSchedule schedule;
};

/// Runs orra_iteration on a random instance with N <= max_agents and
/// T <= max_iterations: random connected graph, time-varying ranges and
/// injection errors, per-step centralized comparator. Returns the regret log.
LemmaInstance random_lemma_instance(std::mt19937_64& rng, std::size_t max_agents = 4,
                                    std::size_t max_iterations = 50);

/// Sum over agents of cost.cost_q(q_i).
double total_cost(const std::vector<oracle::OracleAgent>& agents, const std::vector<double>& q);

}  // namespace orra::testing
