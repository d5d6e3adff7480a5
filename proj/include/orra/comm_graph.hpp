#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <utility>
#include <vector>

namespace orra::comm {

/// Undirected communication graph over agents 0..n-1.
struct Topology {
    std::size_t n = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;

    std::vector<std::size_t> degrees() const;
    std::vector<std::vector<std::size_t>> adjacency() const;
};

/// Throws TopologyError on out-of-range indices or self-loops.
void validate(const Topology& topology);
bool is_connected(const Topology& topology);

/// Ring 0-1-...-(n-1)-0 plus one chord from agent 0 to agent n/2 (n >= 4).
Topology ring_with_chord(std::size_t n);

/// Mixing matrix used by the gossip step. Rows index the receiving agent.
struct WeightMatrix {
    Eigen::MatrixXd w;

    std::size_t size() const { return static_cast<std::size_t>(w.rows()); }
    double operator()(std::size_t i, std::size_t j) const {
        return w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
};

/// Metropolis-Hastings weights: w_ij = 1 / (1 + max(deg_i, deg_j)) on edges,
/// w_ii = 1 - sum_j w_ij.
WeightMatrix build_metropolis_weights(const Topology& topology);

/// Row sums and column sums within `tol` of one, all entries nonnegative.
bool check_doubly_stochastic(const Eigen::MatrixXd& w, double tol = 1e-9);
inline bool check_doubly_stochastic(const WeightMatrix& w, double tol = 1e-9) {
    return check_doubly_stochastic(w.w, tol);
}

/// One synchronous gossip round. Row i of `values` is agent i's vector;
/// returns W * values.
Eigen::MatrixXd mix(const Eigen::MatrixXd& values, const WeightMatrix& w);
Eigen::VectorXd mix(const Eigen::VectorXd& values, const WeightMatrix& w);

}  // namespace orra::comm
