#include "orra/comm_graph.hpp"

#include "orra/error.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

namespace orra::comm {

std::vector<std::size_t> Topology::degrees() const {
    std::vector<std::size_t> deg(n, 0);
    const auto adj = adjacency();
    for (std::size_t i = 0; i < n; ++i) deg[i] = adj[i].size();
    return deg;
}

std::vector<std::vector<std::size_t>> Topology::adjacency() const {
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& [a, b] : edges) {
        if (a >= n || b >= n || a == b) continue;
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& list : adj) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return adj;
}

void validate(const Topology& topology) {
    for (const auto& [a, b] : topology.edges) {
        if (a >= topology.n || b >= topology.n) {
            throw TopologyError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                                ") references an agent outside 0.." +
                                std::to_string(topology.n == 0 ? 0 : topology.n - 1));
        }
        if (a == b) {
            throw TopologyError("self-loop on agent " + std::to_string(a));
        }
    }
}

bool is_connected(const Topology& topology) {
    if (topology.n == 0) return false;
    const auto adj = topology.adjacency();
    std::vector<bool> seen(topology.n, false);
    std::queue<std::size_t> frontier;
    frontier.push(0);
    seen[0] = true;
    std::size_t reached = 1;
    while (!frontier.empty()) {
        const auto v = frontier.front();
        frontier.pop();
        for (auto nb : adj[v]) {
            if (!seen[nb]) {
                seen[nb] = true;
                ++reached;
                frontier.push(nb);
            }
        }
    }
    return reached == topology.n;
}

Topology ring_with_chord(std::size_t n) {
    Topology t;
    t.n = n;
    if (n < 2) return t;
    if (n == 2) {
        t.edges = {{0, 1}};
        return t;
    }
    for (std::size_t i = 0; i < n; ++i) t.edges.emplace_back(i, (i + 1) % n);
    if (n >= 4) t.edges.emplace_back(0, n / 2);
    return t;
}

WeightMatrix build_metropolis_weights(const Topology& topology) {
    if (topology.n == 0) throw EmptyInputError("topology has no agents");
    validate(topology);
    if (!is_connected(topology)) throw TopologyError("communication graph is not connected");

    const auto n = static_cast<Eigen::Index>(topology.n);
    const auto adj = topology.adjacency();
    WeightMatrix out{Eigen::MatrixXd::Zero(n, n)};
    for (std::size_t i = 0; i < topology.n; ++i) {
        for (auto j : adj[i]) {
            const double dmax = static_cast<double>(std::max(adj[i].size(), adj[j].size()));
            out.w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0 / (1.0 + dmax);
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        out.w(i, i) = 1.0 - (out.w.row(i).sum() - out.w(i, i));
    }
    return out;
}

bool check_doubly_stochastic(const Eigen::MatrixXd& w, double tol) {
    if (w.rows() != w.cols()) return false;
    if ((w.array() < 0.0).any()) return false;
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        if (std::abs(w.row(i).sum() - 1.0) > tol) return false;
        if (std::abs(w.col(i).sum() - 1.0) > tol) return false;
    }
    return true;
}

Eigen::MatrixXd mix(const Eigen::MatrixXd& values, const WeightMatrix& w) {
    if (values.rows() != w.w.cols()) {
        throw DimensionError("mix: " + std::to_string(values.rows()) + " agent rows for a " +
                             std::to_string(w.w.rows()) + "-agent weight matrix");
    }
    return w.w * values;
}

Eigen::VectorXd mix(const Eigen::VectorXd& values, const WeightMatrix& w) {
    if (values.size() != w.w.cols()) {
        throw DimensionError("mix: " + std::to_string(values.size()) + " agent values for a " +
                             std::to_string(w.w.rows()) + "-agent weight matrix");
    }
    return w.w * values;
}

}  // namespace orra::comm
