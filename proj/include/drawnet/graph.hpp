#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace drawnet {

struct Edge {
    std::size_t source;
    std::size_t target;
    double weight;

    bool operator==(const Edge&) const = default;
};

/// Directed network read off a dependency matrix: an edge i -> j for every
/// off-diagonal W(i, j) > 0. Self-reinforcement lives in `self_loops`.
struct DependencyNetwork {
    std::vector<std::string> nodes;
    std::vector<Edge> edges;  ///< sorted by (source, target)
    std::vector<double> self_loops;

    std::size_t size() const { return nodes.size(); }
    std::vector<std::vector<std::size_t>> out_adjacency() const;
    std::vector<std::size_t> out_degrees() const;
    std::vector<std::size_t> in_degrees() const;
};

DependencyNetwork build_network(const Eigen::MatrixXd& weights,
                                std::vector<std::string> names = {});

/// Same nodes, different edge set (edges are re-sorted).
DependencyNetwork with_edges(const DependencyNetwork& net, std::vector<Edge> edges);

/// Sub-network on `keep` (in the given order); edges are re-indexed.
DependencyNetwork induced_subnetwork(const DependencyNetwork& net,
                                     const std::vector<std::size_t>& keep);

/// Tarjan's algorithm, iterative. Components are sorted internally; the list is
/// ordered largest first, ties broken by smallest member.
std::vector<std::vector<std::size_t>> strongly_connected_components(
    std::size_t n, const std::vector<Edge>& edges);
std::vector<std::vector<std::size_t>> strongly_connected_components(const DependencyNetwork& net);

/// Hop-count BFS distances from `source`; unreachable nodes get SIZE_MAX.
std::vector<std::size_t> bfs_distances(const std::vector<std::vector<std::size_t>>& adjacency,
                                       std::size_t source);

struct ConnectivityReport {
    std::size_t n_nodes = 0;
    std::size_t n_disconnected = 0;             ///< zero in- and out-degree
    std::size_t n_connected_outside_lscc = 0;  ///< has edges, not in the LSCC
    std::vector<std::size_t> lscc_nodes;        ///< empty if no SCC has 2+ nodes
    std::size_t lscc_edges = 0;
    double density = 0.0;
    double mean_out_degree = 0.0;
    double stddev_out_degree = 0.0;  ///< population stddev
    std::optional<double> mean_path_length;
};

/// Statistics of the largest strongly connected component's induced subgraph.
ConnectivityReport connectivity_report(const DependencyNetwork& net);

}  // namespace drawnet
