#include "drawnet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace drawnet {

namespace {

void sort_edges(std::vector<Edge>& edges) {
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return a.source != b.source ? a.source < b.source : a.target < b.target;
    });
}

std::vector<std::vector<std::size_t>> adjacency(std::size_t n, const std::vector<Edge>& edges) {
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& e : edges) adj.at(e.source).push_back(e.target);
    return adj;
}

}  // namespace

std::vector<std::vector<std::size_t>> DependencyNetwork::out_adjacency() const {
    return adjacency(size(), edges);
}

std::vector<std::size_t> DependencyNetwork::out_degrees() const {
    std::vector<std::size_t> deg(size(), 0);
    for (const auto& e : edges) ++deg[e.source];
    return deg;
}

std::vector<std::size_t> DependencyNetwork::in_degrees() const {
    std::vector<std::size_t> deg(size(), 0);
    for (const auto& e : edges) ++deg[e.target];
    return deg;
}

DependencyNetwork build_network(const Eigen::MatrixXd& weights, std::vector<std::string> names) {
    if (weights.rows() != weights.cols()) throw std::invalid_argument("build_network: W must be square");
    const auto n = static_cast<std::size_t>(weights.rows());
    if (names.empty()) {
        for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
    }
    if (names.size() != n) throw std::invalid_argument("build_network: name count mismatch");

    DependencyNetwork net;
    net.nodes = std::move(names);
    net.self_loops.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        net.self_loops[i] = weights(r, r);
        for (std::size_t j = 0; j < n; ++j) {
            const double w = weights(r, static_cast<Eigen::Index>(j));
            if (i != j && w > 0.0) net.edges.push_back({i, j, w});
        }
    }
    return net;
}

DependencyNetwork with_edges(const DependencyNetwork& net, std::vector<Edge> edges) {
    DependencyNetwork out;
    out.nodes = net.nodes;
    out.self_loops = net.self_loops;
    for (const auto& e : edges) {
        if (e.source >= net.size() || e.target >= net.size() || e.source == e.target) {
            throw std::invalid_argument("with_edges: invalid edge");
        }
    }
    sort_edges(edges);
    out.edges = std::move(edges);
    return out;
}

DependencyNetwork induced_subnetwork(const DependencyNetwork& net,
                                     const std::vector<std::size_t>& keep) {
    constexpr auto absent = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> index(net.size(), absent);
    DependencyNetwork out;
    for (std::size_t k = 0; k < keep.size(); ++k) {
        index.at(keep[k]) = k;
        out.nodes.push_back(net.nodes[keep[k]]);
        out.self_loops.push_back(net.self_loops[keep[k]]);
    }
    for (const auto& e : net.edges) {
        if (index[e.source] != absent && index[e.target] != absent) {
            out.edges.push_back({index[e.source], index[e.target], e.weight});
        }
    }
    sort_edges(out.edges);
    return out;
}

std::vector<std::vector<std::size_t>> strongly_connected_components(std::size_t n,
                                                                    const std::vector<Edge>& edges) {
    const auto adj = adjacency(n, edges);
    constexpr auto unvisited = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> index(n, unvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> components;
    std::size_t counter = 0;

    // explicit DFS frames: (node, next neighbour position)
    std::vector<std::pair<std::size_t, std::size_t>> frames;
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unvisited) continue;
        frames.emplace_back(root, 0);
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            auto& [v, pos] = frames.back();
            if (pos < adj[v].size()) {
                const std::size_t w = adj[v][pos++];
                if (index[w] == unvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            const std::size_t done = v;
            frames.pop_back();
            if (!frames.empty()) {
                const std::size_t parent = frames.back().first;
                low[parent] = std::min(low[parent], low[done]);
            }
            if (low[done] == index[done]) {
                std::vector<std::size_t> comp;
                std::size_t w = 0;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp.push_back(w);
                } while (w != done);
                std::sort(comp.begin(), comp.end());
                components.push_back(std::move(comp));
            }
        }
    }
    std::sort(components.begin(), components.end(), [](const auto& a, const auto& b) {
        return a.size() != b.size() ? a.size() > b.size() : a.front() < b.front();
    });
    return components;
}

std::vector<std::vector<std::size_t>> strongly_connected_components(const DependencyNetwork& net) {
    return strongly_connected_components(net.size(), net.edges);
}

std::vector<std::size_t> bfs_distances(const std::vector<std::vector<std::size_t>>& adjacency,
                                       std::size_t source) {
    std::vector<std::size_t> dist(adjacency.size(), std::numeric_limits<std::size_t>::max());
    std::queue<std::size_t> queue;
    dist.at(source) = 0;
    queue.push(source);
    while (!queue.empty()) {
        const std::size_t v = queue.front();
        queue.pop();
        for (auto w : adjacency[v]) {
            if (dist[w] == std::numeric_limits<std::size_t>::max()) {
                dist[w] = dist[v] + 1;
                queue.push(w);
            }
        }
    }
    return dist;
}

ConnectivityReport connectivity_report(const DependencyNetwork& net) {
    ConnectivityReport report;
    report.n_nodes = net.size();
    const auto outd = net.out_degrees();
    const auto ind = net.in_degrees();
    for (std::size_t v = 0; v < net.size(); ++v) {
        if (outd[v] == 0 && ind[v] == 0) ++report.n_disconnected;
    }

    const auto components = strongly_connected_components(net);
    if (components.empty() || components.front().size() < 2) {
        report.n_connected_outside_lscc = net.size() - report.n_disconnected;
        return report;
    }
    report.lscc_nodes = components.front();
    report.n_connected_outside_lscc = net.size() - report.n_disconnected - report.lscc_nodes.size();

    const auto sub = induced_subnetwork(net, report.lscc_nodes);
    const std::size_t n = sub.size();
    report.lscc_edges = sub.edges.size();
    report.density = static_cast<double>(sub.edges.size()) / static_cast<double>(n * (n - 1));

    const auto deg = sub.out_degrees();
    double mean = 0.0;
    for (auto d : deg) mean += static_cast<double>(d);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (auto d : deg) var += (static_cast<double>(d) - mean) * (static_cast<double>(d) - mean);
    report.mean_out_degree = mean;
    report.stddev_out_degree = std::sqrt(var / static_cast<double>(n));

    const auto adj = sub.out_adjacency();
    std::size_t total = 0;
    for (std::size_t s = 0; s < n; ++s) {
        const auto dist = bfs_distances(adj, s);
        for (std::size_t t = 0; t < n; ++t) {
            if (t != s) total += dist[t];
        }
    }
    report.mean_path_length = static_cast<double>(total) / static_cast<double>(n * (n - 1));
    return report;
}

}  // namespace drawnet
