#include "drawnet/bowtie.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace drawnet {

std::string_view to_string(Region region) {
    switch (region) {
        case Region::In: return "IN";
        case Region::Scc: return "SCC";
        case Region::Out: return "OUT";
        case Region::Disconnected: return "DISCONNECTED";
    }
    return "?";
}

Region region_from_string(std::string_view text) {
    if (text == "IN") return Region::In;
    if (text == "SCC") return Region::Scc;
    if (text == "OUT") return Region::Out;
    if (text == "DISCONNECTED") return Region::Disconnected;
    throw std::invalid_argument("unknown region '" + std::string(text) + "'");
}

BowtieThresholds BowtieThresholds::from_delta(double delta, ThresholdMode mode) {
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    BowtieThresholds t;
    t.upper = 1.0 + delta;
    t.lower = mode == ThresholdMode::Reciprocal ? 1.0 / (1.0 + delta) : 1.0 - delta;
    t.validate();
    return t;
}

void BowtieThresholds::validate() const {
    if (!(upper > 1.0 && lower < 1.0 && lower > 0.0)) {
        throw std::invalid_argument("bow-tie thresholds must satisfy upper > 1 > lower > 0");
    }
}

std::vector<Region> classify_regions(std::span<const double> ratios,
                                     const BowtieThresholds& thresholds) {
    thresholds.validate();
    std::vector<Region> out;
    out.reserve(ratios.size());
    for (double r : ratios) {
        if (std::isnan(r)) {
            out.push_back(Region::Disconnected);
        } else if (r > thresholds.upper) {
            out.push_back(Region::In);
        } else if (r < thresholds.lower) {
            out.push_back(Region::Out);
        } else {
            out.push_back(Region::Scc);
        }
    }
    return out;
}

namespace {

std::vector<std::vector<std::size_t>> middle_components(const std::vector<Region>& regions,
                                                        const std::vector<Edge>& edges) {
    std::vector<std::size_t> middle;
    constexpr auto absent = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> index(regions.size(), absent);
    for (std::size_t v = 0; v < regions.size(); ++v) {
        if (regions[v] == Region::Scc) {
            index[v] = middle.size();
            middle.push_back(v);
        }
    }
    std::vector<Edge> sub;
    for (const auto& e : edges) {
        if (index[e.source] != absent && index[e.target] != absent) {
            sub.push_back({index[e.source], index[e.target], e.weight});
        }
    }
    auto comps = strongly_connected_components(middle.size(), sub);
    for (auto& c : comps) {
        for (auto& v : c) v = middle[v];
    }
    return comps;
}

std::vector<bool> reachable(std::size_t n, const std::vector<Edge>& edges,
                            const std::vector<std::size_t>& sources, bool forward) {
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& e : edges) {
        if (forward) {
            adj[e.source].push_back(e.target);
        } else {
            adj[e.target].push_back(e.source);
        }
    }
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack = sources;
    for (auto s : sources) seen[s] = true;
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (auto w : adj[v]) {
            if (!seen[w]) {
                seen[w] = true;
                stack.push_back(w);
            }
        }
    }
    return seen;
}

}  // namespace

BowtieAssignment filter_links(const DependencyNetwork& net, const std::vector<Region>& regions,
                              const BowtieThresholds& thresholds) {
    if (regions.size() != net.size()) throw std::invalid_argument("filter_links: region count mismatch");
    BowtieAssignment out;
    out.regions = regions;
    out.thresholds = thresholds;
    for (const auto& e : net.edges) {
        if (regions[e.target] == Region::In || regions[e.source] == Region::Out) continue;
        out.filtered_edges.push_back(e);
    }
    const auto comps = middle_components(regions, out.filtered_edges);
    out.middle_has_nontrivial_scc = !comps.empty() && comps.front().size() >= 2;
    return out;
}

BowtieDiagnostics validate_bowtie(const BowtieAssignment& assignment) {
    BowtieDiagnostics diag;
    const auto& regions = assignment.regions;
    const std::size_t n = regions.size();
    std::vector<std::size_t> middle;
    for (std::size_t v = 0; v < n; ++v) {
        switch (regions[v]) {
            case Region::In: ++diag.n_in; break;
            case Region::Scc: ++diag.n_scc; middle.push_back(v); break;
            case Region::Out: ++diag.n_out; break;
            case Region::Disconnected: ++diag.n_disconnected; break;
        }
    }
    if (n == 0) return diag;

    for (auto& c : strongly_connected_components(n, assignment.filtered_edges)) {
        if (c.size() >= 2) diag.filtered_components.push_back(std::move(c));
    }

    for (const auto& e : assignment.filtered_edges) {
        if (regions[e.target] == Region::In) {
            diag.warnings.push_back("edge " + std::to_string(e.source) + "->" +
                                    std::to_string(e.target) + " enters an IN node");
        }
        if (regions[e.source] == Region::Out) {
            diag.warnings.push_back("edge " + std::to_string(e.source) + "->" +
                                    std::to_string(e.target) + " leaves an OUT node");
        }
    }

    if (middle.size() >= 2) {
        const auto comps = middle_components(regions, assignment.filtered_edges);
        diag.middle_strongly_connected = comps.front().size() == middle.size();
        if (!diag.middle_strongly_connected) {
            diag.warnings.push_back("middle region (" + std::to_string(middle.size()) +
                                    " nodes) is not strongly connected after filtering; largest SCC has " +
                                    std::to_string(comps.front().size()) + " nodes");
        }
    }

    if (middle.empty() && diag.n_in + diag.n_out > 0) {
        diag.warnings.push_back("no middle region: every IN/OUT node is a tube or tendril");
    }
    const auto from_middle = reachable(n, assignment.filtered_edges, middle, true);
    const auto to_middle = reachable(n, assignment.filtered_edges, middle, false);
    for (std::size_t v = 0; v < n; ++v) {
        if ((regions[v] == Region::In && !to_middle[v]) || (regions[v] == Region::Out && !from_middle[v])) {
            diag.tubes_tendrils.push_back(v);
        }
    }
    return diag;
}

}  // namespace drawnet
