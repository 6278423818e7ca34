#pragma once

#include "drawnet/graph.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace drawnet {

enum class Region { In, Scc, Out, Disconnected };

std::string_view to_string(Region region);
Region region_from_string(std::string_view text);

enum class ThresholdMode {
    Reciprocal,  ///< (1 + delta, 1 / (1 + delta))
    Additive,    ///< (1 + delta, 1 - delta)
};

struct BowtieThresholds {
    double upper = 1.5;
    double lower = 2.0 / 3.0;

    static BowtieThresholds from_delta(double delta, ThresholdMode mode = ThresholdMode::Reciprocal);
    void validate() const;
};

/// r > upper -> IN, r < lower -> OUT, otherwise SCC (closed interval). NaN -> DISCONNECTED.
std::vector<Region> classify_regions(std::span<const double> ratios,
                                     const BowtieThresholds& thresholds = {});

struct BowtieAssignment {
    std::vector<Region> regions;
    BowtieThresholds thresholds;
    std::vector<Edge> filtered_edges;
    bool middle_has_nontrivial_scc = false;
};

/// Drops every edge into an IN node and every edge out of an OUT node.
BowtieAssignment filter_links(const DependencyNetwork& net, const std::vector<Region>& regions,
                              const BowtieThresholds& thresholds = {});

struct BowtieDiagnostics {
    std::size_t n_in = 0;
    std::size_t n_scc = 0;
    std::size_t n_out = 0;
    std::size_t n_disconnected = 0;
    bool middle_strongly_connected = true;
    std::vector<std::vector<std::size_t>> filtered_components;  ///< SCCs with 2+ nodes
    std::vector<std::size_t> tubes_tendrils;  ///< IN not reaching / OUT not reached from the middle
    std::vector<std::string> warnings;
};

BowtieDiagnostics validate_bowtie(const BowtieAssignment& assignment);

}  // namespace drawnet
