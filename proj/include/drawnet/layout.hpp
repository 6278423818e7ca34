#pragma once

#include "drawnet/bowtie.hpp"
#include "drawnet/centrality.hpp"
#include "drawnet/graph.hpp"

#include "json.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace drawnet {

struct NodeGlyph {
    std::size_t node;  ///< index into the centrality profile list
    std::string entity_id;
    double x = 0.0;
    double y = 0.0;
    double radius = 0.0;
    double color_value = 0.0;
    Region region = Region::Scc;
};

struct LayoutOptions {
    double in_out_offset = 1.1;
    double ring_step = 0.15;
    std::size_t ring_capacity = 8;
    double min_glyph = 0.015;
    double max_glyph = 0.06;
    /// Per-node size attribute (e.g. debt); replaces impacting centrality for sizing.
    std::optional<std::vector<double>> size_attribute;
};

/// Arcs (radians) for the IN and OUT wings.
inline constexpr double kOutArcBegin = 3.14159265358979323846 / 2.0;
inline constexpr double kOutArcEnd = 5.0 * 3.14159265358979323846 / 8.0;
inline constexpr double kInArcBegin = 3.0 * 3.14159265358979323846 / 2.0;
inline constexpr double kInArcEnd = 13.0 * 3.14159265358979323846 / 8.0;

/// SCC nodes sit at distance 1 - b from the origin, evenly spaced in angle by
/// descending b. IN/OUT nodes fill rings of `ring_capacity` on their arcs, the
/// first ring at `in_out_offset`. DISCONNECTED nodes are not placed.
std::vector<NodeGlyph> place_nodes(const std::vector<Region>& regions,
                                   const std::vector<CentralityProfile>& profiles,
                                   const LayoutOptions& options = {});

struct SvgStyle {
    std::string background = "#ffffff";
    std::string in_to_scc = "#1e90ff";
    std::string scc_to_scc = "#2ca02c";
    std::string scc_to_out = "#7d8ca3";
    std::string other = "#c8c8c8";
    std::string ramp_low = "#3b4cc0";
    std::string ramp_high = "#d62728";
    double canvas = 800.0;
    bool labels = false;
};

/// Linear RGB interpolation between ramp_low (0) and ramp_high (1).
std::string ramp_color(const SvgStyle& style, double value);

/// Deterministic SVG: background, curved edges, then node circles on top.
/// Edges whose endpoints were not placed are skipped.
std::string render_svg(const std::vector<NodeGlyph>& glyphs, const std::vector<Edge>& edges,
                       const SvgStyle& style = {});

nlohmann::json glyphs_to_json(const std::vector<NodeGlyph>& glyphs);

}  // namespace drawnet
