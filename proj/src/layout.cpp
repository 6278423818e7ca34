#include "drawnet/layout.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace drawnet {

namespace {

std::vector<std::size_t> by_descending_impact(const std::vector<std::size_t>& nodes,
                                              const std::vector<CentralityProfile>& profiles) {
    auto order = nodes;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return profiles[a].impacting > profiles[b].impacting;
    });
    return order;
}

void place_wing(const std::vector<std::size_t>& order, double arc_begin, double arc_end,
                const LayoutOptions& options, std::vector<NodeGlyph>& glyphs,
                const std::vector<std::size_t>& slot) {
    const std::size_t cap = std::max<std::size_t>(options.ring_capacity, 1);
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t ring = k / cap;
        const std::size_t pos = k % cap;
        const std::size_t in_ring = std::min(cap, order.size() - ring * cap);
        const double frac = in_ring == 1 ? 0.5 : static_cast<double>(pos) / static_cast<double>(in_ring - 1);
        const double angle = arc_begin + (arc_end - arc_begin) * frac;
        const double rho = options.in_out_offset + options.ring_step * static_cast<double>(ring);
        auto& g = glyphs[slot[order[k]]];
        g.x = rho * std::cos(angle);
        g.y = rho * std::sin(angle);
    }
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    // "-0.000" would make otherwise identical layouts differ in bytes
    return std::string(buf) == "-0.000" ? "0.000" : buf;
}

std::string escape_xml(std::string_view s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += ch;
        }
    }
    return out;
}

int hex_channel(const std::string& color, std::size_t offset) {
    if (color.size() != 7 || color[0] != '#') throw std::invalid_argument("colors must look like #rrggbb");
    return std::stoi(color.substr(offset, 2), nullptr, 16);
}

}  // namespace

std::vector<NodeGlyph> place_nodes(const std::vector<Region>& regions,
                                   const std::vector<CentralityProfile>& profiles,
                                   const LayoutOptions& options) {
    if (regions.size() != profiles.size()) {
        throw std::invalid_argument("place_nodes: every node needs a centrality profile");
    }
    const std::size_t n = regions.size();
    std::vector<double> size_value(n);
    if (options.size_attribute) {
        const auto& attr = *options.size_attribute;
        if (attr.size() != n) throw std::invalid_argument("place_nodes: size attribute count mismatch");
        const double top = attr.empty() ? 0.0 : *std::max_element(attr.begin(), attr.end());
        for (std::size_t i = 0; i < n; ++i) size_value[i] = top > 0.0 ? attr[i] / top : 0.0;
    } else {
        for (std::size_t i = 0; i < n; ++i) size_value[i] = profiles[i].impacting;
    }

    std::vector<NodeGlyph> glyphs;
    std::vector<std::size_t> slot(n, 0);
    std::vector<std::size_t> scc, in, out;
    for (std::size_t i = 0; i < n; ++i) {
        if (regions[i] == Region::Disconnected) continue;
        if (!std::isfinite(profiles[i].impacting)) {
            throw std::invalid_argument("place_nodes: missing centrality for '" + profiles[i].entity_id + "'");
        }
        slot[i] = glyphs.size();
        NodeGlyph g;
        g.node = i;
        g.entity_id = profiles[i].entity_id;
        g.region = regions[i];
        g.color_value = std::clamp(profiles[i].impacting, 0.0, 1.0);
        g.radius = options.min_glyph + (options.max_glyph - options.min_glyph) * std::clamp(size_value[i], 0.0, 1.0);
        glyphs.push_back(std::move(g));
        (regions[i] == Region::Scc ? scc : regions[i] == Region::In ? in : out).push_back(i);
    }

    const auto scc_order = by_descending_impact(scc, profiles);
    for (std::size_t k = 0; k < scc_order.size(); ++k) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(scc_order.size());
        const double rho = 1.0 - profiles[scc_order[k]].impacting;
        auto& g = glyphs[slot[scc_order[k]]];
        g.x = rho * std::cos(angle);
        g.y = rho * std::sin(angle);
    }
    place_wing(by_descending_impact(out, profiles), kOutArcBegin, kOutArcEnd, options, glyphs, slot);
    place_wing(by_descending_impact(in, profiles), kInArcBegin, kInArcEnd, options, glyphs, slot);
    return glyphs;
}

std::string ramp_color(const SvgStyle& style, double value) {
    const double t = std::clamp(std::isfinite(value) ? value : 0.0, 0.0, 1.0);
    char buf[8];
    int rgb[3];
    for (int c = 0; c < 3; ++c) {
        const int lo = hex_channel(style.ramp_low, 1 + 2 * static_cast<std::size_t>(c));
        const int hi = hex_channel(style.ramp_high, 1 + 2 * static_cast<std::size_t>(c));
        rgb[c] = static_cast<int>(std::lround(lo + (hi - lo) * t));
    }
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
    return buf;
}

std::string render_svg(const std::vector<NodeGlyph>& glyphs, const std::vector<Edge>& edges,
                       const SvgStyle& style) {
    std::unordered_map<std::size_t, const NodeGlyph*> by_node;
    double extent = 1.0;
    for (const auto& g : glyphs) {
        if (!std::isfinite(g.x) || !std::isfinite(g.y)) throw std::invalid_argument("render_svg: non-finite glyph");
        by_node[g.node] = &g;
        extent = std::max(extent, std::hypot(g.x, g.y) + g.radius);
    }
    extent += 0.1;
    const double size = style.canvas;
    const double scale = size / (2.0 * extent);
    const double centre = size / 2.0;
    // y grows downward on screen, so the IN arc (around 3pi/2) ends up on top.
    auto px = [&](double v) { return fmt(centre + v * scale); };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(size) + "\" height=\"" + fmt(size) +
           "\" viewBox=\"0 0 " + fmt(size) + " " + fmt(size) + "\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + fmt(size) + "\" height=\"" + fmt(size) + "\" fill=\"" +
           style.background + "\"/>\n";
    svg += "<circle cx=\"" + px(0) + "\" cy=\"" + px(0) + "\" r=\"" + fmt(scale) +
           "\" fill=\"none\" stroke=\"#dddddd\" stroke-dasharray=\"4 4\" class=\"scc-boundary\"/>\n";

    svg += "<g class=\"edges\" fill=\"none\" stroke-width=\"1\" stroke-opacity=\"0.6\">\n";
    for (const auto& e : edges) {
        const auto a = by_node.find(e.source);
        const auto b = by_node.find(e.target);
        if (a == by_node.end() || b == by_node.end()) continue;
        const NodeGlyph& s = *a->second;
        const NodeGlyph& t = *b->second;
        std::string color = style.other;
        if (s.region == Region::In && t.region == Region::Scc) color = style.in_to_scc;
        if (s.region == Region::Scc && t.region == Region::Scc) color = style.scc_to_scc;
        if (s.region == Region::Scc && t.region == Region::Out) color = style.scc_to_out;
        const double cx = 0.25 * (s.x + t.x);
        const double cy = 0.25 * (s.y + t.y);
        svg += "<path d=\"M " + px(s.x) + " " + px(s.y) + " Q " + px(cx) + " " + px(cy) + " " + px(t.x) + " " +
               px(t.y) + "\" stroke=\"" + color + "\"/>\n";
    }
    svg += "</g>\n";

    svg += "<g class=\"nodes\" stroke=\"#333333\" stroke-width=\"0.5\">\n";
    for (const auto& g : glyphs) {
        svg += "<circle cx=\"" + px(g.x) + "\" cy=\"" + px(g.y) + "\" r=\"" + fmt(g.radius * scale) + "\" fill=\"" +
               ramp_color(style, g.color_value) + "\"><title>" + escape_xml(g.entity_id) + " (" +
               std::string(to_string(g.region)) + ")</title></circle>\n";
    }
    svg += "</g>\n";
    if (style.labels) {
        svg += "<g class=\"labels\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#222222\">\n";
        for (const auto& g : glyphs) {
            svg += "<text x=\"" + fmt(centre + g.x * scale + g.radius * scale + 2.0) + "\" y=\"" + px(g.y) + "\">" +
                   escape_xml(g.entity_id) + "</text>\n";
        }
        svg += "</g>\n";
    }
    svg += "</svg>\n";
    return svg;
}

nlohmann::json glyphs_to_json(const std::vector<NodeGlyph>& glyphs) {
    auto arr = nlohmann::json::array();
    for (const auto& g : glyphs) {
        arr.push_back({{"entity", g.entity_id},
                       {"node", g.node},
                       {"x", g.x + 0.0},
                       {"y", g.y + 0.0},
                       {"radius", g.radius},
                       {"color_value", g.color_value},
                       {"region", std::string(to_string(g.region))}});
    }
    return arr;
}

}  // namespace drawnet
