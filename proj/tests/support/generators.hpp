#pragma once

// Hand-rolled random instance generators and brute-force oracles shared by
// the unit and acceptance tests.

#include "drawnet/drawup.hpp"
#include "drawnet/graph.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace gen {

using Rng = std::mt19937_64;

inline std::vector<std::uint8_t> events(Rng& rng, std::size_t days, double p) {
    std::bernoulli_distribution hit(p);
    std::vector<std::uint8_t> v(days);
    for (auto& e : v) e = hit(rng) ? 1 : 0;
    return v;
}

inline drawnet::DrawupVector drawup_vector(std::string id, std::vector<std::uint8_t> ev) {
    drawnet::DrawupVector v;
    v.entity_id = std::move(id);
    v.events = std::move(ev);
    return v;
}

/// Integer-valued walk with frequent flat days, so plateaus and ties show up.
inline std::vector<double> walk(Rng& rng, std::size_t days, int step = 5) {
    std::uniform_int_distribution<int> d(-step, step);
    std::vector<double> s(days);
    double x = 1000.0;
    for (auto& v : s) {
        x += d(rng);
        v = x;
    }
    return s;
}

inline Eigen::MatrixXd weights(Rng& rng, std::size_t n, double density, bool diagonal = true) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            if (i == j && !diagonal) continue;
            if (u(rng) < density) w(i, j) = 0.01 + u(rng);
        }
    }
    return w;
}

inline std::vector<drawnet::Edge> digraph(Rng& rng, std::size_t n, double density) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<drawnet::Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && u(rng) < density) edges.push_back({i, j, 1.0});
        }
    }
    return edges;
}

/// reach[i][j]: j reachable from i by a path of length >= 0.
inline std::vector<std::vector<bool>> closure(std::size_t n, const std::vector<drawnet::Edge>& edges) {
    std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) r[i][i] = true;
    for (const auto& e : edges) r[e.source][e.target] = true;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (r[i][k] && r[k][j]) r[i][j] = true;
    return r;
}

/// All-pairs hop distances, SIZE_MAX when unreachable.
inline std::vector<std::vector<std::size_t>> floyd(std::size_t n, const std::vector<drawnet::Edge>& edges) {
    constexpr auto inf = std::numeric_limits<std::size_t>::max();
    std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, inf));
    for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
    for (const auto& e : edges) d[e.source][e.target] = std::min<std::size_t>(d[e.source][e.target], 1);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (d[i][k] != inf && d[k][j] != inf && d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
    return d;
}

inline std::size_t brute_joint(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b, int lag) {
    std::size_t c = 0;
    for (std::size_t t = 0; t < a.size(); ++t)
        for (std::size_t s = 0; s < b.size(); ++s)
            if (s == t + static_cast<std::size_t>(lag) && a[t] && b[s]) ++c;
    return c;
}

}  // namespace gen
