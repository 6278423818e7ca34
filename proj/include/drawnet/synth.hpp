#pragma once

#include "drawnet/date.hpp"
#include "drawnet/ingest.hpp"

#include "json.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace drawnet {

struct PlantedEdge {
    std::size_t source;
    std::size_t target;
    int lag;  ///< 1..3 days

    bool operator==(const PlantedEdge&) const = default;
};

/// Days [start, end) run at `volatility` times the base noise, jump
/// probability, coupling and jump size (probabilities capped at 1).
struct Regime {
    std::size_t start;
    std::size_t end;
    double volatility;
};

struct SynthSpec {
    std::size_t n_entities = 20;
    std::size_t days = 3000;
    std::vector<PlantedEdge> edges;
    double coupling = 0.3;
    double base_jump_prob = 0.01;
    double jump_log_mean = 3.9;  ///< log of the median jump size in bp (~50 bp)
    double jump_log_sd = 0.25;
    std::size_t ramp_days = 3;
    double correction_fraction = 0.6;
    std::size_t decay_days = 6;
    double baseline_noise = 0.0;  ///< daily log-return sd of the baseline walk
    double start_price = 100.0;
    std::vector<Regime> regimes;
    std::uint64_t seed = 1;
    Date start_date = Date::from_ymd(2003, 4, 1);

    void validate() const;
    double volatility_at(std::size_t day) const;
};

struct SynthPanel {
    PricePanel panel;
    /// jumps[i][t] = 1 when entity i's planted jump peaks on day t.
    std::vector<std::vector<std::uint8_t>> jumps;
};

SynthPanel generate_panel(const SynthSpec& spec);

/// Weekday calendar of `days` entries starting at (or after) `start`.
std::vector<Date> business_days(Date start, std::size_t days);

/// Disjoint source -> target pairs with lags cycling through 1, 2, 3.
std::vector<PlantedEdge> matching_edges(std::size_t n_entities, std::uint64_t seed);

/// Disjoint pairs coupled both ways, so a jump echoes back to its source
/// lag_out + lag_back days later.
std::vector<PlantedEdge> reciprocal_edges(std::size_t n_entities, std::uint64_t seed, int lag_out = 1,
                                          int lag_back = 2);
/// Erdos-Renyi digraph with per-edge lags drawn from {1, 2, 3}.
std::vector<PlantedEdge> random_edges(std::size_t n_entities, double density, std::uint64_t seed);

nlohmann::json ground_truth_json(const SynthSpec& spec, const SynthPanel& result);

}  // namespace drawnet
