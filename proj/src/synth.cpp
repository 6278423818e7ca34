#include "drawnet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace drawnet {

namespace {

std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::size_t entity, std::uint64_t stream) {
    return mix(mix(mix(seed) ^ static_cast<std::uint64_t>(entity)) ^ stream);
}

std::string entity_name(std::size_t i, std::size_t n) {
    const int width = n <= 10 ? 1 : static_cast<int>(std::ceil(std::log10(static_cast<double>(n))));
    char buf[32];
    std::snprintf(buf, sizeof buf, "E%0*zu", width, i);
    return buf;
}

}  // namespace

void SynthSpec::validate() const {
    auto fail = [](const std::string& why) { throw std::invalid_argument("synth parameters: " + why); };
    if (n_entities == 0) fail("n_entities must be positive");
    if (days < 2) fail("days must be >= 2");
    if (!(base_jump_prob >= 0.0 && base_jump_prob <= 1.0)) fail("base_jump_prob must lie in [0, 1]");
    if (!(coupling >= 0.0 && coupling <= 1.0)) fail("coupling must lie in [0, 1]");
    if (base_jump_prob + coupling > 1.0 + 1e-12) fail("base_jump_prob + coupling must be <= 1");
    if (ramp_days == 0) fail("ramp_days must be positive");
    if (!(correction_fraction > 0.0 && correction_fraction <= 1.0)) fail("correction_fraction must lie in (0, 1]");
    if (!(baseline_noise >= 0.0)) fail("baseline_noise must be >= 0");
    if (!(start_price > 0.0)) fail("start_price must be positive");
    if (!(jump_log_sd >= 0.0)) fail("jump_log_sd must be >= 0");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& e : edges) {
        if (e.source >= n_entities || e.target >= n_entities) fail("edge endpoint out of range");
        if (e.source == e.target) fail("planted adjacency must have a zero diagonal");
        if (e.lag < 1 || e.lag > 3) fail("edge lag must be 1, 2 or 3");
        if (!seen.emplace(e.source, e.target).second) fail("duplicate planted edge");
    }
    for (const auto& r : regimes) {
        if (!(r.start < r.end && r.end <= days)) fail("regime must satisfy start < end <= days");
        if (!(r.volatility > 0.0)) fail("regime volatility must be positive");
    }
}

double SynthSpec::volatility_at(std::size_t day) const {
    double v = 1.0;
    for (const auto& r : regimes) {
        if (day >= r.start && day < r.end) v = r.volatility;
    }
    return v;
}

std::vector<Date> business_days(Date start, std::size_t days) {
    std::vector<Date> out;
    out.reserve(days);
    for (Date d = start; out.size() < days; d = d + 1) {
        const unsigned wd = d.weekday();
        if (wd != 0 && wd != 6) out.push_back(d);
    }
    return out;
}

SynthPanel generate_panel(const SynthSpec& spec) {
    spec.validate();
    const std::size_t n = spec.n_entities;
    const std::size_t days = spec.days;

    std::vector<std::vector<std::pair<std::size_t, int>>> parents(n);
    for (const auto& e : spec.edges) parents[e.target].emplace_back(e.source, e.lag);

    std::vector<std::mt19937_64> event_rng, noise_rng;
    for (std::size_t i = 0; i < n; ++i) {
        event_rng.emplace_back(stream_seed(spec.seed, i, 1));
        noise_rng.emplace_back(stream_seed(spec.seed, i, 2));
    }

    SynthPanel out;
    out.jumps.assign(n, std::vector<std::uint8_t>(days, 0));
    std::vector<std::vector<double>> amplitude(n, std::vector<double>(days, 0.0));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // Day-major so coupled jumps see their parents' earlier jumps.
    for (std::size_t t = 0; t < days; ++t) {
        const double vol = spec.volatility_at(t);
        for (std::size_t j = 0; j < n; ++j) {
            bool triggered = false;
            for (const auto& [src, lag] : parents[j]) {
                if (t >= static_cast<std::size_t>(lag) && out.jumps[src][t - static_cast<std::size_t>(lag)]) {
                    triggered = true;
                    break;
                }
            }
            // volatile regimes raise both the base rate and the contagion strength
            const double base = std::min(1.0, spec.base_jump_prob * vol);
            const double p = triggered ? std::min(1.0, base + spec.coupling * vol) : base;
            const double u = unit(event_rng[j]);
            const double size = std::exp(spec.jump_log_mean + spec.jump_log_sd * gauss(event_rng[j])) * vol;
            if (u < p) {
                out.jumps[j][t] = 1;
                amplitude[j][t] = size;
            }
        }
    }

    PricePanel& panel = out.panel;
    panel.calendar = business_days(spec.start_date, days);
    panel.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(days));
    panel.observed = BoolMatrix::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(days), true);
    const auto ramp = static_cast<long long>(spec.ramp_days);
    const auto decay = static_cast<long long>(spec.decay_days);
    const auto last = static_cast<long long>(days) - 1;
    for (std::size_t i = 0; i < n; ++i) {
        panel.entities.push_back(entity_name(i, n));
        std::vector<double> overlay(days, 0.0);
        for (std::size_t t = 0; t < days; ++t) {
            if (!out.jumps[i][t]) continue;
            const double a = amplitude[i][t];
            const auto peak = static_cast<long long>(t);
            // linear rise into the peak, a sharp correction, then a linear fade
            for (long long k = 1; k <= ramp; ++k) {
                const long long d = peak - ramp + k;
                if (d >= 0) overlay[static_cast<std::size_t>(d)] += a * static_cast<double>(k) / static_cast<double>(ramp);
            }
            const double rest = a * (1.0 - spec.correction_fraction);
            for (long long m = 0; m < decay && peak + 1 + m <= last; ++m) {
                overlay[static_cast<std::size_t>(peak + 1 + m)] +=
                    rest * (1.0 - static_cast<double>(m) / static_cast<double>(decay));
            }
        }
        double base = spec.start_price;
        for (std::size_t t = 0; t < days; ++t) {
            if (t > 0 && spec.baseline_noise > 0.0) {
                base *= std::exp(spec.baseline_noise * spec.volatility_at(t) * gauss(noise_rng[i]));
            }
            panel.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = base + overlay[t];
        }
    }
    return out;
}

std::vector<PlantedEdge> matching_edges(std::size_t n_entities, std::uint64_t seed) {
    std::vector<std::size_t> order(n_entities);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(mix(seed));
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<PlantedEdge> edges;
    for (std::size_t k = 0; k + 1 < n_entities; k += 2) {
        edges.push_back({order[k], order[k + 1], 1 + static_cast<int>((k / 2) % 3)});
    }
    return edges;
}

std::vector<PlantedEdge> reciprocal_edges(std::size_t n_entities, std::uint64_t seed, int lag_out, int lag_back) {
    std::vector<PlantedEdge> edges;
    for (const auto& e : matching_edges(n_entities, seed)) {
        edges.push_back({e.source, e.target, lag_out});
        edges.push_back({e.target, e.source, lag_back});
    }
    return edges;
}

std::vector<PlantedEdge> random_edges(std::size_t n_entities, double density, std::uint64_t seed) {
    if (!(density >= 0.0 && density <= 1.0)) throw std::invalid_argument("density must lie in [0, 1]");
    std::mt19937_64 rng(mix(seed ^ 0x5EEDULL));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> lag(1, 3);
    std::vector<PlantedEdge> edges;
    for (std::size_t i = 0; i < n_entities; ++i) {
        for (std::size_t j = 0; j < n_entities; ++j) {
            if (i == j) continue;
            const bool keep = unit(rng) < density;
            const int l = lag(rng);
            if (keep) edges.push_back({i, j, l});
        }
    }
    return edges;
}

nlohmann::json ground_truth_json(const SynthSpec& spec, const SynthPanel& result) {
    nlohmann::json doc;
    doc["format"] = "drawnet-synth-truth";
    doc["version"] = 1;
    doc["entities"] = result.panel.entities;
    doc["days"] = spec.days;
    doc["coupling"] = spec.coupling;
    doc["base_jump_prob"] = spec.base_jump_prob;
    doc["seed"] = spec.seed;
    auto& edges = doc["edges"] = nlohmann::json::array();
    for (const auto& e : spec.edges) {
        edges.push_back({{"source", result.panel.entities[e.source]},
                         {"target", result.panel.entities[e.target]},
                         {"lag", e.lag}});
    }
    auto adjacency = nlohmann::json::array();
    for (std::size_t i = 0; i < spec.n_entities; ++i) {
        std::vector<int> row(spec.n_entities, 0);
        for (const auto& e : spec.edges) {
            if (e.source == i) row[e.target] = 1;
        }
        adjacency.push_back(row);
    }
    doc["adjacency"] = std::move(adjacency);
    auto& regimes = doc["regimes"] = nlohmann::json::array();
    for (const auto& r : spec.regimes) {
        regimes.push_back({{"start", r.start}, {"end", r.end}, {"volatility", r.volatility}});
    }
    auto& events = doc["event_days"] = nlohmann::json::object();
    for (std::size_t i = 0; i < spec.n_entities; ++i) {
        auto days = nlohmann::json::array();
        for (std::size_t t = 0; t < spec.days; ++t) {
            if (result.jumps[i][t]) days.push_back(result.panel.calendar[t].iso());
        }
        events[result.panel.entities[i]] = std::move(days);
    }
    return doc;
}

}  // namespace drawnet
