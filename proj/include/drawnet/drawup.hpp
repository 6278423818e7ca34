#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace drawnet {

enum class VariationKind {
    StddevOfDailyChanges,  ///< sample stddev of the window's day-to-day changes
    Range,                 ///< max - min of the window's prices
};

struct EpsilonPolicy {
    std::size_t window = 10;
    VariationKind kind = VariationKind::StddevOfDailyChanges;
    /// Days between the confirmed peak and the day the event is recorded.
    int event_offset = 0;

    void validate() const;
    bool operator==(const EpsilonPolicy&) const = default;
};

enum class ExtremumKind { Min, Max };

struct Extremum {
    std::size_t day;
    ExtremumKind kind;

    bool operator==(const Extremum&) const = default;
};

struct Episode {
    std::size_t start_day;   ///< candidate minimum the run is measured from
    std::size_t peak_day;    ///< local maximum confirmed by the correction
    std::size_t trough_day;  ///< local minimum ending the correction
    std::size_t event_day;   ///< peak_day + event_offset
    double amplitude;        ///< peak price - candidate price
    double correction;       ///< peak price - trough price
    double epsilon;          ///< threshold the correction was compared against
};

struct DrawupVector {
    std::string entity_id;
    std::vector<std::uint8_t> events;
    std::vector<Episode> episodes;

    std::size_t count() const;
};

/// Local variation over days (t - window, t]. Requires t >= window.
double rolling_epsilon(std::span<const double> series, const EpsilonPolicy& policy,
                       std::size_t t);

/// Alternating minima/maxima including both endpoints. Plateaus collapse to
/// their first day; a constant series has no extrema.
std::vector<Extremum> local_extrema(std::span<const double> series);

/// Walks successive (max, min) pairs after the first local minimum. A pair whose
/// correction (max - following min) reaches epsilon, evaluated on the window
/// ending at the max, confirms a drawup; the event is marked at the peak
/// (shifted by event_offset). Peaks before day `window` are never confirmed.
DrawupVector detect_drawups(std::span<const double> series, const EpsilonPolicy& policy,
                            std::string entity_id = {});

}  // namespace drawnet
