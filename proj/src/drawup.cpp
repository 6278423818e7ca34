#include "drawnet/drawup.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace drawnet {

void EpsilonPolicy::validate() const {
    if (window < 2) throw std::invalid_argument("epsilon window must be >= 2");
}

std::size_t DrawupVector::count() const {
    return static_cast<std::size_t>(std::count(events.begin(), events.end(), std::uint8_t{1}));
}

double rolling_epsilon(std::span<const double> series, const EpsilonPolicy& policy,
                       std::size_t t) {
    policy.validate();
    if (t < policy.window) {
        throw std::invalid_argument("rolling_epsilon: day " + std::to_string(t) +
                                    " has less than " + std::to_string(policy.window) +
                                    " days of history");
    }
    if (t >= series.size()) throw std::out_of_range("rolling_epsilon: day past end of series");

    const std::size_t first = t + 1 - policy.window;
    if (policy.kind == VariationKind::Range) {
        const auto window = series.subspan(first, policy.window);
        const auto [lo, hi] = std::minmax_element(window.begin(), window.end());
        return *hi - *lo;
    }

    const std::size_t n = policy.window;
    double mean = 0.0;
    for (std::size_t s = first; s <= t; ++s) mean += series[s] - series[s - 1];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t s = first; s <= t; ++s) {
        const double d = series[s] - series[s - 1] - mean;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(n - 1));
}

std::vector<Extremum> local_extrema(std::span<const double> series) {
    // first day of each run of equal values
    std::vector<std::size_t> runs;
    for (std::size_t t = 0; t < series.size(); ++t) {
        if (runs.empty() || series[t] != series[runs.back()]) runs.push_back(t);
    }
    std::vector<Extremum> out;
    const std::size_t m = runs.size();
    if (m < 2) return out;

    auto at = [&](std::size_t k) { return series[runs[k]]; };
    out.push_back({runs[0], at(1) > at(0) ? ExtremumKind::Min : ExtremumKind::Max});
    for (std::size_t k = 1; k + 1 < m; ++k) {
        const bool up_before = at(k) > at(k - 1);
        const bool up_after = at(k + 1) > at(k);
        if (up_before && !up_after) out.push_back({runs[k], ExtremumKind::Max});
        if (!up_before && up_after) out.push_back({runs[k], ExtremumKind::Min});
    }
    out.push_back({runs[m - 1], at(m - 1) > at(m - 2) ? ExtremumKind::Max : ExtremumKind::Min});
    return out;
}

DrawupVector detect_drawups(std::span<const double> series, const EpsilonPolicy& policy,
                            std::string entity_id) {
    policy.validate();
    if (series.size() <= policy.window) {
        throw std::invalid_argument("detect_drawups: series of length " +
                                    std::to_string(series.size()) + " is not longer than the " +
                                    std::to_string(policy.window) + "-day window");
    }
    if (std::any_of(series.begin(), series.end(), [](double v) { return !std::isfinite(v); })) {
        throw std::invalid_argument("detect_drawups: series must be forward-filled and finite");
    }

    DrawupVector out;
    out.entity_id = std::move(entity_id);
    out.events.assign(series.size(), 0);

    const auto extrema = local_extrema(series);
    const auto first_min = std::find_if(extrema.begin(), extrema.end(), [](const Extremum& e) {
        return e.kind == ExtremumKind::Min;
    });
    if (first_min == extrema.end()) return out;

    std::size_t candidate = first_min->day;
    for (auto it = first_min + 1; it != extrema.end() && it + 1 != extrema.end(); it += 2) {
        const std::size_t peak = it->day;
        const std::size_t trough = (it + 1)->day;
        if (peak < policy.window) continue;

        const double eps = rolling_epsilon(series, policy, peak);
        const double correction = series[peak] - series[trough];
        if (correction < eps) continue;

        const auto event_day = static_cast<long long>(peak) + policy.event_offset;
        if (event_day >= 0 && event_day < static_cast<long long>(series.size())) {
            out.events[static_cast<std::size_t>(event_day)] = 1;
            out.episodes.push_back({candidate, peak, trough, static_cast<std::size_t>(event_day),
                                    series[peak] - series[candidate], correction, eps});
        }
        candidate = trough;
    }
    return out;
}

}  // namespace drawnet
