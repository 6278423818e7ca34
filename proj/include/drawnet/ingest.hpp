#pragma once

#include "drawnet/date.hpp"

#include <Eigen/Core>
#include "json.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace drawnet {

/// Raised for malformed panel input. `line()` is 1-based, 0 when not tied to a line.
class IngestError : public std::runtime_error {
public:
    IngestError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct PriceSeries {
    std::string entity_id;
    std::vector<Date> dates;
    std::vector<double> prices;
    std::vector<bool> observed;
};

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// N entities by T calendar days. Missing cells hold NaN in `values`;
/// `observed` marks days with an actual quote (forward-filled cells stay false).
struct PricePanel {
    std::vector<std::string> entities;
    std::vector<Date> calendar;
    Eigen::MatrixXd values;
    BoolMatrix observed;

    std::size_t n_entities() const { return entities.size(); }
    std::size_t n_days() const { return calendar.size(); }

    PriceSeries series(std::size_t row) const;
    std::size_t entity_index(std::string_view id) const;

    /// Index of the first non-missing value in `row`, or n_days() if none.
    std::size_t first_valid(std::size_t row) const;
    std::size_t observed_count(std::size_t row) const;
};

/// NaN-aware structural equality.
bool operator==(const PricePanel& a, const PricePanel& b);

/// Half-open calendar window [start, end).
struct PeriodSpec {
    std::string label;
    Date start;
    Date end;

    bool operator==(const PeriodSpec&) const = default;
};

/// Reads `date,entity,price` CSV. Entities are sorted by id; the calendar is
/// the union of every observed date.
PricePanel parse_panel(std::istream& in);
PricePanel parse_panel_text(std::string_view text);

/// Writes the observed cells back as `date,entity,price` rows (date-major).
void write_panel_csv(std::ostream& out, const PricePanel& panel);

/// Builds a panel over the union calendar of the given series.
PricePanel panel_from_series(const std::vector<PriceSeries>& series);

/// Carries the last quote forward. Cells before an entity's first quote stay NaN.
PricePanel forward_fill(const PricePanel& panel);

PricePanel slice_period(const PricePanel& panel, const PeriodSpec& spec);

/// The three market phases analysed by default (pre-crisis, crisis, post-crisis).
std::vector<PeriodSpec> default_periods();

PeriodSpec parse_period(std::string_view text);  // `label:YYYY-MM-DD:YYYY-MM-DD`

/// Columnar panel cache. Layout:
/// {"format":"drawnet-panel","version":1,"entities":[..],"calendar":[iso..],
///  "values":[[price|null,..] per entity],"observed":[[0|1,..] per entity]}
nlohmann::json panel_to_json(const PricePanel& panel);
PricePanel panel_from_json(const nlohmann::json& doc);

/// Optional `entity,attribute_value` CSV (header required).
std::map<std::string, double> parse_node_attributes(std::istream& in);

}  // namespace drawnet
