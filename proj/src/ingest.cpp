#include "drawnet/ingest.hpp"

#include "drawnet/io.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace drawnet {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

}  // namespace

PriceSeries PricePanel::series(std::size_t row) const {
    PriceSeries s;
    s.entity_id = entities.at(row);
    s.dates = calendar;
    s.prices.resize(n_days());
    s.observed.resize(n_days());
    for (std::size_t t = 0; t < n_days(); ++t) {
        s.prices[t] = values(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(t));
        s.observed[t] = observed(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(t));
    }
    return s;
}

std::size_t PricePanel::entity_index(std::string_view id) const {
    const auto it = std::find(entities.begin(), entities.end(), id);
    if (it == entities.end()) throw std::out_of_range("unknown entity '" + std::string(id) + "'");
    return static_cast<std::size_t>(it - entities.begin());
}

std::size_t PricePanel::first_valid(std::size_t row) const {
    const auto r = static_cast<Eigen::Index>(row);
    for (std::size_t t = 0; t < n_days(); ++t) {
        if (!std::isnan(values(r, static_cast<Eigen::Index>(t)))) return t;
    }
    return n_days();
}

std::size_t PricePanel::observed_count(std::size_t row) const {
    return static_cast<std::size_t>(observed.row(static_cast<Eigen::Index>(row)).count());
}

bool operator==(const PricePanel& a, const PricePanel& b) {
    if (a.entities != b.entities || a.calendar != b.calendar) return false;
    if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols()) return false;
    if ((a.observed != b.observed).any()) return false;
    for (Eigen::Index i = 0; i < a.values.rows(); ++i) {
        for (Eigen::Index t = 0; t < a.values.cols(); ++t) {
            const double x = a.values(i, t);
            const double y = b.values(i, t);
            if (std::isnan(x) != std::isnan(y)) return false;
            if (!std::isnan(x) && x != y) return false;
        }
    }
    return true;
}

PricePanel panel_from_series(const std::vector<PriceSeries>& series) {
    std::set<Date> calendar;
    std::set<std::string> seen;
    for (const auto& s : series) {
        if (!seen.insert(s.entity_id).second) {
            throw IngestError("entity '" + s.entity_id + "' appears more than once");
        }
        if (s.dates.size() != s.prices.size() || s.dates.size() != s.observed.size()) {
            throw IngestError("series '" + s.entity_id + "' has mismatched lengths");
        }
        for (std::size_t k = 0; k < s.dates.size(); ++k) {
            if (k > 0 && !(s.dates[k - 1] < s.dates[k])) {
                throw IngestError("series '" + s.entity_id + "' dates are not strictly increasing");
            }
            if (s.observed[k]) calendar.insert(s.dates[k]);
        }
    }

    std::vector<const PriceSeries*> order;
    for (const auto& s : series) order.push_back(&s);
    std::sort(order.begin(), order.end(),
              [](const PriceSeries* a, const PriceSeries* b) { return a->entity_id < b->entity_id; });

    PricePanel panel;
    panel.calendar.assign(calendar.begin(), calendar.end());
    const auto n = static_cast<Eigen::Index>(order.size());
    const auto t_len = static_cast<Eigen::Index>(panel.calendar.size());
    panel.values = Eigen::MatrixXd::Constant(n, t_len, kMissing);
    panel.observed = BoolMatrix::Constant(n, t_len, false);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& s = *order[static_cast<std::size_t>(i)];
        panel.entities.push_back(s.entity_id);
        std::size_t col = 0;
        for (std::size_t k = 0; k < s.dates.size(); ++k) {
            if (!s.observed[k]) continue;
            while (panel.calendar[col] < s.dates[k]) ++col;
            if (s.prices[k] < 0.0 || !std::isfinite(s.prices[k])) {
                throw IngestError("series '" + s.entity_id + "' has an invalid price on " +
                                  s.dates[k].iso());
            }
            panel.values(i, static_cast<Eigen::Index>(col)) = s.prices[k];
            panel.observed(i, static_cast<Eigen::Index>(col)) = true;
        }
    }
    return panel;
}

PricePanel parse_panel(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (!have_header && std::getline(in, line)) {
        ++lineno;
        auto text = io::trim(line);
        if (lineno == 1 && text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
        if (text.empty()) continue;
        auto fields = io::split(text);
        if (fields.size() != 3 || io::trim(fields[0]) != "date" || io::trim(fields[1]) != "entity" ||
            io::trim(fields[2]) != "price") {
            throw IngestError("line " + std::to_string(lineno) +
                                  ": expected header 'date,entity,price'",
                              lineno);
        }
        have_header = true;
    }
    if (!have_header) throw IngestError("empty input");

    // entity -> date -> price
    std::map<std::string, std::map<Date, double>> rows;
    std::size_t n_rows = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto text = io::trim(line);
        if (text.empty()) continue;
        const auto fields = io::split(text);
        auto fail = [&](const std::string& why) {
            throw IngestError("line " + std::to_string(lineno) + ": " + why, lineno);
        };
        if (fields.size() != 3) fail("expected 3 fields, found " + std::to_string(fields.size()));
        Date date;
        double price = 0.0;
        try {
            date = Date::parse(io::trim(fields[0]));
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
        const std::string entity(io::trim(fields[1]));
        if (entity.empty()) fail("empty entity id");
        try {
            price = io::parse_double(fields[2]);
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
        if (!std::isfinite(price) || price < 0.0) fail("price must be a finite value >= 0");
        auto& by_date = rows[entity];
        if (!by_date.emplace(date, price).second) {
            fail("duplicate observation (" + date.iso() + ", " + entity + ")");
        }
        ++n_rows;
    }
    if (n_rows == 0) throw IngestError("empty input: no observations after the header");

    std::vector<PriceSeries> series;
    series.reserve(rows.size());
    for (const auto& [entity, by_date] : rows) {
        PriceSeries s;
        s.entity_id = entity;
        for (const auto& [d, p] : by_date) {
            s.dates.push_back(d);
            s.prices.push_back(p);
            s.observed.push_back(true);
        }
        series.push_back(std::move(s));
    }
    return panel_from_series(series);
}

PricePanel parse_panel_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_panel(in);
}

void write_panel_csv(std::ostream& out, const PricePanel& panel) {
    out << "date,entity,price\n";
    for (std::size_t t = 0; t < panel.n_days(); ++t) {
        const auto iso = panel.calendar[t].iso();
        for (std::size_t i = 0; i < panel.n_entities(); ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            const auto c = static_cast<Eigen::Index>(t);
            if (!panel.observed(r, c)) continue;
            out << iso << ',' << panel.entities[i] << ',' << io::format_double(panel.values(r, c))
                << '\n';
        }
    }
}

PricePanel forward_fill(const PricePanel& panel) {
    PricePanel out = panel;
    for (Eigen::Index i = 0; i < out.values.rows(); ++i) {
        double last = kMissing;
        bool seen = false;
        for (Eigen::Index t = 0; t < out.values.cols(); ++t) {
            const double v = out.values(i, t);
            if (!std::isnan(v)) {
                last = v;
                seen = true;
            } else if (seen) {
                out.values(i, t) = last;
            }
        }
        if (!seen) {
            throw IngestError("entity '" + out.entities[static_cast<std::size_t>(i)] +
                              "' has no observations");
        }
    }
    return out;
}

PricePanel slice_period(const PricePanel& panel, const PeriodSpec& spec) {
    if (!(spec.start < spec.end)) {
        throw IngestError("period '" + spec.label + "': start must precede end");
    }
    const auto lo = std::lower_bound(panel.calendar.begin(), panel.calendar.end(), spec.start);
    const auto hi = std::lower_bound(panel.calendar.begin(), panel.calendar.end(), spec.end);
    if (lo == hi) {
        throw IngestError("period '" + spec.label + "' [" + spec.start.iso() + ", " +
                          spec.end.iso() + ") does not intersect the panel calendar");
    }
    const auto first = static_cast<Eigen::Index>(lo - panel.calendar.begin());
    const auto count = static_cast<Eigen::Index>(hi - lo);
    PricePanel out;
    out.entities = panel.entities;
    out.calendar.assign(lo, hi);
    out.values = panel.values.middleCols(first, count);
    out.observed = panel.observed.middleCols(first, count);
    return out;
}

std::vector<PeriodSpec> default_periods() {
    return {
        {"period1", Date::from_ymd(2003, 4, 1), Date::from_ymd(2006, 5, 1)},
        {"period2", Date::from_ymd(2006, 5, 1), Date::from_ymd(2009, 3, 1)},
        {"period3", Date::from_ymd(2009, 3, 1), Date::from_ymd(2012, 1, 1)},
    };
}

PeriodSpec parse_period(std::string_view text) {
    const auto parts = io::split(io::trim(text), ':');
    if (parts.size() != 3 || io::trim(parts[0]).empty()) {
        throw std::invalid_argument("period must look like label:YYYY-MM-DD:YYYY-MM-DD, got '" +
                                    std::string(text) + "'");
    }
    PeriodSpec spec{std::string(io::trim(parts[0])), Date::parse(io::trim(parts[1])),
                    Date::parse(io::trim(parts[2]))};
    if (!(spec.start < spec.end)) {
        throw std::invalid_argument("period '" + spec.label + "': start must precede end");
    }
    return spec;
}

nlohmann::json panel_to_json(const PricePanel& panel) {
    nlohmann::json doc;
    doc["format"] = "drawnet-panel";
    doc["version"] = 1;
    doc["entities"] = panel.entities;
    auto& cal = doc["calendar"] = nlohmann::json::array();
    for (const auto& d : panel.calendar) cal.push_back(d.iso());
    auto& values = doc["values"] = nlohmann::json::array();
    auto& observed = doc["observed"] = nlohmann::json::array();
    for (Eigen::Index i = 0; i < panel.values.rows(); ++i) {
        auto row = nlohmann::json::array();
        auto mask = nlohmann::json::array();
        for (Eigen::Index t = 0; t < panel.values.cols(); ++t) {
            const double v = panel.values(i, t);
            if (std::isnan(v)) {
                row.push_back(nullptr);
            } else {
                row.push_back(v);
            }
            mask.push_back(panel.observed(i, t) ? 1 : 0);
        }
        values.push_back(std::move(row));
        observed.push_back(std::move(mask));
    }
    return doc;
}

PricePanel panel_from_json(const nlohmann::json& doc) {
    if (doc.value("format", "") != "drawnet-panel" || doc.value("version", 0) != 1) {
        throw IngestError("not a drawnet-panel v1 document");
    }
    PricePanel panel;
    panel.entities = doc.at("entities").get<std::vector<std::string>>();
    for (const auto& d : doc.at("calendar")) panel.calendar.push_back(Date::parse(d.get<std::string>()));
    const auto n = static_cast<Eigen::Index>(panel.entities.size());
    const auto t_len = static_cast<Eigen::Index>(panel.calendar.size());
    const auto& values = doc.at("values");
    const auto& observed = doc.at("observed");
    if (values.size() != panel.entities.size() || observed.size() != panel.entities.size()) {
        throw IngestError("panel JSON: row count does not match entities");
    }
    panel.values.resize(n, t_len);
    panel.observed.resize(n, t_len);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = values[static_cast<std::size_t>(i)];
        const auto& mask = observed[static_cast<std::size_t>(i)];
        if (row.size() != panel.calendar.size() || mask.size() != panel.calendar.size()) {
            throw IngestError("panel JSON: row length does not match calendar");
        }
        for (Eigen::Index t = 0; t < t_len; ++t) {
            const auto& v = row[static_cast<std::size_t>(t)];
            panel.values(i, t) = v.is_null() ? kMissing : v.get<double>();
            panel.observed(i, t) = mask[static_cast<std::size_t>(t)].get<int>() != 0;
        }
    }
    return panel;
}

std::map<std::string, double> parse_node_attributes(std::istream& in) {
    std::map<std::string, double> attrs;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto text = io::trim(line);
        if (text.empty()) continue;
        const auto fields = io::split(text);
        if (!header) {
            if (fields.size() != 2 || io::trim(fields[0]) != "entity") {
                throw IngestError("attribute CSV: expected header 'entity,attribute_value'", lineno);
            }
            header = true;
            continue;
        }
        if (fields.size() != 2) {
            throw IngestError("attribute CSV line " + std::to_string(lineno) + ": expected 2 fields",
                              lineno);
        }
        double v = 0.0;
        try {
            v = io::parse_double(fields[1]);
        } catch (const std::invalid_argument& e) {
            throw IngestError("attribute CSV line " + std::to_string(lineno) + ": " + e.what(),
                              lineno);
        }
        if (!attrs.emplace(std::string(io::trim(fields[0])), v).second) {
            throw IngestError("attribute CSV line " + std::to_string(lineno) + ": duplicate entity",
                              lineno);
        }
    }
    return attrs;
}

}  // namespace drawnet
