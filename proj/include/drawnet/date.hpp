#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace drawnet {

/// Calendar date stored as a day count since 1970-01-01.
struct Date {
    std::int32_t days = 0;

    auto operator<=>(const Date&) const = default;

    static Date from_ymd(int year, unsigned month, unsigned day);

    /// Parses `YYYY-MM-DD`. Throws std::invalid_argument on anything else.
    static Date parse(std::string_view iso);

    std::string iso() const;

    /// 0 = Sunday ... 6 = Saturday.
    unsigned weekday() const;

    Date operator+(std::int32_t n) const { return Date{days + n}; }
};

}  // namespace drawnet
