#include "drawnet/date.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <stdexcept>

namespace drawnet {

namespace chr = std::chrono;

Date Date::from_ymd(int year, unsigned month, unsigned day) {
    const chr::year_month_day ymd{chr::year{year}, chr::month{month}, chr::day{day}};
    if (!ymd.ok()) {
        throw std::invalid_argument("invalid calendar date");
    }
    return Date{static_cast<std::int32_t>(chr::sys_days{ymd}.time_since_epoch().count())};
}

Date Date::parse(std::string_view iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
        throw std::invalid_argument("expected YYYY-MM-DD, got '" + std::string(iso) + "'");
    }
    auto field = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        const char* first = iso.data() + pos;
        auto [ptr, ec] = std::from_chars(first, first + len, v);
        if (ec != std::errc{} || ptr != first + len) {
            throw std::invalid_argument("expected YYYY-MM-DD, got '" + std::string(iso) + "'");
        }
        return v;
    };
    const int y = field(0, 4);
    const int m = field(5, 2);
    const int d = field(8, 2);
    if (m < 1 || d < 1) {
        throw std::invalid_argument("invalid calendar date '" + std::string(iso) + "'");
    }
    try {
        return from_ymd(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("invalid calendar date '" + std::string(iso) + "'");
    }
}

std::string Date::iso() const {
    const chr::year_month_day ymd{chr::sys_days{chr::days{days}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

unsigned Date::weekday() const {
    return chr::weekday{chr::sys_days{chr::days{days}}}.c_encoding();
}

}  // namespace drawnet
