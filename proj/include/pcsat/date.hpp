#pragma once

#include <charconv>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "pcsat/errors.hpp"

namespace pcsat {

/// Calendar date at day resolution, stored as days since 1970-01-01 (UTC).
struct Date {
    std::int32_t days = 0;

    constexpr auto operator<=>(const Date&) const = default;

    constexpr Date operator+(int n) const { return Date{days + n}; }
    constexpr Date operator-(int n) const { return Date{days - n}; }
    constexpr int operator-(Date other) const { return days - other.days; }
};

namespace detail {

// Civil-calendar conversions (proleptic Gregorian, era-based).
constexpr std::int32_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int32_t>(doe) - 719468;
}

constexpr void civil_from_days(std::int32_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const int era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int yr = static_cast<int>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = yr + (m <= 2);
}

}  // namespace detail

constexpr Date make_date(int y, unsigned m, unsigned d) {
    return Date{detail::days_from_civil(y, m, d)};
}

/// Parses strict ISO-8601 "YYYY-MM-DD". Rejects impossible calendar dates.
inline std::optional<Date> parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    auto to_int = [](std::string_view s, int& out) {
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc() && p == s.data() + s.size();
    };
    int y = 0, m = 0, d = 0;
    if (!to_int(text.substr(0, 4), y) || !to_int(text.substr(5, 2), m) || !to_int(text.substr(8, 2), d))
        return std::nullopt;
    if (m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
    Date date = make_date(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
    int ry = 0;
    unsigned rm = 0, rd = 0;
    detail::civil_from_days(date.days, ry, rm, rd);
    if (ry != y || rm != static_cast<unsigned>(m) || rd != static_cast<unsigned>(d)) return std::nullopt;
    return date;
}

inline std::string format_date(Date date) {
    int y = 0;
    unsigned m = 0, d = 0;
    detail::civil_from_days(date.days, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, m, d);
    return buf;
}

inline Date parse_date_or_throw(std::string_view text) {
    auto d = parse_date(text);
    if (!d) throw Error(Errc::bad_timestamp, "expected YYYY-MM-DD, got '" + std::string(text) + "'");
    return *d;
}

}  // namespace pcsat
