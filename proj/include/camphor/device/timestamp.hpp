#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "camphor/error.hpp"

namespace camphor {

using Timestamp = std::chrono::sys_seconds;

class UnparseableTimeRange : public Error {
public:
    using Error::Error;
};

namespace detail {

inline bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return ec == std::errc{};
}

inline std::string trim_lower(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    std::string out(s.substr(b, e - b + 1));
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

} // namespace detail

inline std::optional<std::chrono::sys_days> parse_date(std::string_view s) {
    using namespace std::chrono;
    int y = 0, m = 0, d = 0;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (!detail::read_int(s, 0, 4, y) || !detail::read_int(s, 5, 2, m) || !detail::read_int(s, 8, 2, d)) {
        return std::nullopt;
    }
    year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return sys_days{ymd};
}

// "YYYY-MM-DD", "YYYY-MM-DDTHH:MM" or "YYYY-MM-DDTHH:MM:SS", optional trailing 'Z'.
inline std::optional<Timestamp> parse_timestamp(std::string_view s) {
    using namespace std::chrono;
    if (!s.empty() && (s.back() == 'Z' || s.back() == 'z')) s.remove_suffix(1);
    if (s.size() < 10) return std::nullopt;
    auto day = parse_date(s.substr(0, 10));
    if (!day) return std::nullopt;
    if (s.size() == 10) return Timestamp{*day};
    if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
    int hh = 0, mm = 0, ss = 0;
    if (s.size() != 16 && s.size() != 19) return std::nullopt;
    if (!detail::read_int(s, 11, 2, hh) || s[13] != ':' || !detail::read_int(s, 14, 2, mm)) return std::nullopt;
    if (s.size() == 19 && (s[16] != ':' || !detail::read_int(s, 17, 2, ss))) return std::nullopt;
    if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
    return Timestamp{*day} + hours{hh} + minutes{mm} + seconds{ss};
}

inline std::string format_timestamp(Timestamp t) {
    using namespace std::chrono;
    auto day = floor<days>(t);
    year_month_day ymd{day};
    hh_mm_ss hms{t - day};
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

// Half-open interval [start, end).
struct TimeInterval {
    Timestamp start;
    Timestamp end;

    bool contains(Timestamp t) const { return start <= t && t < end; }

    friend bool operator==(const TimeInterval&, const TimeInterval&) = default;
};

/*
 * Accepted forms:
 *   ISO interval    "2024-01-01/2024-01-08", "2024-01-01T09:00:00/2024-01-01T17:00:00"
 *   single date     "2024-01-07"                 -> that whole day
 *   relative phrase today | tomorrow | yesterday |
 *                   this week | next week | last week      (weeks start on Monday)
 *                   this month | next month | last month |
 *                   this year | next year | last year
 * Relative phrases resolve against the device clock. Anything else throws.
 */
inline TimeInterval resolve_time_range(std::string_view expr, Timestamp clock) {
    using namespace std::chrono;
    const std::string key = detail::trim_lower(expr);

    if (auto slash = key.find('/'); slash != std::string::npos) {
        std::string upper = key;
        for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        auto lhs = parse_timestamp(std::string_view(upper).substr(0, slash));
        auto rhs = parse_timestamp(std::string_view(upper).substr(slash + 1));
        if (!lhs || !rhs || *rhs < *lhs) throw UnparseableTimeRange("unparseable time range: '" + std::string(expr) + "'");
        return {*lhs, *rhs};
    }
    if (auto day = parse_date(key)) return {Timestamp{*day}, Timestamp{*day + days{1}}};

    const sys_days today = floor<days>(clock);
    auto day_range = [](sys_days d) { return TimeInterval{Timestamp{d}, Timestamp{d + days{1}}}; };
    auto month_range = [](year_month ym) {
        sys_days first{ym / 1};
        sys_days next{(ym + months{1}) / 1};
        return TimeInterval{Timestamp{first}, Timestamp{next}};
    };
    auto year_range = [](year y) {
        return TimeInterval{Timestamp{sys_days{y / January / 1}}, Timestamp{sys_days{(y + years{1}) / January / 1}}};
    };
    // Monday of the current week.
    const sys_days monday = today - (weekday{today} - Monday);
    auto week_range = [](sys_days start) { return TimeInterval{Timestamp{start}, Timestamp{start + days{7}}}; };
    const year_month_day ymd{today};
    const year_month ym{ymd.year(), ymd.month()};

    if (key == "today") return day_range(today);
    if (key == "tomorrow") return day_range(today + days{1});
    if (key == "yesterday") return day_range(today - days{1});
    if (key == "this week") return week_range(monday);
    if (key == "next week") return week_range(monday + days{7});
    if (key == "last week") return week_range(monday - days{7});
    if (key == "this month") return month_range(ym);
    if (key == "next month") return month_range(ym + months{1});
    if (key == "last month") return month_range(ym - months{1});
    if (key == "this year") return year_range(ymd.year());
    if (key == "next year") return year_range(ymd.year() + years{1});
    if (key == "last year") return year_range(ymd.year() - years{1});
    throw UnparseableTimeRange("unparseable time range: '" + std::string(expr) + "'");
}

} // namespace camphor
