#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace aiql {

inline constexpr std::int64_t kMillisPerSecond = 1000;
inline constexpr std::int64_t kMillisPerMinute = 60 * kMillisPerSecond;
inline constexpr std::int64_t kMillisPerHour = 60 * kMillisPerMinute;
inline constexpr std::int64_t kMillisPerDay = 24 * kMillisPerHour;

/// [begin, end) in epoch milliseconds.
struct TimeWindow {
    std::int64_t begin = 0;
    std::int64_t end = 0;

    bool empty() const { return end <= begin; }
    bool contains(std::int64_t t) const { return t >= begin && t < end; }
    friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

std::optional<TimeWindow> intersect(const std::optional<TimeWindow>& a, const std::optional<TimeWindow>& b);

/// Days since 1970-01-01 of the UTC day containing `ms` (floor division).
std::int64_t utc_day(std::int64_t ms);
std::int64_t day_start_ms(std::int64_t day);

/// "2017-01-01T13:00:00.000Z"
std::string format_iso8601(std::int64_t ms);
/// "2017-01-01"
std::string format_day(std::int64_t day);

/// A parsed date/time literal: its instant and the granularity of what was
/// written (a bare date covers a whole day).
struct DateTimeLiteral {
    std::int64_t ms = 0;
    std::int64_t granularity_ms = kMillisPerDay;
};

/// US "MM/DD/YYYY[ HH:MM[:SS]]" or ISO 8601 "YYYY-MM-DD[THH:MM[:SS[.fff]]][Z]".
/// Rejects impossible calendar dates.
std::optional<DateTimeLiteral> parse_datetime(std::string_view text);

/// sec/second(s), min/minute(s), hour(s), day(s), ms.
std::optional<std::int64_t> duration_unit_ms(std::string_view unit);

/// Renders `amount` milliseconds with the largest unit that divides it.
std::string format_duration(std::int64_t ms);
/// Largest unit (in ms) dividing every argument; used to print ranges.
std::int64_t common_unit(std::int64_t a, std::int64_t b);
std::string_view unit_name(std::int64_t unit_ms);

/// Saturating arithmetic for window bounds.
std::int64_t saturating_add(std::int64_t a, std::int64_t b);

}  // namespace aiql
