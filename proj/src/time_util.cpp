#include "aiql/time_util.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <limits>

namespace aiql {

namespace {

constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

bool read_int(std::string_view text, std::size_t& pos, std::size_t digits, int& out) {
    if (pos + digits > text.size()) return false;
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + digits, value);
    if (ec != std::errc{} || ptr != text.data() + pos + digits) return false;
    out = value;
    pos += digits;
    return true;
}

bool expect(std::string_view text, std::size_t& pos, char c) {
    if (pos < text.size() && text[pos] == c) {
        ++pos;
        return true;
    }
    return false;
}

std::optional<std::int64_t> civil_ms(int y, int m, int d) {
    using namespace std::chrono;
    year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return static_cast<std::int64_t>(sys_days{ymd}.time_since_epoch().count()) * kMillisPerDay;
}

// Parses "HH:MM[:SS[.fff]]" after a date; updates ms and granularity.
bool parse_clock(std::string_view text, std::size_t& pos, DateTimeLiteral& lit) {
    int hh = 0, mm = 0, ss = 0;
    if (!read_int(text, pos, 2, hh) || !expect(text, pos, ':') || !read_int(text, pos, 2, mm)) return false;
    if (hh > 23 || mm > 59) return false;
    lit.granularity_ms = kMillisPerMinute;
    std::int64_t frac = 0;
    if (expect(text, pos, ':')) {
        if (!read_int(text, pos, 2, ss) || ss > 59) return false;
        lit.granularity_ms = kMillisPerSecond;
        if (expect(text, pos, '.')) {
            int f = 0;
            if (!read_int(text, pos, 3, f)) return false;
            frac = f;
            lit.granularity_ms = 1;
        }
    }
    lit.ms += hh * kMillisPerHour + mm * kMillisPerMinute + ss * kMillisPerSecond + frac;
    return true;
}

}  // namespace

std::optional<TimeWindow> intersect(const std::optional<TimeWindow>& a, const std::optional<TimeWindow>& b) {
    if (!a) return b;
    if (!b) return a;
    return TimeWindow{std::max(a->begin, b->begin), std::min(a->end, b->end)};
}

std::int64_t utc_day(std::int64_t ms) { return floor_div(ms, kMillisPerDay); }

std::int64_t day_start_ms(std::int64_t day) { return day * kMillisPerDay; }

std::string format_day(std::int64_t day) {
    using namespace std::chrono;
    year_month_day ymd{sys_days{days{day}}};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
}

std::string format_iso8601(std::int64_t ms) {
    std::int64_t day = utc_day(ms);
    std::int64_t rem = ms - day_start_ms(day);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%sT%02lld:%02lld:%02lld.%03lldZ", format_day(day).c_str(),
                  static_cast<long long>(rem / kMillisPerHour), static_cast<long long>(rem / kMillisPerMinute % 60),
                  static_cast<long long>(rem / kMillisPerSecond % 60), static_cast<long long>(rem % 1000));
    return buf;
}

std::optional<DateTimeLiteral> parse_datetime(std::string_view text) {
    DateTimeLiteral lit;
    std::size_t pos = 0;
    int y = 0, m = 0, d = 0;
    bool us = text.size() >= 3 && text[2] == '/';
    if (us) {
        if (!read_int(text, pos, 2, m) || !expect(text, pos, '/') || !read_int(text, pos, 2, d) ||
            !expect(text, pos, '/') || !read_int(text, pos, 4, y))
            return std::nullopt;
    } else {
        if (!read_int(text, pos, 4, y) || !expect(text, pos, '-') || !read_int(text, pos, 2, m) ||
            !expect(text, pos, '-') || !read_int(text, pos, 2, d))
            return std::nullopt;
    }
    auto base = civil_ms(y, m, d);
    if (!base) return std::nullopt;
    lit.ms = *base;
    lit.granularity_ms = kMillisPerDay;
    if (pos < text.size()) {
        char sep = text[pos];
        if (!(sep == 'T' || (sep == ' ' && us) || (sep == ' ' && !us))) return std::nullopt;
        ++pos;
        if (!parse_clock(text, pos, lit)) return std::nullopt;
        if (!us) expect(text, pos, 'Z');
    }
    if (pos != text.size()) return std::nullopt;
    return lit;
}

std::optional<std::int64_t> duration_unit_ms(std::string_view unit) {
    if (unit == "ms" || unit == "millisecond" || unit == "milliseconds") return 1;
    if (unit == "sec" || unit == "secs" || unit == "second" || unit == "seconds") return kMillisPerSecond;
    if (unit == "min" || unit == "mins" || unit == "minute" || unit == "minutes") return kMillisPerMinute;
    if (unit == "hour" || unit == "hours") return kMillisPerHour;
    if (unit == "day" || unit == "days") return kMillisPerDay;
    return std::nullopt;
}

std::int64_t common_unit(std::int64_t a, std::int64_t b) {
    for (std::int64_t unit : {kMillisPerDay, kMillisPerHour, kMillisPerMinute, kMillisPerSecond}) {
        if (a % unit == 0 && b % unit == 0) return unit;
    }
    return 1;
}

std::string_view unit_name(std::int64_t unit_ms) {
    switch (unit_ms) {
        case kMillisPerDay: return "day";
        case kMillisPerHour: return "hour";
        case kMillisPerMinute: return "min";
        case kMillisPerSecond: return "sec";
        default: return "ms";
    }
}

std::string format_duration(std::int64_t ms) {
    std::int64_t unit = common_unit(ms, ms);
    return std::to_string(ms / unit) + " " + std::string(unit_name(unit));
}

std::int64_t saturating_add(std::int64_t a, std::int64_t b) {
    std::int64_t out = 0;
    if (__builtin_add_overflow(a, b, &out)) {
        return b > 0 ? std::numeric_limits<std::int64_t>::max() : std::numeric_limits<std::int64_t>::min();
    }
    return out;
}

}  // namespace aiql
