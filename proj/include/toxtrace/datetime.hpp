#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace toxtrace {

struct CivilDate {
    int year = 1970;
    unsigned month = 1;
    unsigned day = 1;
};

struct IsoWeek {
    int year = 0;
    unsigned week = 0; // 1..53
    std::string str() const; // "2022-W18"
};

// Howard Hinnant's civil-date algorithms.
std::int64_t days_from_civil(int y, unsigned m, unsigned d);
CivilDate civil_from_days(std::int64_t days);

// RFC 3339 timestamp -> UTC epoch seconds. Accepts 'T'/'t'/' ' separators,
// 'Z'/'z' or numeric offsets, and truncates fractional seconds.
// Throws Error(input) on anything malformed.
std::int64_t parse_rfc3339(std::string_view s);

// Normalized UTC form: YYYY-MM-DDTHH:MM:SSZ
std::string format_rfc3339_utc(std::int64_t epoch_seconds);

// UTC calendar date of an epoch timestamp (day boundary at UTC midnight).
std::int64_t utc_day_of(std::int64_t epoch_seconds);
std::string format_date(std::int64_t days);

IsoWeek iso_week_of_day(std::int64_t days);

} // namespace toxtrace
