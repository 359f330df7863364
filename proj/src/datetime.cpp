#include "toxtrace/datetime.hpp"

#include <cstdio>

#include "toxtrace/error.hpp"

namespace toxtrace {

std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return CivilDate{static_cast<int>(y + (m <= 2)), m, d};
}

namespace {

bool is_leap(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

unsigned days_in_month(int y, unsigned m) {
    static const unsigned lens[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return lens[m - 1];
}

bool read_digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
    if (pos + n > s.size()) return false;
    int v = 0;
    for (std::size_t i = 0; i < n; ++i) {
        char c = s[pos + i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

[[noreturn]] void bad_timestamp(std::string_view s) {
    throw Error(ErrorKind::input, "invalid RFC 3339 timestamp: '" + std::string(s) + "'");
}

} // namespace

std::int64_t parse_rfc3339(std::string_view s) {
    int y, mo, d, h, mi, se;
    if (!read_digits(s, 0, 4, y) || s.size() < 20 || s[4] != '-' ||
        !read_digits(s, 5, 2, mo) || s[7] != '-' || !read_digits(s, 8, 2, d))
        bad_timestamp(s);
    char sep = s[10];
    if (sep != 'T' && sep != 't' && sep != ' ') bad_timestamp(s);
    if (!read_digits(s, 11, 2, h) || s[13] != ':' || !read_digits(s, 14, 2, mi) ||
        s[16] != ':' || !read_digits(s, 17, 2, se))
        bad_timestamp(s);

    if (mo < 1 || mo > 12 || d < 1 ||
        d > static_cast<int>(days_in_month(y, static_cast<unsigned>(mo))) ||
        h > 23 || mi > 59 || se > 60)
        bad_timestamp(s);
    if (se == 60) se = 59; // fold leap seconds

    std::size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        std::size_t start = pos;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
        if (pos == start) bad_timestamp(s);
    }
    if (pos >= s.size()) bad_timestamp(s);

    std::int64_t offset = 0;
    char tz = s[pos];
    if (tz == 'Z' || tz == 'z') {
        ++pos;
    } else if (tz == '+' || tz == '-') {
        int oh, om;
        if (!read_digits(s, pos + 1, 2, oh) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
            !read_digits(s, pos + 4, 2, om) || oh > 23 || om > 59)
            bad_timestamp(s);
        offset = (tz == '+' ? 1 : -1) * (oh * 3600 + om * 60);
        pos += 6;
    } else {
        bad_timestamp(s);
    }
    if (pos != s.size()) bad_timestamp(s);

    std::int64_t days = days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d));
    return days * 86400 + h * 3600 + mi * 60 + se - offset;
}

std::string format_rfc3339_utc(std::int64_t epoch_seconds) {
    std::int64_t days = utc_day_of(epoch_seconds);
    std::int64_t rem = epoch_seconds - days * 86400;
    CivilDate cd = civil_from_days(days);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", cd.year, cd.month,
                  cd.day, static_cast<int>(rem / 3600), static_cast<int>((rem / 60) % 60),
                  static_cast<int>(rem % 60));
    return std::string(buf);
}

std::int64_t utc_day_of(std::int64_t epoch_seconds) {
    std::int64_t days = epoch_seconds / 86400;
    if (epoch_seconds % 86400 < 0) --days;
    return days;
}

std::string format_date(std::int64_t days) {
    CivilDate cd = civil_from_days(days);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", cd.year, cd.month, cd.day);
    return std::string(buf);
}

std::string IsoWeek::str() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-W%02u", year, week);
    return std::string(buf);
}

namespace {

// ISO weekday, Monday = 1 .. Sunday = 7. Day 0 (1970-01-01) was a Thursday.
unsigned iso_weekday(std::int64_t days) {
    return static_cast<unsigned>(((days + 3) % 7 + 7) % 7) + 1;
}

unsigned weeks_in_iso_year(int y) {
    auto p = [](int year) {
        return (year + year / 4 - year / 100 + year / 400) % 7;
    };
    return (p(y) == 4 || p(y - 1) == 3) ? 53 : 52;
}

} // namespace

IsoWeek iso_week_of_day(std::int64_t days) {
    CivilDate cd = civil_from_days(days);
    std::int64_t jan1 = days_from_civil(cd.year, 1, 1);
    int ordinal = static_cast<int>(days - jan1) + 1;
    int week = (ordinal - static_cast<int>(iso_weekday(days)) + 10) / 7;
    int year = cd.year;
    if (week < 1) {
        --year;
        week = static_cast<int>(weeks_in_iso_year(year));
    } else if (week > static_cast<int>(weeks_in_iso_year(year))) {
        ++year;
        week = 1;
    }
    return IsoWeek{year, static_cast<unsigned>(week)};
}

} // namespace toxtrace
