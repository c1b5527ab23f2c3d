#include "idtraj/calendar.hpp"

#include <charconv>
#include <cmath>

#include "idtraj/errors.hpp"

namespace idtraj {

namespace {

// Days-from-civil, valid across the whole proleptic Gregorian calendar.
std::int32_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int32_t>(doe) - 719468;
}

YearMonthDay civil_from_days(std::int32_t z) {
    z += 719468;
    const int era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int y = static_cast<int>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {y + (m <= 2), static_cast<int>(m), static_cast<int>(d)};
}

int parse_int(const char* first, const char* last, const std::string& ctx) {
    int value = 0;
    auto [p, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || p != last) {
        throw InputError("bad numeric field in '" + ctx + "'");
    }
    return value;
}

}  // namespace

Date make_date(int year, int month, int day) {
    if (month < 1 || month > 12 || day < 1 || day > 31) {
        throw InputError("invalid calendar date");
    }
    const Date date{days_from_civil(year, month, day)};
    const YearMonthDay back = civil_from_days(date.days);
    if (back.year != year || back.month != month || back.day != day) {
        throw InputError("invalid calendar date");
    }
    return date;
}

YearMonthDay to_ymd(Date d) { return civil_from_days(d.days); }

int weekday(Date d) {
    // 1970-01-01 was a Thursday (index 3 with Monday = 0).
    int w = static_cast<int>((d.days % 7 + 7) % 7);
    return (w + 3) % 7;
}

Date parse_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
        throw InputError("expected YYYY-MM-DD date, got '" + s + "'");
    }
    const char* c = s.data();
    return make_date(parse_int(c, c + 4, s), parse_int(c + 5, c + 7, s),
                     parse_int(c + 8, c + 10, s));
}

std::string format_date(Date d) {
    const YearMonthDay ymd = to_ymd(d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", ymd.year, ymd.month, ymd.day);
    return buf;
}

double parse_timestamp(const std::string& s) {
    if (s.size() < 19 || (s[10] != ' ' && s[10] != 'T')) {
        throw InputError("expected ISO timestamp, got '" + s + "'");
    }
    const Date date = parse_date(s.substr(0, 10));
    const char* c = s.data();
    const int hh = parse_int(c + 11, c + 13, s);
    const int mm = parse_int(c + 14, c + 16, s);
    const int ss = parse_int(c + 17, c + 19, s);
    if (s[13] != ':' || s[16] != ':' || hh > 23 || mm > 59 || ss > 60) {
        throw InputError("expected ISO timestamp, got '" + s + "'");
    }
    double frac = 0.0;
    if (s.size() > 19) {
        if (s[19] != '.') throw InputError("expected ISO timestamp, got '" + s + "'");
        frac = std::stod("0" + s.substr(19));
    }
    return static_cast<double>(date.days) * 86400.0 + hh * 3600.0 + mm * 60.0 + ss + frac;
}

}  // namespace idtraj
