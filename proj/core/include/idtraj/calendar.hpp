#pragma once

#include <cstdint>
#include <string>

namespace idtraj {

// Calendar date stored as days since 1970-01-01 (proleptic Gregorian).
struct Date {
    std::int32_t days = 0;

    auto operator<=>(const Date&) const = default;
};

struct YearMonthDay {
    int year;
    int month;  // 1..12
    int day;    // 1..31
};

Date make_date(int year, int month, int day);
YearMonthDay to_ymd(Date d);

// 0 = Monday ... 6 = Sunday.
int weekday(Date d);

// "YYYY-MM-DD"
Date parse_date(const std::string& s);
std::string format_date(Date d);

// Seconds since epoch for an ISO-8601 local-naive timestamp
// ("YYYY-MM-DD HH:MM:SS" or with 'T'; optional fractional seconds).
double parse_timestamp(const std::string& s);

}  // namespace idtraj
