#pragma once

#include <compare>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cseval {

// Calendar date, day precision (UTC). Samples are segmented by strict
// "before" comparisons, so ordering is all that matters.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;

    bool valid() const {
        if (year < 1 || month < 1 || month > 12 || day < 1) return false;
        static const int lens[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        int len = lens[month - 1];
        bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
        if (month == 2 && leap) len = 29;
        return day <= len;
    }

    // Days since 1970-01-01 (civil-from-days inverse, Gregorian).
    long long days_since_epoch() const {
        long long y = year - (month <= 2 ? 1 : 0);
        long long era = (y >= 0 ? y : y - 399) / 400;
        long long yoe = y - era * 400;
        long long doy = (153 * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
        long long doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        return era * 146097 + doe - 719468;
    }

    // Midnight UTC at the start of this date.
    long long epoch_seconds() const { return days_since_epoch() * 86400LL; }

    std::string to_string() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
        return buf;
    }

    // Strict "YYYY-MM-DD".
    static Date parse(std::string_view s) {
        auto digits = [](std::string_view v) {
            for (char c : v)
                if (c < '0' || c > '9') return false;
            return !v.empty();
        };
        if (s.size() != 10 || s[4] != '-' || s[7] != '-' || !digits(s.substr(0, 4)) ||
            !digits(s.substr(5, 2)) || !digits(s.substr(8, 2)))
            throw std::runtime_error("invalid date '" + std::string(s) +
                                     "' (expected YYYY-MM-DD)");
        Date d{std::stoi(std::string(s.substr(0, 4))),
               std::stoi(std::string(s.substr(5, 2))),
               std::stoi(std::string(s.substr(8, 2)))};
        if (!d.valid())
            throw std::runtime_error("invalid calendar date '" + std::string(s) + "'");
        return d;
    }
};

} // namespace cseval
