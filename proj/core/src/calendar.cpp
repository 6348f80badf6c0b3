#include "agroseason/calendar.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

namespace agroseason {

bool is_leap_year(int year) {
    return std::chrono::year{year}.is_leap();
}

int days_in_year(int year) {
    return is_leap_year(year) ? 366 : 365;
}

int days_in_month(int year, unsigned month) {
    using namespace std::chrono;
    const year_month_day_last last{std::chrono::year{year} / std::chrono::month{month} / std::chrono::last};
    return static_cast<int>(static_cast<unsigned>(last.day()));
}

int day_of_year(Date d) {
    const Date jan1 = std::chrono::year{year_of(d)} / std::chrono::January / 1;
    return days_between(jan1, d) + 1;
}

Date date_from_doy(int year, int doy) {
    const Date jan1 = std::chrono::year{year} / std::chrono::January / 1;
    return add_days(jan1, doy - 1);
}

int climatology_slot(Date d) {
    unsigned month = month_of(d);
    unsigned day = day_of(d);
    if (month == 2 && day == 29) day = 28;
    // Ordinal in a fixed non-leap year, shifted to 0-based.
    const Date ref = std::chrono::year{2001} / std::chrono::month{month} / std::chrono::day{day};
    return day_of_year(ref) - 1;
}

std::string to_iso(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year_of(d), month_of(d), day_of(d));
    return buf;
}

std::optional<Date> parse_iso(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    auto parse_uint = [](std::string_view s, int& out) {
        for (char c : s)
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc{} && p == s.data() + s.size();
    };
    int y = 0, m = 0, d = 0;
    if (!parse_uint(text.substr(0, 4), y) || !parse_uint(text.substr(5, 2), m) ||
        !parse_uint(text.substr(8, 2), d))
        return std::nullopt;
    const Date date = std::chrono::year{y} / std::chrono::month{static_cast<unsigned>(m)} /
                      std::chrono::day{static_cast<unsigned>(d)};
    if (!date.ok()) return std::nullopt;
    return date;
}

} // namespace agroseason
