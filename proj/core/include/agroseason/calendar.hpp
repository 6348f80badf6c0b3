#ifndef AGROSEASON_CALENDAR_HPP
#define AGROSEASON_CALENDAR_HPP

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace agroseason {

using Date = std::chrono::year_month_day;

inline std::chrono::sys_days to_days(Date d) { return std::chrono::sys_days{d}; }
inline Date from_days(std::chrono::sys_days d) { return Date{d}; }

inline Date add_days(Date d, int n) { return from_days(to_days(d) + std::chrono::days{n}); }

// Signed day difference b - a.
inline int days_between(Date a, Date b) {
    return static_cast<int>((to_days(b) - to_days(a)).count());
}

inline Date make_date(int year, unsigned month, unsigned day) {
    return Date{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
}

inline int year_of(Date d) { return static_cast<int>(d.year()); }
inline unsigned month_of(Date d) { return static_cast<unsigned>(d.month()); }
inline unsigned day_of(Date d) { return static_cast<unsigned>(d.day()); }

bool is_leap_year(int year);
int days_in_year(int year);
int days_in_month(int year, unsigned month);

// 1-based ordinal day within the calendar year (1..365/366).
int day_of_year(Date d);

// Inverse of day_of_year for a given year (doy is 1-based).
Date date_from_doy(int year, int doy);

// Climatology slot index in 0..364. Feb 29 shares the Feb 28 slot, so a
// 365-entry table covers every date of any year.
int climatology_slot(Date d);

std::string to_iso(Date d);

// Strict ISO-8601 YYYY-MM-DD; nullopt when the text is not a valid date.
std::optional<Date> parse_iso(std::string_view text);

} // namespace agroseason

#endif
