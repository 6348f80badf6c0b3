#ifndef AGROSEASON_DAILY_RECORD_HPP
#define AGROSEASON_DAILY_RECORD_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agroseason/calendar.hpp"

namespace agroseason {

// One calendar day of station observations. Absent observations are
// nullopt, never sentinel numbers.
struct DailyRecord {
    Date date{};
    std::optional<double> rain;     // mm, >= 0
    std::optional<double> tmin;     // deg C
    std::optional<double> tmax;     // deg C
    std::optional<double> tmean;    // deg C
    std::optional<double> rhmin;    // %, 0..100
    std::optional<double> rhmax;    // %, 0..100
    std::optional<double> wind;     // m/s, >= 0
    std::optional<double> sunshine; // hours, 0..24
    std::optional<double> et0;      // mm, >= 0

    bool operator==(const DailyRecord&) const = default;
};

enum class Variable { Rain, Tmin, Tmax, Tmean, RhMin, RhMax, Wind, Sunshine, Et0 };

inline constexpr Variable kAllVariables[] = {
    Variable::Rain, Variable::Tmin, Variable::Tmax,     Variable::Tmean, Variable::RhMin,
    Variable::RhMax, Variable::Wind, Variable::Sunshine, Variable::Et0,
};

const std::string& variable_name(Variable v);
Variable variable_from_name(const std::string& name); // throws UsageError

const std::optional<double>& get_field(const DailyRecord&, Variable);
std::optional<double>& get_field(DailyRecord&, Variable);

struct StationMeta {
    std::string station_id;
    double latitude = 0.0;  // degrees
    double longitude = 0.0; // degrees
    double altitude = 0.0;  // metres

    bool operator==(const StationMeta&) const = default;
};

// Date-ordered, gap-free daily series. Every date between the first and
// last record is present; unobserved days carry all-missing records.
struct StationSeries {
    StationMeta meta;
    std::vector<DailyRecord> records;

    bool empty() const { return records.empty(); }
    Date first_date() const { return records.front().date; }
    Date last_date() const { return records.back().date; }
    int first_year() const { return year_of(first_date()); }
    int last_year() const { return year_of(last_date()); }

    // Index of a date within records, or -1 when outside the range.
    int index_of(Date d) const;
    const DailyRecord* find(Date d) const;

    // True when the series starts on Jan 1 and ends on Dec 31.
    bool covers_whole_years() const;

    // One value per record; NaN marks missing.
    std::vector<double> column(Variable v) const;

    // Values for one calendar year, day-of-year indexed (size 365/366),
    // NaN for missing. Throws UsageError when the year is not covered.
    std::vector<double> year_values(Variable v, int year) const;

    bool operator==(const StationSeries&) const = default;
};

// Checks per-record invariants (ranges, tmin <= tmean <= tmax,
// rhmin <= rhmax). Returns an error message, or empty when valid.
std::string validate_record(const DailyRecord& r);

} // namespace agroseason

#endif
