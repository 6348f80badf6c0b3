#ifndef AGROSEASON_INGEST_HPP
#define AGROSEASON_INGEST_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agroseason/daily_record.hpp"

namespace agroseason::ingest {

// Maps logical fields to CSV column names. Only `date` and `rain` must
// be present in the file; other columns are picked up when found.
struct CsvSchema {
    std::string date = "date";
    std::array<std::string, 9> columns = {"rain",  "tmin", "tmax",     "tmean", "rhmin",
                                          "rhmax", "wind", "sunshine", "et0"};

    const std::string& column_for(Variable v) const { return columns[static_cast<int>(v)]; }
    std::string& column_for(Variable v) { return columns[static_cast<int>(v)]; }
};

// Parses daily records from CSV. Empty cells and "NA" (any case) are
// missing. Cells that fail to parse as numbers are missing as well;
// values violating their documented range reject the file. Gaps in the
// date sequence are materialized as all-missing records so the result
// covers the full inclusive range. When the file has no tmean column,
// tmean is derived as (tmin+tmax)/2 where both are present.
StationSeries parse_daily_csv(std::istream& in, const CsvSchema& schema = {});
StationSeries parse_daily_csv_file(const std::string& path, const CsvSchema& schema = {});

// Writes the same schema back out; numbers use shortest round-trip
// formatting so parse(write(s)) == s.
void write_daily_csv(const StationSeries& series, std::ostream& out);

// Station metadata sidecar: {"station_id", "latitude", "longitude", "altitude"}.
StationMeta load_station_json(const std::string& path);
void save_station_json(const StationMeta& meta, const std::string& path);

struct ImputedValue {
    Date date{};
    Variable variable{};
    double value = 0.0;
};

struct ImputationResult {
    StationSeries series;
    std::vector<ImputedValue> report;
};

// Fills every missing value with the mean of the same variable on the
// same day-of-year across the years where it was observed (Feb 29 pools
// with Feb 28). Variables with no observations at all are left alone;
// a partially observed variable whose climatology slot is empty where a
// value is needed raises InsufficientDataError.
ImputationResult impute_missing(const StationSeries& series);

enum class PeriodKind { Monthly, Annual };
enum class Statistic { Sum, Mean, Max };

PeriodKind period_kind_from_name(const std::string& name); // throws UsageError
Statistic statistic_from_name(const std::string& name);    // throws UsageError
const std::string& period_kind_name(PeriodKind k);
const std::string& statistic_name(Statistic s);

struct AggregatePoint {
    int year = 0;
    int month = 0; // 1..12, or 0 for annual points
    std::optional<double> value;
    int count = 0; // contributing non-missing days

    std::string period_key() const;
};

struct AggregatedSeries {
    Variable variable{};
    PeriodKind period_kind{};
    Statistic statistic{};
    std::vector<AggregatePoint> points;

    // Values only, NaN where a period had no data.
    std::vector<double> values_or_nan() const;
};

// Per-period statistic over non-missing values; one point per period in
// the series range, missing (count 0) when no day contributed.
AggregatedSeries aggregate(const StationSeries& series, Variable v, PeriodKind period,
                           Statistic stat);

struct MonthSummary {
    int count = 0; // pooled values behind the summary; 0 = missing month
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
};

struct RegimeSummary {
    Variable variable{};
    Statistic statistic{};
    std::array<MonthSummary, 12> months{};
};

// Pools the per-year monthly aggregate of a variable (sum for rain,
// mean otherwise, unless overridden) and summarizes each calendar month
// with min/q1/median/q3/max/mean. Quartiles use linear interpolation on
// the sorted pooled values.
RegimeSummary regime(const StationSeries& series, Variable v,
                     std::optional<Statistic> stat = std::nullopt);

// Default monthly aggregate used by regime and the report pipeline.
Statistic default_statistic(Variable v);

struct Histogram {
    Variable variable{};
    std::vector<double> bin_edges;
    std::vector<std::int64_t> counts; // size = edges - 1
    std::int64_t overflow = 0;        // non-missing values outside the edges
};

// Daily-value occurrence counts: bins are [e_i, e_{i+1}) and the last
// bin is closed. Values outside the edge range land in `overflow`.
Histogram occurrence_histogram(const StationSeries& series, Variable v,
                               const std::vector<double>& bin_edges);

// Linear-interpolation quantile on sorted values (the convention behind
// the regime quartiles and the onset risk table): index h = (n-1)*p.
double quantile_sorted(std::span<const double> sorted, double p);

} // namespace agroseason::ingest

#endif
