#include "agroseason/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "agroseason/errors.hpp"
#include "agroseason/num_format.hpp"

namespace agroseason::ingest {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    cells.push_back(trim(cur));
    return cells;
}

bool is_na(const std::string& cell) {
    if (cell.empty()) return true;
    if (cell.size() == 2 && std::toupper(static_cast<unsigned char>(cell[0])) == 'N' &&
        std::toupper(static_cast<unsigned char>(cell[1])) == 'A')
        return true;
    return false;
}

std::optional<double> parse_cell(const std::string& cell) {
    if (is_na(cell)) return std::nullopt;
    double v = 0.0;
    auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || p != cell.data() + cell.size() || std::isnan(v))
        return std::nullopt; // unparseable cells count as missing
    return v;
}

std::string cell_of(const std::optional<double>& f) {
    return f ? format_double(*f) : std::string{};
}

} // namespace

StationSeries parse_daily_csv(std::istream& in, const CsvSchema& schema) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("csv: empty input, header row expected");
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3); // BOM
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split_csv_line(line);
    int date_col = -1;
    std::array<int, 9> var_col;
    var_col.fill(-1);
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == schema.date) date_col = static_cast<int>(i);
        for (Variable v : kAllVariables)
            if (header[i] == schema.column_for(v)) var_col[static_cast<int>(v)] = static_cast<int>(i);
    }
    if (date_col < 0)
        throw DataError("csv: header has no '" + schema.date + "' column");
    if (var_col[static_cast<int>(Variable::Rain)] < 0)
        throw DataError("csv: header has no '" + schema.column_for(Variable::Rain) + "' column");
    const bool derive_tmean = var_col[static_cast<int>(Variable::Tmean)] < 0;

    std::map<Date, DailyRecord> by_date;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw DataError("csv line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(cells.size()));
        const auto date = parse_iso(cells[static_cast<size_t>(date_col)]);
        if (!date)
            throw DataError("csv line " + std::to_string(line_no) + ": bad date '" +
                            cells[static_cast<size_t>(date_col)] + "'");

        DailyRecord rec;
        rec.date = *date;
        for (Variable v : kAllVariables) {
            const int col = var_col[static_cast<int>(v)];
            if (col >= 0) get_field(rec, v) = parse_cell(cells[static_cast<size_t>(col)]);
        }
        if (derive_tmean && rec.tmin && rec.tmax) rec.tmean = (*rec.tmin + *rec.tmax) / 2.0;

        if (const auto msg = validate_record(rec); !msg.empty())
            throw DataError("csv line " + std::to_string(line_no) + ": " + msg);
        if (!by_date.emplace(*date, rec).second)
            throw DataError("csv line " + std::to_string(line_no) + ": duplicate date " +
                            to_iso(*date));
    }
    if (by_date.empty()) throw DataError("csv: no data rows");

    StationSeries series;
    const Date first = by_date.begin()->first;
    const Date last = by_date.rbegin()->first;
    series.records.reserve(static_cast<size_t>(days_between(first, last)) + 1);
    for (Date d = first;; d = add_days(d, 1)) {
        auto it = by_date.find(d);
        if (it != by_date.end()) {
            series.records.push_back(it->second);
        } else {
            DailyRecord gap;
            gap.date = d;
            series.records.push_back(gap);
        }
        if (d == last) break;
    }
    return series;
}

StationSeries parse_daily_csv_file(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open input file: " + path);
    return parse_daily_csv(in, schema);
}

void write_daily_csv(const StationSeries& series, std::ostream& out) {
    out << "date,rain,tmin,tmax,tmean,rhmin,rhmax,wind,sunshine,et0\n";
    for (const auto& r : series.records) {
        out << to_iso(r.date) << ',' << cell_of(r.rain) << ',' << cell_of(r.tmin) << ','
            << cell_of(r.tmax) << ',' << cell_of(r.tmean) << ',' << cell_of(r.rhmin) << ','
            << cell_of(r.rhmax) << ',' << cell_of(r.wind) << ',' << cell_of(r.sunshine) << ','
            << cell_of(r.et0) << '\n';
    }
}

StationMeta load_station_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open station file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("station file " + path + ": " + e.what());
    }
    StationMeta meta;
    try {
        meta.station_id = j.at("station_id").get<std::string>();
        meta.latitude = j.at("latitude").get<double>();
        meta.longitude = j.at("longitude").get<double>();
        meta.altitude = j.at("altitude").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError("station file " + path + ": " + e.what());
    }
    if (meta.latitude < -90.0 || meta.latitude > 90.0)
        throw DataError("station file " + path + ": latitude out of range");
    return meta;
}

void save_station_json(const StationMeta& meta, const std::string& path) {
    nlohmann::json j{{"station_id", meta.station_id},
                     {"latitude", meta.latitude},
                     {"longitude", meta.longitude},
                     {"altitude", meta.altitude}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write station file: " + path);
    out << j.dump(2) << '\n';
}

ImputationResult impute_missing(const StationSeries& series) {
    ImputationResult result;
    result.series = series;

    for (Variable v : kAllVariables) {
        std::array<double, 365> sum{};
        std::array<int, 365> count{};
        bool any = false;
        for (const auto& r : series.records) {
            const auto& f = get_field(r, v);
            if (!f) continue;
            const int slot = climatology_slot(r.date);
            sum[static_cast<size_t>(slot)] += *f;
            ++count[static_cast<size_t>(slot)];
            any = true;
        }
        if (!any) continue; // variable not observed at all: nothing to impute against

        for (auto& r : result.series.records) {
            auto& f = get_field(r, v);
            if (f) continue;
            const int slot = climatology_slot(r.date);
            if (count[static_cast<size_t>(slot)] == 0)
                throw InsufficientDataError(
                    "imputation impossible: no observation of " + variable_name(v) + " on any " +
                    to_iso(r.date).substr(5) + " across the series");
            const double m = sum[static_cast<size_t>(slot)] / count[static_cast<size_t>(slot)];
            f = m;
            result.report.push_back({r.date, v, m});
        }
    }
    return result;
}

PeriodKind period_kind_from_name(const std::string& name) {
    if (name == "monthly") return PeriodKind::Monthly;
    if (name == "annual") return PeriodKind::Annual;
    throw UsageError("unknown period '" + name + "' (use monthly|annual)");
}

Statistic statistic_from_name(const std::string& name) {
    if (name == "sum") return Statistic::Sum;
    if (name == "mean") return Statistic::Mean;
    if (name == "max") return Statistic::Max;
    throw UsageError("unknown statistic '" + name + "' (use sum|mean|max)");
}

const std::string& period_kind_name(PeriodKind k) {
    static const std::string names[] = {"monthly", "annual"};
    return names[static_cast<int>(k)];
}

const std::string& statistic_name(Statistic s) {
    static const std::string names[] = {"sum", "mean", "max"};
    return names[static_cast<int>(s)];
}

std::string AggregatePoint::period_key() const {
    char buf[16];
    if (month > 0)
        std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
    else
        std::snprintf(buf, sizeof(buf), "%04d", year);
    return buf;
}

std::vector<double> AggregatedSeries::values_or_nan() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.value ? *p.value : kNaN);
    return out;
}

AggregatedSeries aggregate(const StationSeries& series, Variable v, PeriodKind period,
                           Statistic stat) {
    if (series.empty()) throw InsufficientDataError("aggregate: empty series");
    AggregatedSeries out;
    out.variable = v;
    out.period_kind = period;
    out.statistic = stat;

    struct Acc {
        double sum = 0, max = -std::numeric_limits<double>::infinity();
        int count = 0;
    };
    std::map<std::pair<int, int>, Acc> acc; // (year, month-or-0) -> accumulator

    // Materialize every period in range so gaps stay visible.
    for (int y = series.first_year(); y <= series.last_year(); ++y) {
        if (period == PeriodKind::Annual) {
            acc[{y, 0}];
        } else {
            const unsigned m_lo = y == series.first_year() ? month_of(series.first_date()) : 1;
            const unsigned m_hi = y == series.last_year() ? month_of(series.last_date()) : 12;
            for (unsigned m = m_lo; m <= m_hi; ++m) acc[{y, static_cast<int>(m)}];
        }
    }
    for (const auto& r : series.records) {
        const auto& f = get_field(r, v);
        if (!f) continue;
        const int month = period == PeriodKind::Monthly ? static_cast<int>(month_of(r.date)) : 0;
        Acc& a = acc[{year_of(r.date), month}];
        a.sum += *f;
        a.max = std::max(a.max, *f);
        ++a.count;
    }

    for (const auto& [key, a] : acc) {
        AggregatePoint p;
        p.year = key.first;
        p.month = key.second;
        p.count = a.count;
        if (a.count > 0) {
            switch (stat) {
            case Statistic::Sum: p.value = a.sum; break;
            case Statistic::Mean: p.value = a.sum / a.count; break;
            case Statistic::Max: p.value = a.max; break;
            }
        }
        out.points.push_back(p);
    }
    return out;
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw InsufficientDataError("quantile of empty data");
    if (sorted.size() == 1) return sorted[0];
    p = std::clamp(p, 0.0, 1.0);
    const double h = p * static_cast<double>(sorted.size() - 1);
    const size_t lo = static_cast<size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

Statistic default_statistic(Variable v) {
    return v == Variable::Rain ? Statistic::Sum : Statistic::Mean;
}

RegimeSummary regime(const StationSeries& series, Variable v, std::optional<Statistic> stat) {
    const Statistic s = stat.value_or(default_statistic(v));
    const auto monthly = aggregate(series, v, PeriodKind::Monthly, s);

    RegimeSummary out;
    out.variable = v;
    out.statistic = s;
    std::array<std::vector<double>, 12> pooled;
    for (const auto& p : monthly.points)
        if (p.value) pooled[static_cast<size_t>(p.month - 1)].push_back(*p.value);

    for (int m = 0; m < 12; ++m) {
        auto& vals = pooled[static_cast<size_t>(m)];
        MonthSummary& ms = out.months[static_cast<size_t>(m)];
        ms.count = static_cast<int>(vals.size());
        if (vals.empty()) continue;
        std::sort(vals.begin(), vals.end());
        ms.min = vals.front();
        ms.max = vals.back();
        ms.q1 = quantile_sorted(vals, 0.25);
        ms.median = quantile_sorted(vals, 0.50);
        ms.q3 = quantile_sorted(vals, 0.75);
        double sum = 0;
        for (double x : vals) sum += x;
        ms.mean = sum / static_cast<double>(vals.size());
    }
    return out;
}

Histogram occurrence_histogram(const StationSeries& series, Variable v,
                               const std::vector<double>& bin_edges) {
    if (bin_edges.size() < 2) throw UsageError("histogram needs at least two bin edges");
    for (size_t i = 1; i < bin_edges.size(); ++i)
        if (!(bin_edges[i] > bin_edges[i - 1]))
            throw UsageError("histogram bin edges must be strictly ascending");

    Histogram h;
    h.variable = v;
    h.bin_edges = bin_edges;
    h.counts.assign(bin_edges.size() - 1, 0);
    for (const auto& r : series.records) {
        const auto& f = get_field(r, v);
        if (!f) continue;
        const double x = *f;
        if (x < bin_edges.front() || x > bin_edges.back()) {
            ++h.overflow;
            continue;
        }
        if (x == bin_edges.back()) { // last bin is closed
            ++h.counts.back();
            continue;
        }
        const auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), x);
        ++h.counts[static_cast<size_t>(it - bin_edges.begin()) - 1];
    }
    return h;
}

} // namespace agroseason::ingest
