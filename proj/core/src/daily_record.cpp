#include "agroseason/daily_record.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "agroseason/errors.hpp"

namespace agroseason {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::string kNames[] = {"rain",  "tmin", "tmax", "tmean",    "rhmin",
                              "rhmax", "wind", "sunshine", "et0"};
} // namespace

const std::string& variable_name(Variable v) {
    return kNames[static_cast<int>(v)];
}

Variable variable_from_name(const std::string& name) {
    for (Variable v : kAllVariables)
        if (variable_name(v) == name) return v;
    throw UsageError("unknown variable '" + name + "'");
}

const std::optional<double>& get_field(const DailyRecord& r, Variable v) {
    switch (v) {
    case Variable::Rain: return r.rain;
    case Variable::Tmin: return r.tmin;
    case Variable::Tmax: return r.tmax;
    case Variable::Tmean: return r.tmean;
    case Variable::RhMin: return r.rhmin;
    case Variable::RhMax: return r.rhmax;
    case Variable::Wind: return r.wind;
    case Variable::Sunshine: return r.sunshine;
    case Variable::Et0: return r.et0;
    }
    throw UsageError("unknown variable enumerator");
}

std::optional<double>& get_field(DailyRecord& r, Variable v) {
    return const_cast<std::optional<double>&>(get_field(static_cast<const DailyRecord&>(r), v));
}

int StationSeries::index_of(Date d) const {
    if (records.empty()) return -1;
    const int i = days_between(first_date(), d);
    if (i < 0 || i >= static_cast<int>(records.size())) return -1;
    return i;
}

const DailyRecord* StationSeries::find(Date d) const {
    const int i = index_of(d);
    return i < 0 ? nullptr : &records[static_cast<size_t>(i)];
}

bool StationSeries::covers_whole_years() const {
    if (records.empty()) return false;
    return month_of(first_date()) == 1 && day_of(first_date()) == 1 &&
           month_of(last_date()) == 12 && day_of(last_date()) == 31;
}

std::vector<double> StationSeries::column(Variable v) const {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        const auto& f = get_field(r, v);
        out.push_back(f ? *f : kNaN);
    }
    return out;
}

std::vector<double> StationSeries::year_values(Variable v, int year) const {
    if (records.empty() || year < first_year() || year > last_year())
        throw UsageError("year " + std::to_string(year) + " not covered by the series");
    const int n = days_in_year(year);
    std::vector<double> out(static_cast<size_t>(n), kNaN);
    const Date jan1 = std::chrono::year{year} / std::chrono::January / 1;
    for (int doy = 0; doy < n; ++doy) {
        const int idx = index_of(add_days(jan1, doy));
        if (idx < 0) continue;
        const auto& f = get_field(records[static_cast<size_t>(idx)], v);
        if (f) out[static_cast<size_t>(doy)] = *f;
    }
    return out;
}

std::string validate_record(const DailyRecord& r) {
    std::ostringstream msg;
    auto fail = [&](const std::string& what) {
        msg << to_iso(r.date) << ": " << what;
        return msg.str();
    };
    auto in_range = [](const std::optional<double>& f, double lo, double hi) {
        return !f || (!std::isnan(*f) && *f >= lo && *f <= hi);
    };
    const double inf = std::numeric_limits<double>::infinity();
    if (!in_range(r.rain, 0.0, inf)) return fail("rain out of range (must be >= 0)");
    if (!in_range(r.rhmin, 0.0, 100.0)) return fail("rhmin out of range [0,100]");
    if (!in_range(r.rhmax, 0.0, 100.0)) return fail("rhmax out of range [0,100]");
    if (!in_range(r.wind, 0.0, inf)) return fail("wind out of range (must be >= 0)");
    if (!in_range(r.sunshine, 0.0, 24.0)) return fail("sunshine out of range [0,24]");
    if (!in_range(r.et0, 0.0, inf)) return fail("et0 out of range (must be >= 0)");
    if (!in_range(r.tmin, -inf, inf) || !in_range(r.tmax, -inf, inf) ||
        !in_range(r.tmean, -inf, inf))
        return fail("temperature is not a number");
    if (r.tmin && r.tmax && *r.tmin > *r.tmax) return fail("tmin > tmax");
    if (r.tmin && r.tmean && r.tmax && (*r.tmean < *r.tmin || *r.tmean > *r.tmax))
        return fail("tmean outside [tmin, tmax]");
    if (r.rhmin && r.rhmax && *r.rhmin > *r.rhmax) return fail("rhmin > rhmax");
    return {};
}

} // namespace agroseason
