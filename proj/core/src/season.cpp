#include "agroseason/season.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "agroseason/errors.hpp"
#include "agroseason/ingest.hpp"

namespace agroseason::season {

namespace {

// 0-based day-of-year of a month-day within a year.
int doy0(int year, std::chrono::month_day md) {
    return day_of_year(Date{std::chrono::year{year}, md.month(), md.day()}) - 1;
}

int doy0(Date d) { return day_of_year(d) - 1; }

void check_slice(int year, std::span<const double> rain, int from, const char* what) {
    if (static_cast<int>(rain.size()) > days_in_year(year))
        throw UsageError(std::string(what) + ": slice longer than year " + std::to_string(year));
    for (int d = from; d < static_cast<int>(rain.size()); ++d)
        if (std::isnan(rain[static_cast<size_t>(d)]))
            throw DataError(std::string(what) + ": rain missing on " +
                            to_iso(date_from_doy(year, d + 1)) + "; impute first");
}

// Length of the longest dry run inside [lo, hi].
int longest_dry_run(std::span<const double> rain, int lo, int hi, double wet_day_mm) {
    int longest = 0, run = 0;
    for (int d = lo; d <= hi; ++d) {
        if (rain[static_cast<size_t>(d)] < wet_day_mm) {
            ++run;
            longest = std::max(longest, run);
        } else {
            run = 0;
        }
    }
    return longest;
}

} // namespace

void SeasonParams::validate() const {
    if (!(onset_accum_mm > 0) || !(siva_cess_rain_mm > 0) || !(presao_capacity_mm > 0) ||
        !(presao_daily_loss_mm > 0) || !(wet_day_mm > 0))
        throw UsageError("season thresholds must be positive");
    if (onset_accum_days < 1 || onset_guard_window < 1 || max_dry_run < 1 ||
        siva_cess_dry_days < 1)
        throw UsageError("season window lengths must be at least 1 day");
    const int reference_year = 2001; // any non-leap year orders the month-days
    if (doy0(reference_year, onset_search_start) >= doy0(reference_year, cessation_search_start))
        throw UsageError("onset search must precede cessation search within the year");
}

OnsetResult detect_onset_sivakumar(int year, std::span<const double> rain,
                                   const SeasonParams& params) {
    params.validate();
    const int n = static_cast<int>(rain.size());
    const int start0 = doy0(year, params.onset_search_start);
    if (n < start0 + params.onset_accum_days)
        throw InsufficientDataError("onset: slice ends before the search window of year " +
                                    std::to_string(year));
    check_slice(year, rain, start0, "onset");

    OnsetResult result;
    for (int d = start0; d + params.onset_accum_days - 1 < n; ++d) {
        // The accumulation opens on a wet day.
        if (rain[static_cast<size_t>(d)] < params.wet_day_mm) continue;
        double sum = 0.0;
        for (int k = 0; k < params.onset_accum_days; ++k) sum += rain[static_cast<size_t>(d + k)];
        if (sum < params.onset_accum_mm) continue;

        const int guard_lo = d + params.onset_accum_days;
        const int guard_hi = std::min(guard_lo + params.onset_guard_window - 1, n - 1);
        if (guard_lo <= guard_hi &&
            longest_dry_run(rain, guard_lo, guard_hi, params.wet_day_mm) > params.max_dry_run) {
            result.false_starts.push_back(date_from_doy(year, d + 1));
            continue;
        }
        result.onset = date_from_doy(year, d + 1);
        break;
    }
    return result;
}

CessationResult detect_cessation_sivakumar(int year, std::span<const double> rain,
                                           const SeasonParams& params) {
    params.validate();
    const int n = static_cast<int>(rain.size());
    const int start0 = doy0(year, params.cessation_search_start);
    if (n <= start0)
        throw InsufficientDataError("cessation: slice ends before the search start of year " +
                                    std::to_string(year));
    check_slice(year, rain, start0, "cessation");

    CessationResult result;
    for (int c = start0; c < n; ++c) {
        if (c + params.siva_cess_dry_days > n - 1) {
            // The probe window no longer fits; later candidates cannot qualify.
            result.end_of_data = true;
            break;
        }
        bool quiet = true;
        for (int k = c + 1; k <= c + params.siva_cess_dry_days; ++k) {
            if (rain[static_cast<size_t>(k)] >= params.siva_cess_rain_mm) {
                quiet = false;
                break;
            }
        }
        if (quiet) {
            result.date = date_from_doy(year, c + 1);
            return result;
        }
    }
    if (!result.date) result.end_of_data = true;
    return result;
}

void water_balance_step(WaterBalanceState& state, double rain_mm, double loss_mm) {
    state.stock = std::max(0.0, std::min(state.capacity, state.stock + rain_mm) - loss_mm);
}

PresaoResult detect_cessation_presao(int year, std::span<const double> rain,
                                     const SeasonParams& params,
                                     std::span<const double> daily_loss,
                                     std::optional<Date> onset) {
    params.validate();
    const int n = static_cast<int>(rain.size());
    const int start0 = doy0(year, params.cessation_search_start);
    if (n <= start0)
        throw InsufficientDataError("cessation: slice ends before the search start of year " +
                                    std::to_string(year));
    if (!daily_loss.empty() && daily_loss.size() != rain.size())
        throw UsageError("water balance: daily loss series must align with the rain slice");

    const bool spinup = params.presao_spinup_from_onset && onset.has_value();
    int begin0 = start0;
    if (spinup) {
        if (year_of(*onset) != year) throw UsageError("water balance: onset outside the year");
        begin0 = std::min(doy0(*onset), start0);
    }
    check_slice(year, rain, begin0, "cessation");

    WaterBalanceState state;
    state.capacity = params.presao_capacity_mm;
    state.stock = spinup ? 0.0 : params.presao_capacity_mm;

    PresaoResult result;
    result.trace_start = date_from_doy(year, begin0 + 1);
    result.stock_by_day.reserve(static_cast<size_t>(n - begin0));
    for (int d = begin0; d < n; ++d) {
        double loss = params.presao_daily_loss_mm;
        if (!daily_loss.empty() && !std::isnan(daily_loss[static_cast<size_t>(d)]))
            loss = daily_loss[static_cast<size_t>(d)];
        water_balance_step(state, rain[static_cast<size_t>(d)], loss);
        result.stock_by_day.push_back(state.stock);
        if (d >= start0 && state.stock == 0.0) {
            result.date = date_from_doy(year, d + 1);
            return result;
        }
    }
    result.end_of_data = true;
    return result;
}

std::vector<SeasonMarkers> season_summary(const StationSeries& series,
                                          const SeasonParams& params,
                                          const evapo::Et0Series* et0) {
    params.validate();
    if (series.empty()) throw InsufficientDataError("season summary: empty series");
    if (!series.covers_whole_years())
        throw DataError("season summary needs whole calendar years (Jan 1 through Dec 31)");

    std::vector<double> loss_all;
    if (et0) {
        if (et0->days.size() != series.records.size())
            throw UsageError("season summary: ET0 series must align with the station series");
        loss_all = et0->values();
    }

    std::vector<SeasonMarkers> out;
    for (int y = series.first_year(); y <= series.last_year(); ++y) {
        const auto rain = series.year_values(Variable::Rain, y);
        check_slice(y, rain, 0, "season summary");

        SeasonMarkers m;
        m.year = y;

        const auto onset_res = detect_onset_sivakumar(y, rain, params);
        m.onset = onset_res.onset;
        m.false_start_dates = onset_res.false_starts;

        const auto siva = detect_cessation_sivakumar(y, rain, params);
        m.cessation_siva = siva.date;
        m.siva_end_of_data = siva.end_of_data;

        std::span<const double> loss_slice;
        if (et0 && params.presao_loss_from_et0) {
            const int i0 = series.index_of(Date{std::chrono::year{y}, std::chrono::January,
                                                std::chrono::day{1}});
            loss_slice = std::span<const double>(loss_all.data() + i0,
                                                static_cast<size_t>(days_in_year(y)));
        }
        const auto presao = detect_cessation_presao(y, rain, params, loss_slice,
                                                    params.presao_spinup_from_onset
                                                        ? m.onset
                                                        : std::optional<Date>{});
        m.cessation_presao = presao.date;
        m.presao_end_of_data = presao.end_of_data;

        if (m.onset && m.cessation_siva)
            m.length_siva = static_cast<int>(days_between(*m.onset, *m.cessation_siva));
        if (m.onset && m.cessation_presao)
            m.length_presao = static_cast<int>(days_between(*m.onset, *m.cessation_presao));

        for (double r : rain)
            if (r >= params.wet_day_mm) ++m.rainy_days_in_year;
        if (m.onset && m.cessation_siva && *m.onset <= *m.cessation_siva) {
            int count = 0;
            for (int d = doy0(*m.onset); d <= doy0(*m.cessation_siva); ++d)
                if (rain[static_cast<size_t>(d)] >= params.wet_day_mm) ++count;
            m.rainy_days_in_season = count;
        }
        out.push_back(std::move(m));
    }
    return out;
}

DrySpellCatalog dry_spells(int year, std::span<const double> rain, const SeasonParams& params,
                           SpellScope scope, std::optional<Date> season_start,
                           std::optional<Date> season_end) {
    params.validate();
    const int n = static_cast<int>(rain.size());
    if (n == 0) throw InsufficientDataError("dry spells: empty slice");

    int lo = 0, hi = n - 1;
    if (scope == SpellScope::WithinSeason) {
        if (!season_start || !season_end)
            throw UsageError("dry spells: within-season scope needs a defined season");
        if (year_of(*season_start) != year || year_of(*season_end) != year)
            throw UsageError("dry spells: season bounds outside year " + std::to_string(year));
        lo = std::max(lo, doy0(*season_start));
        hi = std::min(hi, doy0(*season_end));
        if (lo > hi) throw UsageError("dry spells: season bounds are reversed");
    }
    if (static_cast<int>(rain.size()) > days_in_year(year))
        throw UsageError("dry spells: slice longer than year " + std::to_string(year));
    for (int d = lo; d <= hi; ++d)
        if (std::isnan(rain[static_cast<size_t>(d)]))
            throw DataError("dry spells: rain missing on " + to_iso(date_from_doy(year, d + 1)) +
                            "; impute first");

    DrySpellCatalog catalog;
    catalog.scope = scope;
    int run_start = -1;
    for (int d = lo; d <= hi + 1; ++d) {
        const bool dry = d <= hi && rain[static_cast<size_t>(d)] < params.wet_day_mm;
        if (dry && run_start < 0) run_start = d;
        if (!dry && run_start >= 0) {
            catalog.spells.push_back({date_from_doy(year, run_start + 1), d - run_start});
            run_start = -1;
        }
    }
    return catalog;
}

double OnsetRisk::exceedance(double day) const {
    if (sorted_doys.empty()) return 0.0;
    const auto it = std::upper_bound(sorted_doys.begin(), sorted_doys.end(), day);
    return static_cast<double>(sorted_doys.end() - it) / static_cast<double>(sorted_doys.size());
}

OnsetRisk onset_risk_quantiles(std::span<const int> onset_doys) {
    if (onset_doys.size() < 5)
        throw InsufficientDataError("sowing risk needs at least 5 onset dates, got " +
                                    std::to_string(onset_doys.size()));
    OnsetRisk risk;
    risk.n = static_cast<int>(onset_doys.size());
    risk.sorted_doys.assign(onset_doys.begin(), onset_doys.end());
    std::sort(risk.sorted_doys.begin(), risk.sorted_doys.end());
    risk.q10 = ingest::quantile_sorted(risk.sorted_doys, 0.10);
    risk.q25 = ingest::quantile_sorted(risk.sorted_doys, 0.25);
    risk.q50 = ingest::quantile_sorted(risk.sorted_doys, 0.50);
    risk.q75 = ingest::quantile_sorted(risk.sorted_doys, 0.75);
    risk.q90 = ingest::quantile_sorted(risk.sorted_doys, 0.90);
    return risk;
}

} // namespace agroseason::season
