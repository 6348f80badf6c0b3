#ifndef AGROSEASON_SEASON_HPP
#define AGROSEASON_SEASON_HPP

#include <chrono>
#include <optional>
#include <span>
#include <vector>

#include "agroseason/daily_record.hpp"
#include "agroseason/evapo.hpp"

namespace agroseason::season {

// Thresholds and search windows for the onset / cessation criteria.
// Defaults encode the operational Sahel settings: a wet day carrying
// >= 20 mm over 3 days after May 01 opens the season unless an 8-day
// dry run appears in the next 30 days; cessation is searched from
// Sep 01, either as a 20-day run without a 5 mm rain or as the
// exhaustion of a 70 mm soil water store losing 5 mm/day.
struct SeasonParams {
    std::chrono::month_day onset_search_start{std::chrono::May, std::chrono::day{1}};
    double onset_accum_mm = 20.0;
    int onset_accum_days = 3;
    int onset_guard_window = 30; // days probed after the accumulation window
    int max_dry_run = 7;         // longest dry run tolerated inside the guard window
    std::chrono::month_day cessation_search_start{std::chrono::September, std::chrono::day{1}};
    double siva_cess_rain_mm = 5.0;
    int siva_cess_dry_days = 20; // 14 reproduces the two-week variant
    double presao_capacity_mm = 70.0;
    double presao_daily_loss_mm = 5.0;
    double wet_day_mm = 1.0; // a day is wet iff rain >= wet_day_mm
    bool presao_spinup_from_onset = false; // fill the store from onset instead of assuming it full
    bool presao_loss_from_et0 = false;     // use daily ET0 as the loss where available

    // Throws UsageError when a threshold is non-positive or the onset
    // search does not precede the cessation search.
    void validate() const;
};

struct OnsetResult {
    std::optional<Date> onset;
    // Candidates that met the accumulation test but failed the
    // dry-run guard, in date order.
    std::vector<Date> false_starts;
};

// Season onset for one year: the earliest wet day d at or after the
// search start whose `onset_accum_days`-day rainfall reaches
// `onset_accum_mm`, provided no dry run longer than `max_dry_run`
// occurs in the `onset_guard_window` days after the accumulation
// window (truncated at the end of the slice).
// `rain` is day-of-year indexed (index 0 = Jan 1) and must be complete
// (no NaN) from the search start onward.
OnsetResult detect_onset_sivakumar(int year, std::span<const double> rain,
                                   const SeasonParams& params);

struct CessationResult {
    std::optional<Date> date;
    bool end_of_data = false; // undefined because the slice ran out
};

// Season cessation for one year: the earliest date c at or after the
// search start such that every one of the `siva_cess_dry_days` days
// after c stays below `siva_cess_rain_mm`. Windows cut short by the end
// of the slice cannot qualify; exhausting them sets end_of_data.
CessationResult detect_cessation_sivakumar(int year, std::span<const double> rain,
                                           const SeasonParams& params);

struct WaterBalanceState {
    double stock = 0.0;    // mm, always in [0, capacity]
    double capacity = 0.0; // mm
};

// One daily step of the soil water store: add the day's rain, cap at
// capacity, subtract the day's loss, floor at zero. The order is part
// of the contract so results are bit-reproducible.
void water_balance_step(WaterBalanceState& state, double rain_mm, double loss_mm);

struct PresaoResult {
    std::optional<Date> date;
    bool end_of_data = false;        // store never emptied before the slice ran out
    Date trace_start{};              // date of stock_by_day[0]
    std::vector<double> stock_by_day; // end-of-day stock from trace_start onward
};

// Water-balance cessation for one year: a store of
// `presao_capacity_mm` starts full on the search start (or fills from
// empty starting at `onset` when spin-up is enabled), gains each day's
// rain and loses `presao_daily_loss_mm` (or the day's entry of
// `daily_loss` where given and finite). Cessation is the first date at
// or after the search start whose end-of-day stock is zero.
PresaoResult detect_cessation_presao(int year, std::span<const double> rain,
                                     const SeasonParams& params,
                                     std::span<const double> daily_loss = {},
                                     std::optional<Date> onset = std::nullopt);

struct SeasonMarkers {
    int year = 0;
    std::optional<Date> onset;
    std::optional<Date> cessation_siva;
    std::optional<Date> cessation_presao;
    bool siva_end_of_data = false;
    bool presao_end_of_data = false;
    std::optional<int> length_siva;   // cessation_siva - onset, days
    std::optional<int> length_presao; // cessation_presao - onset, days
    std::optional<int> rainy_days_in_season; // wet days in [onset, cessation_siva]
    int rainy_days_in_year = 0;              // wet days in the calendar year
    std::vector<Date> false_start_dates;
};

// Per-year markers for a whole-calendar-year series: onset, both
// cessations, season lengths, and wet-day counts. Rain must be
// complete (impute first); an undefined onset or cessation leaves the
// dependent fields undefined. `et0` (aligned with the series) supplies
// the water-balance loss when the params ask for it.
std::vector<SeasonMarkers> season_summary(const StationSeries& series,
                                          const SeasonParams& params,
                                          const evapo::Et0Series* et0 = nullptr);

enum class SpellScope { WholeYear, WithinSeason };

struct DrySpell {
    Date start{};
    int length = 0; // consecutive days with rain < wet_day_mm
};

struct DrySpellCatalog {
    std::vector<DrySpell> spells; // ordered, non-overlapping
    SpellScope scope = SpellScope::WholeYear;
};

// Maximal dry runs in a year slice, either across the whole year or
// clipped to [season_start, season_end]. Within-season scope with an
// undefined season raises UsageError.
DrySpellCatalog dry_spells(int year, std::span<const double> rain, const SeasonParams& params,
                           SpellScope scope,
                           std::optional<Date> season_start = std::nullopt,
                           std::optional<Date> season_end = std::nullopt);

struct OnsetRisk {
    double q10 = 0, q25 = 0, q50 = 0, q75 = 0, q90 = 0; // day-of-year quantiles
    std::vector<double> sorted_doys;
    int n = 0;

    // Fraction of years whose onset falls after the given day-of-year.
    double exceedance(double day_of_year) const;
};

// Empirical sowing-risk table over observed onset days-of-year
// (linear-interpolation quantiles); needs at least 5 dates.
OnsetRisk onset_risk_quantiles(std::span<const int> onset_doys);

} // namespace agroseason::season

#endif
