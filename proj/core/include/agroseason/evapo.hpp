#ifndef AGROSEASON_EVAPO_HPP
#define AGROSEASON_EVAPO_HPP

#include <vector>

#include "agroseason/daily_record.hpp"

namespace agroseason::evapo {

// Station geometry and the radiation/wind conventions used by the
// reference-evapotranspiration computation (FAO irrigation & drainage
// paper 56 standard values).
struct SiteParams {
    double latitude_deg = 0.0;          // -90..90
    double altitude_m = 0.0;
    double albedo = 0.23;               // grass reference surface
    double angstrom_as = 0.25;          // overcast fraction of clear-sky radiation
    double angstrom_bs = 0.50;          // additional fraction on clear days
    double wind_measured_at_m = 2.0;    // anemometer height

    // Throws UsageError when latitude or albedo is out of range.
    void validate() const;
};

// Solar & vapour toolkit (all per FAO-56 daily formulation).
double saturation_vapour_pressure(double t_celsius);              // kPa
double svp_slope(double t_celsius);                               // kPa / degC
double atmospheric_pressure(double altitude_m);                   // kPa
double psychrometric_constant(double pressure_kpa);               // kPa / degC
double inverse_relative_distance(int day_of_year);                // dimensionless
double solar_declination(int day_of_year);                        // rad
double sunset_hour_angle(double latitude_rad, double declination_rad); // rad
double extraterrestrial_radiation(double latitude_rad, int day_of_year); // MJ m-2 day-1
double daylight_hours(double sunset_hour_angle_rad);              // hours
double wind_at_2m(double speed, double measured_at_m);            // m/s

// Daily grass-reference evapotranspiration (mm/day) by the FAO-56
// Penman-Monteith combination equation; net radiation from sunshine
// hours via the Angstrom formula, vapour pressure from the temperature
// and humidity extremes, soil heat flux taken as zero at daily scale.
// Requires tmin, tmax, rhmin, rhmax, wind, sunshine; a missing input
// raises DataError naming the absent fields. Negative results clamp to
// zero (`clamped`, when given, reports that).
double fao56_et0(const DailyRecord& record, const SiteParams& site, int day_of_year,
                 bool* clamped = nullptr);

enum class Et0Source { File, Computed, Missing };

struct Et0Day {
    Date date{};
    double value = 0.0; // NaN when source == Missing
    Et0Source source = Et0Source::Missing;
    bool clamped = false;
};

struct Et0Series {
    std::vector<Et0Day> days;
    int n_file = 0;
    int n_computed = 0;
    int n_missing = 0;

    // One value per day, NaN where missing; aligned with the input series.
    std::vector<double> values() const;
};

// Per-day ET0 for a whole series: the file's et0 column wins where
// present, otherwise the value is computed, otherwise the day is
// flagged missing. Never throws for coverage gaps.
Et0Series et0_series(const StationSeries& series, const SiteParams& site);

} // namespace agroseason::evapo

#endif
