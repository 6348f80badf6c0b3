#include "agroseason/evapo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "agroseason/errors.hpp"

namespace agroseason::evapo {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSolarConstant = 0.0820;        // MJ m-2 min-1
constexpr double kStefanBoltzmannDaily = 4.903e-9; // MJ K-4 m-2 day-1
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
} // namespace

void SiteParams::validate() const {
    if (latitude_deg < -90.0 || latitude_deg > 90.0)
        throw UsageError("latitude " + std::to_string(latitude_deg) + " outside [-90, 90]");
    if (albedo < 0.0 || albedo > 1.0)
        throw UsageError("albedo " + std::to_string(albedo) + " outside [0, 1]");
}

double saturation_vapour_pressure(double t_celsius) {
    return 0.6108 * std::exp(17.27 * t_celsius / (t_celsius + 237.3));
}

double svp_slope(double t_celsius) {
    const double d = t_celsius + 237.3;
    return 4098.0 * saturation_vapour_pressure(t_celsius) / (d * d);
}

double atmospheric_pressure(double altitude_m) {
    return 101.3 * std::pow((293.0 - 0.0065 * altitude_m) / 293.0, 5.26);
}

double psychrometric_constant(double pressure_kpa) { return 0.000665 * pressure_kpa; }

double inverse_relative_distance(int day_of_year) {
    return 1.0 + 0.033 * std::cos(2.0 * kPi / 365.0 * day_of_year);
}

double solar_declination(int day_of_year) {
    return 0.409 * std::sin(2.0 * kPi / 365.0 * day_of_year - 1.39);
}

double sunset_hour_angle(double latitude_rad, double declination_rad) {
    // Clamp keeps polar day/night finite instead of NaN.
    const double c = std::clamp(-std::tan(latitude_rad) * std::tan(declination_rad), -1.0, 1.0);
    return std::acos(c);
}

double extraterrestrial_radiation(double latitude_rad, int day_of_year) {
    const double dr = inverse_relative_distance(day_of_year);
    const double decl = solar_declination(day_of_year);
    const double ws = sunset_hour_angle(latitude_rad, decl);
    return 24.0 * 60.0 / kPi * kSolarConstant * dr *
           (ws * std::sin(latitude_rad) * std::sin(decl) +
            std::cos(latitude_rad) * std::cos(decl) * std::sin(ws));
}

double daylight_hours(double sunset_hour_angle_rad) { return 24.0 / kPi * sunset_hour_angle_rad; }

double wind_at_2m(double speed, double measured_at_m) {
    if (measured_at_m <= 0.0) throw UsageError("wind measurement height must be positive");
    if (measured_at_m == 2.0) return speed;
    return speed * 4.87 / std::log(67.8 * measured_at_m - 5.42);
}

double fao56_et0(const DailyRecord& record, const SiteParams& site, int day_of_year,
                 bool* clamped) {
    site.validate();
    if (day_of_year < 1 || day_of_year > 366)
        throw UsageError("day of year " + std::to_string(day_of_year) + " outside [1, 366]");

    std::string missing;
    for (Variable v : {Variable::Tmin, Variable::Tmax, Variable::RhMin, Variable::RhMax,
                       Variable::Wind, Variable::Sunshine}) {
        if (!get_field(record, v)) {
            if (!missing.empty()) missing += ", ";
            missing += variable_name(v);
        }
    }
    if (!missing.empty())
        throw DataError(to_iso(record.date) + ": inputs missing for ET0: " + missing);

    const double tmin = *record.tmin;
    const double tmax = *record.tmax;
    const double tmean = (tmin + tmax) / 2.0;
    const double lat = site.latitude_deg * kPi / 180.0;

    const double es = (saturation_vapour_pressure(tmin) + saturation_vapour_pressure(tmax)) / 2.0;
    const double ea = (saturation_vapour_pressure(tmin) * *record.rhmax / 100.0 +
                       saturation_vapour_pressure(tmax) * *record.rhmin / 100.0) /
                      2.0;
    const double delta = svp_slope(tmean);
    const double gamma = psychrometric_constant(atmospheric_pressure(site.altitude_m));

    const double ra = extraterrestrial_radiation(lat, day_of_year);
    const double daylight = daylight_hours(sunset_hour_angle(lat, solar_declination(day_of_year)));
    const double sun_fraction = daylight > 0.0 ? *record.sunshine / daylight : 0.0;
    const double rs = (site.angstrom_as + site.angstrom_bs * sun_fraction) * ra;
    const double rso = (0.75 + 2e-5 * site.altitude_m) * ra;
    const double rel_sun = rso > 0.0 ? std::min(rs / rso, 1.0) : 1.0;

    const double rns = (1.0 - site.albedo) * rs;
    const double tmin_k = tmin + 273.16;
    const double tmax_k = tmax + 273.16;
    const double rnl = kStefanBoltzmannDaily *
                       (std::pow(tmax_k, 4) + std::pow(tmin_k, 4)) / 2.0 *
                       (0.34 - 0.14 * std::sqrt(ea)) * (1.35 * rel_sun - 0.35);
    const double rn = rns - rnl;

    const double u2 = wind_at_2m(*record.wind, site.wind_measured_at_m);
    const double et0 = (0.408 * delta * rn + gamma * 900.0 / (tmean + 273.0) * u2 * (es - ea)) /
                       (delta + gamma * (1.0 + 0.34 * u2));

    if (clamped) *clamped = et0 < 0.0;
    return std::max(et0, 0.0);
}

std::vector<double> Et0Series::values() const {
    std::vector<double> out;
    out.reserve(days.size());
    for (const auto& d : days) out.push_back(d.source == Et0Source::Missing ? kNaN : d.value);
    return out;
}

Et0Series et0_series(const StationSeries& series, const SiteParams& site) {
    site.validate();
    Et0Series out;
    out.days.reserve(series.records.size());
    for (const auto& r : series.records) {
        Et0Day day;
        day.date = r.date;
        if (r.et0) {
            day.value = *r.et0;
            day.source = Et0Source::File;
            ++out.n_file;
        } else if (r.tmin && r.tmax && r.rhmin && r.rhmax && r.wind && r.sunshine) {
            day.value = fao56_et0(r, site, day_of_year(r.date), &day.clamped);
            day.source = Et0Source::Computed;
            ++out.n_computed;
        } else {
            day.value = kNaN;
            day.source = Et0Source::Missing;
            ++out.n_missing;
        }
        out.days.push_back(day);
    }
    return out;
}

} // namespace agroseason::evapo
