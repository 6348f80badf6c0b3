#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <agroseason/calendar.hpp>
#include <agroseason/errors.hpp>
#include <agroseason/num_format.hpp>
#include <agroseason/stats.hpp>

namespace agroseason::tool {

namespace fs = std::filesystem;

namespace {

constexpr const char* kSchemaVersion = "1.0.0";

std::string month_day_string(std::chrono::month_day md) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%02u-%02u", unsigned(md.month()), unsigned(md.day()));
    return buf;
}

std::chrono::month_day parse_month_day(const std::string& text) {
    unsigned m = 0, d = 0;
    if (std::sscanf(text.c_str(), "%2u-%2u", &m, &d) != 2 || text.size() != 5 ||
        !make_date(2000, m, d).ok()) // leap reference year admits Feb 29
        throw UsageError("bad month-day '" + text + "', expected MM-DD");
    return std::chrono::month_day{std::chrono::month{m}, std::chrono::day{d}};
}

// Annual aggregate of one variable with its period labels.
struct AnnualSeries {
    std::vector<double> values;
    std::vector<std::string> keys;
    ingest::Statistic statistic{};
};

AnnualSeries annual_series(const StationSeries& series, Variable v) {
    AnnualSeries out;
    out.statistic = ingest::default_statistic(v);
    const auto agg = ingest::aggregate(series, v, ingest::PeriodKind::Annual, out.statistic);
    for (const auto& p : agg.points) {
        out.values.push_back(p.value ? *p.value : std::numeric_limits<double>::quiet_NaN());
        out.keys.push_back(p.period_key());
    }
    return out;
}

void put_opt_date(Json& j, const std::string& key, const std::optional<Date>& d) {
    if (d) {
        j[key] = to_iso(*d);
        j[key + "_doy"] = day_of_year(*d);
    } else {
        j[key] = nullptr;
        j[key + "_doy"] = nullptr;
    }
}

Json trend_json(const AnnualSeries& annual, double alpha) {
    Json j;
    j["period"] = "annual";
    j["statistic"] = ingest::statistic_name(annual.statistic);
    try {
        const auto mk = stats::mann_kendall(annual.values);
        const auto sen = stats::sen_slope(annual.values);
        const auto ols = stats::ols_fit(annual.values);
        j["n"] = mk.n;
        j["s"] = mk.s;
        j["var_s"] = mk.var_s;
        j["z"] = mk.z;
        j["p_two_sided"] = mk.p_two_sided;
        j["tau"] = mk.tau;
        j["alpha"] = alpha;
        j["significant"] = mk.p_two_sided < alpha;
        j["low_n_warning"] = mk.n < 8;
        j["sen"] = Json{{"slope", sen.slope}, {"intercept", sen.intercept}};
        j["ols"] = Json{{"slope", ols.slope}, {"intercept", ols.intercept}};
    } catch (const DataError& e) {
        j["error"] = e.what();
    }
    return j;
}

Json breakpoint_json(const AnnualSeries& annual, double alpha) {
    Json j;
    j["period"] = "annual";
    j["statistic"] = ingest::statistic_name(annual.statistic);
    try {
        const auto br = stats::pettitt(annual.values, alpha, annual.keys);
        j["n"] = static_cast<int>(annual.values.size());
        j["k_stat"] = br.k_stat;
        j["break_index"] = br.break_index;
        j["break_date"] = br.break_date;
        j["p_approx"] = br.p_approx;
        j["alpha"] = br.alpha;
        j["significant"] = br.significant;
        j["mean_before"] = br.mean_before;
        j["mean_after"] = br.mean_after;
        j["mean_diff"] = br.mean_diff;
        j["u_series"] = br.u_series;
    } catch (const DataError& e) {
        j["error"] = e.what();
    }
    return j;
}

Json normality_json(const AnnualSeries& annual, double alpha) {
    Json j;
    j["period"] = "annual";
    j["statistic"] = ingest::statistic_name(annual.statistic);
    try {
        const auto sw = stats::shapiro_wilk(annual.values);
        j["n"] = sw.n;
        j["w"] = sw.w;
        j["p"] = sw.p;
        j["alpha"] = alpha;
        j["reject_normality"] = sw.p < alpha;
    } catch (const DataError& e) {
        j["error"] = e.what();
    }
    return j;
}

Json risk_json(const std::vector<int>& onset_doys) {
    Json j;
    try {
        const auto risk = season::onset_risk_quantiles(onset_doys);
        j["n"] = risk.n;
        j["q10"] = risk.q10;
        j["q25"] = risk.q25;
        j["q50"] = risk.q50;
        j["q75"] = risk.q75;
        j["q90"] = risk.q90;
        // Mid-June reference day for sowing-risk statements.
        j["exceedance_june15"] = risk.exceedance(day_of_year(make_date(2001, 6, 15)));
        Json doys = Json::array();
        for (double d : risk.sorted_doys) doys.push_back(static_cast<int>(d));
        j["onset_doys"] = std::move(doys);
    } catch (const DataError& e) {
        j["error"] = e.what();
    }
    return j;
}

Json season_params_json(const season::SeasonParams& p) {
    Json j;
    j["onset_search_start"] = month_day_string(p.onset_search_start);
    j["onset_accum_mm"] = p.onset_accum_mm;
    j["onset_accum_days"] = p.onset_accum_days;
    j["onset_guard_window"] = p.onset_guard_window;
    j["max_dry_run"] = p.max_dry_run;
    j["cessation_search_start"] = month_day_string(p.cessation_search_start);
    j["siva_cess_rain_mm"] = p.siva_cess_rain_mm;
    j["siva_cess_dry_days"] = p.siva_cess_dry_days;
    j["presao_capacity_mm"] = p.presao_capacity_mm;
    j["presao_daily_loss_mm"] = p.presao_daily_loss_mm;
    j["wet_day_mm"] = p.wet_day_mm;
    j["presao_spinup_from_onset"] = p.presao_spinup_from_onset;
    j["presao_loss_from_et0"] = p.presao_loss_from_et0;
    return j;
}

Json marker_json(const season::SeasonMarkers& m, const std::string& criterion) {
    const bool with_siva = criterion != "presao";
    const bool with_presao = criterion != "sivakumar";
    Json j;
    j["year"] = m.year;
    put_opt_date(j, "onset", m.onset);
    if (with_siva) {
        put_opt_date(j, "cessation_siva", m.cessation_siva);
        j["siva_end_of_data"] = m.siva_end_of_data;
        if (m.length_siva)
            j["length_siva"] = *m.length_siva;
        else
            j["length_siva"] = nullptr;
    }
    if (with_presao) {
        put_opt_date(j, "cessation_presao", m.cessation_presao);
        j["presao_end_of_data"] = m.presao_end_of_data;
        if (m.length_presao)
            j["length_presao"] = *m.length_presao;
        else
            j["length_presao"] = nullptr;
    }
    if (m.rainy_days_in_season)
        j["rainy_days_in_season"] = *m.rainy_days_in_season;
    else
        j["rainy_days_in_season"] = nullptr;
    j["rainy_days_in_year"] = m.rainy_days_in_year;
    Json fs_dates = Json::array();
    for (Date d : m.false_start_dates) fs_dates.push_back(to_iso(d));
    j["false_starts"] = std::move(fs_dates);
    return j;
}

Json correlation_json(const std::vector<std::pair<std::string, std::vector<double>>>& named) {
    Json j;
    if (named.size() < 2) {
        j["error"] = "correlation needs at least two complete variables";
        return j;
    }
    const auto m = stats::pearson_matrix(named, true);
    j["period"] = "annual";
    j["pairwise_complete"] = true;
    j["labels"] = m.labels;
    j["r"] = m.r;
    j["p"] = m.p;
    j["n_pairs"] = m.n_pairs;
    return j;
}

// --- CSV renderers -------------------------------------------------------

std::string regime_csv(const ingest::RegimeSummary& regime) {
    std::string out = "month,count,min,q1,median,q3,max,mean\n";
    for (int m = 0; m < 12; ++m) {
        const auto& s = regime.months[static_cast<size_t>(m)];
        out += std::to_string(m + 1) + "," + std::to_string(s.count) + ",";
        if (s.count > 0) {
            out += format_double(s.min) + "," + format_double(s.q1) + "," +
                   format_double(s.median) + "," + format_double(s.q3) + "," +
                   format_double(s.max) + "," + format_double(s.mean);
        } else {
            out += ",,,,,";
        }
        out += "\n";
    }
    return out;
}

std::string anomalies_csv(const AnnualSeries& annual) {
    std::string out = "period,value,anomaly\n";
    std::vector<double> anomalies;
    try {
        anomalies = stats::standardized_anomalies(annual.values);
    } catch (const DataError&) {
        return out; // header-only file keeps the output set stable
    }
    for (size_t i = 0; i < annual.values.size(); ++i)
        out += annual.keys[i] + "," + format_double(annual.values[i]) + "," +
               format_double(anomalies[i]) + "\n";
    return out;
}

std::string occurrence_csv(const ingest::Histogram& h) {
    std::string out = "bin_lo,bin_hi,count\n";
    for (size_t i = 0; i < h.counts.size(); ++i)
        out += format_double(h.bin_edges[i]) + "," + format_double(h.bin_edges[i + 1]) + "," +
               std::to_string(h.counts[i]) + "\n";
    return out;
}

std::string qq_csv(std::span<const double> values) {
    std::string out = "theoretical,observed\n";
    std::vector<stats::QqPoint> pts;
    try {
        pts = stats::qq_normal(values);
    } catch (const DataError&) {
        return out;
    }
    for (const auto& p : pts)
        out += format_double(p.theoretical) + "," + format_double(p.observed) + "\n";
    return out;
}

std::string opt_date_cell(const std::optional<Date>& d) { return d ? to_iso(*d) : ""; }
std::string opt_doy_cell(const std::optional<Date>& d) {
    return d ? std::to_string(day_of_year(*d)) : "";
}
std::string opt_int_cell(const std::optional<int>& v) { return v ? std::to_string(*v) : ""; }

std::string season_markers_csv(const std::vector<season::SeasonMarkers>& markers) {
    std::string out =
        "year,onset,onset_doy,cessation_siva,cessation_siva_doy,cessation_presao,"
        "cessation_presao_doy,length_siva,length_presao,rainy_days_in_season,"
        "rainy_days_in_year,false_starts\n";
    for (const auto& m : markers) {
        std::string fs_dates;
        for (Date d : m.false_start_dates) {
            if (!fs_dates.empty()) fs_dates += ';';
            fs_dates += to_iso(d);
        }
        out += std::to_string(m.year) + "," + opt_date_cell(m.onset) + "," +
               opt_doy_cell(m.onset) + "," + opt_date_cell(m.cessation_siva) + "," +
               opt_doy_cell(m.cessation_siva) + "," + opt_date_cell(m.cessation_presao) + "," +
               opt_doy_cell(m.cessation_presao) + "," + opt_int_cell(m.length_siva) + "," +
               opt_int_cell(m.length_presao) + "," + opt_int_cell(m.rainy_days_in_season) + "," +
               std::to_string(m.rainy_days_in_year) + "," + fs_dates + "\n";
    }
    return out;
}

struct SpellRow {
    int year;
    const char* scope;
    season::DrySpell spell;
};

std::string dry_spells_csv(const std::vector<SpellRow>& rows) {
    std::string out = "year,scope,start,start_doy,length\n";
    for (const auto& r : rows)
        out += std::to_string(r.year) + "," + r.scope + "," + to_iso(r.spell.start) + "," +
               std::to_string(day_of_year(r.spell.start)) + "," + std::to_string(r.spell.length) +
               "\n";
    return out;
}

// Equal-width bins spanning the observed daily values (integer-aligned ends,
// final edge closed by the histogram itself, so nothing overflows).
std::vector<double> default_bin_edges(const StationSeries& series, Variable v) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& r : series.records) {
        const auto& f = get_field(r, v);
        if (!f) continue;
        lo = std::min(lo, *f);
        hi = std::max(hi, *f);
    }
    if (!std::isfinite(lo)) return {0.0, 1.0};
    lo = std::floor(lo);
    hi = std::ceil(hi);
    if (hi <= lo) hi = lo + 1.0;
    constexpr int kBins = 12;
    std::vector<double> edges;
    edges.reserve(kBins + 1);
    for (int i = 0; i <= kBins; ++i) edges.push_back(lo + (hi - lo) * i / kBins);
    return edges;
}

const std::vector<double>& bin_edges_for(const RunConfig& config, Variable v,
                                         const StationSeries& series,
                                         std::vector<double>& scratch) {
    const auto it = config.bin_edges.find(variable_name(v));
    if (it != config.bin_edges.end()) return it->second;
    scratch = default_bin_edges(series, v);
    return scratch;
}

bool variable_complete(const StationSeries& series, Variable v) {
    for (const auto& r : series.records)
        if (!get_field(r, v)) return false;
    return !series.empty();
}

bool variable_observed(const StationSeries& series, Variable v) {
    for (const auto& r : series.records)
        if (get_field(r, v)) return true;
    return false;
}

const season::SeasonMarkers* marker_for_year(const std::vector<season::SeasonMarkers>& markers,
                                             int year) {
    for (const auto& m : markers)
        if (m.year == year) return &m;
    return nullptr;
}

} // namespace

void RunConfig::validate() const {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw UsageError("alpha must lie strictly between 0 and 1");
    if (criterion != "sivakumar" && criterion != "presao" && criterion != "both")
        throw UsageError("criterion must be sivakumar, presao or both");
    season_params.validate();
    site.validate();
}

void apply_config_file(RunConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw DataError("config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw UsageError("config file " + path + ": expected a JSON object");

    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "input") {
                config.input_csv = value.get<std::string>();
            } else if (key == "station") {
                config.station_json = value.get<std::string>();
            } else if (key == "out") {
                config.out_dir = value.get<std::string>();
            } else if (key == "alpha") {
                config.alpha = value.get<double>();
            } else if (key == "criterion") {
                config.criterion = value.get<std::string>();
            } else if (key == "variables") {
                config.variables = value.get<std::vector<std::string>>();
            } else if (key == "bins") {
                for (const auto& [var, edges] : value.items())
                    config.bin_edges[var] = edges.get<std::vector<double>>();
            } else if (key == "site") {
                for (const auto& [skey, sval] : value.items()) {
                    if (skey == "albedo")
                        config.site.albedo = sval.get<double>();
                    else if (skey == "angstrom_as")
                        config.site.angstrom_as = sval.get<double>();
                    else if (skey == "angstrom_bs")
                        config.site.angstrom_bs = sval.get<double>();
                    else if (skey == "wind_measured_at_m")
                        config.site.wind_measured_at_m = sval.get<double>();
                    else
                        throw UsageError("unknown site setting '" + skey + "'");
                }
            } else if (key == "season") {
                auto& p = config.season_params;
                for (const auto& [skey, sval] : value.items()) {
                    if (skey == "onset_search_start")
                        p.onset_search_start = parse_month_day(sval.get<std::string>());
                    else if (skey == "onset_accum_mm")
                        p.onset_accum_mm = sval.get<double>();
                    else if (skey == "onset_accum_days")
                        p.onset_accum_days = sval.get<int>();
                    else if (skey == "onset_guard_window")
                        p.onset_guard_window = sval.get<int>();
                    else if (skey == "max_dry_run")
                        p.max_dry_run = sval.get<int>();
                    else if (skey == "cessation_search_start")
                        p.cessation_search_start = parse_month_day(sval.get<std::string>());
                    else if (skey == "siva_cess_rain_mm")
                        p.siva_cess_rain_mm = sval.get<double>();
                    else if (skey == "siva_cess_dry_days")
                        p.siva_cess_dry_days = sval.get<int>();
                    else if (skey == "presao_capacity_mm")
                        p.presao_capacity_mm = sval.get<double>();
                    else if (skey == "presao_daily_loss_mm")
                        p.presao_daily_loss_mm = sval.get<double>();
                    else if (skey == "wet_day_mm")
                        p.wet_day_mm = sval.get<double>();
                    else if (skey == "presao_spinup_from_onset")
                        p.presao_spinup_from_onset = sval.get<bool>();
                    else if (skey == "presao_loss_from_et0")
                        p.presao_loss_from_et0 = sval.get<bool>();
                    else
                        throw UsageError("unknown season setting '" + skey + "'");
                }
            } else {
                throw UsageError("unknown config key '" + key + "'");
            }
        } catch (const Json::exception& e) {
            throw UsageError("config file " + path + ", key '" + key + "': " + e.what());
        }
    }
}

PreparedData prepare_data(const RunConfig& config) {
    config.validate();
    if (config.input_csv.empty()) throw UsageError("an input CSV is required (--input FILE)");

    PreparedData data;
    StationSeries raw = ingest::parse_daily_csv_file(config.input_csv);

    if (!config.station_json.empty()) {
        data.station = ingest::load_station_json(config.station_json);
        // Geometry comes from the station; other site settings from config.
    }

    // Trim to whole calendar years so annual statistics compare like with like.
    Date first = raw.first_date();
    if (month_of(first) != 1 || day_of(first) != 1) first = make_date(year_of(first) + 1, 1, 1);
    Date last = raw.last_date();
    if (month_of(last) != 12 || day_of(last) != 31) last = make_date(year_of(last) - 1, 12, 31);
    const int i0 = raw.index_of(first);
    const int i1 = raw.index_of(last);
    if (i0 < 0 || i1 < 0 || i0 > i1)
        throw DataError("input must cover at least one whole calendar year (Jan 1 to Dec 31)");
    StationSeries trimmed;
    trimmed.meta = raw.meta;
    trimmed.records.assign(raw.records.begin() + i0, raw.records.begin() + i1 + 1);

    if (!variable_observed(trimmed, Variable::Rain))
        throw DataError("the rain column has no observations in the trimmed range");

    data.imputation = ingest::impute_missing(trimmed);
    data.series = std::move(data.imputation.series);
    data.imputation.series = {}; // keep one copy; the report only needs the log

    if (data.station) {
        evapo::SiteParams site = config.site;
        site.latitude_deg = data.station->latitude;
        site.altitude_m = data.station->altitude;
        data.et0 = evapo::et0_series(data.series, site);
        for (size_t i = 0; i < data.series.records.size(); ++i) {
            const auto& day = data.et0->days[i];
            if (day.source == evapo::Et0Source::Computed)
                data.series.records[i].et0 = day.value;
        }
    }

    if (config.variables.empty()) {
        for (Variable v : kAllVariables)
            if (variable_complete(data.series, v)) data.variables.push_back(v);
    } else {
        std::set<Variable> seen;
        for (const auto& name : config.variables) {
            const Variable v = variable_from_name(name);
            if (!seen.insert(v).second) continue;
            if (!variable_complete(data.series, v))
                throw DataError("variable '" + name +
                                "' is not fully observed (or derivable) in this input");
        }
        for (Variable v : kAllVariables)
            if (seen.count(v)) data.variables.push_back(v);
    }
    return data;
}

ReportBundle build_report(const PreparedData& data, const RunConfig& config) {
    ReportBundle bundle;
    Json& report = bundle.report;
    const StationSeries& series = data.series;

    report["schema_version"] = kSchemaVersion;

    if (data.station) {
        report["station"] = Json{{"station_id", data.station->station_id},
                                 {"latitude", data.station->latitude},
                                 {"longitude", data.station->longitude},
                                 {"altitude", data.station->altitude}};
    } else {
        report["station"] = nullptr;
    }

    Json input;
    input["first_date"] = to_iso(series.first_date());
    input["last_date"] = to_iso(series.last_date());
    input["years"] = series.last_year() - series.first_year() + 1;
    input["records"] = static_cast<int>(series.records.size());
    Json names = Json::array();
    for (Variable v : data.variables) names.push_back(variable_name(v));
    input["variables"] = std::move(names);
    report["input"] = std::move(input);

    Json imputation;
    imputation["count"] = static_cast<int>(data.imputation.report.size());
    Json by_var = Json::object();
    for (Variable v : kAllVariables) {
        int n = 0;
        for (const auto& f : data.imputation.report)
            if (f.variable == v) ++n;
        if (n > 0) by_var[variable_name(v)] = n;
    }
    imputation["by_variable"] = std::move(by_var);
    report["imputation"] = std::move(imputation);

    if (data.et0) {
        int clamped = 0;
        for (const auto& d : data.et0->days)
            if (d.clamped) ++clamped;
        report["et0"] = Json{{"n_file", data.et0->n_file},
                             {"n_computed", data.et0->n_computed},
                             {"n_missing", data.et0->n_missing},
                             {"n_clamped", clamped}};
    } else {
        report["et0"] = nullptr;
    }

    // Per-variable annual test battery plus the plot-data CSVs.
    Json analyses = Json::object();
    std::vector<std::pair<std::string, std::vector<double>>> named_annuals;
    for (Variable v : data.variables) {
        const std::string name = variable_name(v);
        const AnnualSeries annual = annual_series(series, v);
        named_annuals.emplace_back(name, annual.values);

        Json entry;
        entry["trend"] = trend_json(annual, config.alpha);
        entry["breakpoint"] = breakpoint_json(annual, config.alpha);
        entry["normality"] = normality_json(annual, config.alpha);
        analyses[name] = std::move(entry);

        bundle.files.emplace_back("regime_" + name + ".csv",
                                  regime_csv(ingest::regime(series, v)));
        bundle.files.emplace_back("anomalies_" + name + ".csv", anomalies_csv(annual));
        std::vector<double> scratch;
        const auto& edges = bin_edges_for(config, v, series, scratch);
        bundle.files.emplace_back("occurrence_" + name + ".csv",
                                  occurrence_csv(ingest::occurrence_histogram(series, v, edges)));
        bundle.files.emplace_back("qq_" + name + ".csv", qq_csv(annual.values));
    }
    report["analyses"] = std::move(analyses);
    report["correlation"] = correlation_json(named_annuals);

    // Season detection and its derived tables.
    const evapo::Et0Series* et0_ptr =
        (data.et0 && config.season_params.presao_loss_from_et0) ? &*data.et0 : nullptr;
    const auto markers = season::season_summary(series, config.season_params, et0_ptr);

    Json season_section;
    season_section["params"] = season_params_json(config.season_params);
    Json marker_array = Json::array();
    std::vector<int> onset_doys;
    for (const auto& m : markers) {
        marker_array.push_back(marker_json(m, config.criterion));
        if (m.onset) onset_doys.push_back(day_of_year(*m.onset));
    }
    season_section["markers"] = std::move(marker_array);
    season_section["onset_risk"] = risk_json(onset_doys);
    report["season"] = std::move(season_section);
    bundle.files.emplace_back("season_markers.csv", season_markers_csv(markers));

    std::vector<SpellRow> spell_rows;
    int year_spells = 0, year_max = 0, season_spells = 0, season_max = 0;
    for (int y = series.first_year(); y <= series.last_year(); ++y) {
        const auto rain = series.year_values(Variable::Rain, y);
        const auto whole = season::dry_spells(y, rain, config.season_params,
                                              season::SpellScope::WholeYear);
        for (const auto& sp : whole.spells) {
            spell_rows.push_back({y, "year", sp});
            ++year_spells;
            year_max = std::max(year_max, sp.length);
        }
        const auto* m = marker_for_year(markers, y);
        if (m && m->onset && m->cessation_siva && *m->onset <= *m->cessation_siva) {
            const auto within =
                season::dry_spells(y, rain, config.season_params,
                                   season::SpellScope::WithinSeason, m->onset, m->cessation_siva);
            for (const auto& sp : within.spells) {
                spell_rows.push_back({y, "season", sp});
                ++season_spells;
                season_max = std::max(season_max, sp.length);
            }
        }
    }
    report["dry_spells"] =
        Json{{"whole_year", Json{{"count", year_spells}, {"max_length", year_max}}},
             {"within_season", Json{{"count", season_spells}, {"max_length", season_max}}}};
    bundle.files.emplace_back("dry_spells.csv", dry_spells_csv(spell_rows));

    Json file_names = Json::array();
    file_names.push_back("report.json");
    for (const auto& [fname, content] : bundle.files) file_names.push_back(fname);
    report["files"] = std::move(file_names);
    return bundle;
}

void write_outputs(const ReportBundle& bundle, const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw DataError("cannot create output directory " + out_dir + ": " + ec.message());

    auto write_file = [&](const std::string& name, const std::string& content) {
        const fs::path path = fs::path(out_dir) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw DataError("cannot write " + path.string());
        out << content;
        if (!out) throw DataError("failed while writing " + path.string());
    };
    write_file("report.json", bundle.report.dump(2) + "\n");
    for (const auto& [name, content] : bundle.files) write_file(name, content);
}

namespace {

// Shared head for the single-analysis commands.
Json cmd_header(const char* command, const PreparedData& data) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = command;
    j["input"] = Json{{"first_date", to_iso(data.series.first_date())},
                      {"last_date", to_iso(data.series.last_date())},
                      {"records", static_cast<int>(data.series.records.size())}};
    return j;
}

void require_analysis_variable(const PreparedData& data, Variable v) {
    if (std::find(data.variables.begin(), data.variables.end(), v) == data.variables.end())
        throw DataError("variable '" + variable_name(v) +
                        "' is not fully observed (or derivable) in this input");
}

} // namespace

Json cmd_trend(const RunConfig& config, Variable var, ingest::Statistic stat,
               ingest::PeriodKind period) {
    const PreparedData data = prepare_data(config);
    require_analysis_variable(data, var);
    const auto agg = ingest::aggregate(data.series, var, period, stat);
    const auto values = agg.values_or_nan();
    std::vector<std::string> keys;
    for (const auto& p : agg.points) keys.push_back(p.period_key());

    Json j = cmd_header("trend", data);
    j["variable"] = variable_name(var);
    j["period"] = ingest::period_kind_name(period);
    j["statistic"] = ingest::statistic_name(stat);
    const auto mk = stats::mann_kendall(values);
    const auto sen = stats::sen_slope(values);
    const auto ols = stats::ols_fit(values);
    j["n"] = mk.n;
    j["s"] = mk.s;
    j["var_s"] = mk.var_s;
    j["z"] = mk.z;
    j["p_two_sided"] = mk.p_two_sided;
    j["tau"] = mk.tau;
    j["alpha"] = config.alpha;
    j["significant"] = mk.p_two_sided < config.alpha;
    j["low_n_warning"] = mk.n < 8;
    j["sen"] = Json{{"slope", sen.slope}, {"intercept", sen.intercept}};
    j["ols"] = Json{{"slope", ols.slope}, {"intercept", ols.intercept}};
    j["periods"] = keys;
    j["values"] = values;
    return j;
}

Json cmd_breakpoint(const RunConfig& config, Variable var) {
    const PreparedData data = prepare_data(config);
    require_analysis_variable(data, var);
    const AnnualSeries annual = annual_series(data.series, var);

    Json j = cmd_header("breakpoint", data);
    j["variable"] = variable_name(var);
    j.update(breakpoint_json(annual, config.alpha));
    if (j.contains("error")) throw DataError(j["error"].get<std::string>());
    j["periods"] = annual.keys;
    j["values"] = annual.values;
    return j;
}

Json cmd_season(const RunConfig& config) {
    const PreparedData data = prepare_data(config);
    const evapo::Et0Series* et0_ptr =
        (data.et0 && config.season_params.presao_loss_from_et0) ? &*data.et0 : nullptr;
    const auto markers = season::season_summary(data.series, config.season_params, et0_ptr);

    Json j = cmd_header("season", data);
    j["criterion"] = config.criterion;
    j["params"] = season_params_json(config.season_params);
    Json marker_array = Json::array();
    std::vector<int> onset_doys;
    for (const auto& m : markers) {
        marker_array.push_back(marker_json(m, config.criterion));
        if (m.onset) onset_doys.push_back(day_of_year(*m.onset));
    }
    j["markers"] = std::move(marker_array);
    j["onset_risk"] = risk_json(onset_doys);
    return j;
}

Json cmd_dry_spells(const RunConfig& config, season::SpellScope scope) {
    const PreparedData data = prepare_data(config);
    std::vector<season::SeasonMarkers> markers;
    if (scope == season::SpellScope::WithinSeason)
        markers = season::season_summary(data.series, config.season_params, nullptr);

    Json j = cmd_header("dryspells", data);
    j["scope"] = scope == season::SpellScope::WholeYear ? "year" : "season";
    Json rows = Json::array();
    for (int y = data.series.first_year(); y <= data.series.last_year(); ++y) {
        const auto rain = data.series.year_values(Variable::Rain, y);
        if (scope == season::SpellScope::WholeYear) {
            const auto catalog =
                season::dry_spells(y, rain, config.season_params, season::SpellScope::WholeYear);
            for (const auto& sp : catalog.spells)
                rows.push_back(Json{{"year", y},
                                    {"start", to_iso(sp.start)},
                                    {"start_doy", day_of_year(sp.start)},
                                    {"length", sp.length}});
        } else {
            const auto* m = marker_for_year(markers, y);
            if (!m || !m->onset || !m->cessation_siva || !(*m->onset <= *m->cessation_siva))
                continue; // years without a defined season have no within-season spells
            const auto catalog =
                season::dry_spells(y, rain, config.season_params,
                                   season::SpellScope::WithinSeason, m->onset, m->cessation_siva);
            for (const auto& sp : catalog.spells)
                rows.push_back(Json{{"year", y},
                                    {"start", to_iso(sp.start)},
                                    {"start_doy", day_of_year(sp.start)},
                                    {"length", sp.length}});
        }
    }
    j["spells"] = std::move(rows);
    return j;
}

Json cmd_correlate(const RunConfig& config) {
    const PreparedData data = prepare_data(config);
    std::vector<std::pair<std::string, std::vector<double>>> named;
    for (Variable v : data.variables)
        named.emplace_back(variable_name(v), annual_series(data.series, v).values);

    Json j = cmd_header("correlate", data);
    const Json corr = correlation_json(named);
    if (corr.contains("error")) throw DataError(corr["error"].get<std::string>());
    j.update(corr);
    return j;
}

Json cmd_normality(const RunConfig& config, Variable var) {
    const PreparedData data = prepare_data(config);
    require_analysis_variable(data, var);
    const AnnualSeries annual = annual_series(data.series, var);

    Json j = cmd_header("normality", data);
    j["variable"] = variable_name(var);
    j.update(normality_json(annual, config.alpha));
    if (j.contains("error")) throw DataError(j["error"].get<std::string>());
    return j;
}

Json cmd_regime(const RunConfig& config, Variable var) {
    const PreparedData data = prepare_data(config);
    require_analysis_variable(data, var);
    const auto regime = ingest::regime(data.series, var);

    Json j = cmd_header("regime", data);
    j["variable"] = variable_name(var);
    j["statistic"] = ingest::statistic_name(regime.statistic);
    Json months = Json::array();
    for (int m = 0; m < 12; ++m) {
        const auto& s = regime.months[static_cast<size_t>(m)];
        Json row;
        row["month"] = m + 1;
        row["count"] = s.count;
        if (s.count > 0) {
            row["min"] = s.min;
            row["q1"] = s.q1;
            row["median"] = s.median;
            row["q3"] = s.q3;
            row["max"] = s.max;
            row["mean"] = s.mean;
        } else {
            row["min"] = nullptr;
            row["q1"] = nullptr;
            row["median"] = nullptr;
            row["q3"] = nullptr;
            row["max"] = nullptr;
            row["mean"] = nullptr;
        }
        months.push_back(std::move(row));
    }
    j["months"] = std::move(months);
    return j;
}

} // namespace agroseason::tool
