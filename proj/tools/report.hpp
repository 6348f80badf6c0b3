#ifndef AGROSEASON_TOOLS_REPORT_HPP
#define AGROSEASON_TOOLS_REPORT_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include <agroseason/daily_record.hpp>
#include <agroseason/evapo.hpp>
#include <agroseason/ingest.hpp>
#include <agroseason/season.hpp>

namespace agroseason::tool {

using Json = nlohmann::ordered_json;

// Everything a run needs, resolved from flags, config file and environment.
struct RunConfig {
    std::string input_csv;
    std::string station_json;
    std::string out_dir = "agroseason_out";
    double alpha = 0.05;
    std::vector<std::string> variables; // empty = every complete variable
    std::string criterion = "both";     // sivakumar | presao | both
    season::SeasonParams season_params;
    evapo::SiteParams site; // latitude/altitude overwritten from the station file
    std::map<std::string, std::vector<double>> bin_edges; // per-variable histogram overrides

    void validate() const; // alpha and criterion sanity
};

// Merges a JSON config file into the run configuration (flags are applied
// afterwards and win).
void apply_config_file(RunConfig& config, const std::string& path);

// Ingested, imputed, whole-calendar-year data ready for analysis.
struct PreparedData {
    StationSeries series; // trimmed to whole years; observed variables gap-free
    std::optional<StationMeta> station;
    std::vector<Variable> variables;     // analysis variables, canonical order
    ingest::ImputationResult imputation; // what was filled in (report-only copy)
    std::optional<evapo::Et0Series> et0; // present when a station file was given
};

PreparedData prepare_data(const RunConfig& config);

// A fully rendered report: the JSON document plus every CSV plot-data file.
struct ReportBundle {
    Json report;
    std::vector<std::pair<std::string, std::string>> files; // filename -> content
};

ReportBundle build_report(const PreparedData& data, const RunConfig& config);

// Writes report.json and the CSVs; creates the directory when needed. All
// content is rendered before the first byte hits the disk, so a failing
// analysis never leaves partial outputs behind.
void write_outputs(const ReportBundle& bundle, const std::string& out_dir);

// Single-analysis commands; each returns the JSON the CLI prints on stdout.
Json cmd_trend(const RunConfig& config, Variable var, ingest::Statistic stat,
               ingest::PeriodKind period);
Json cmd_breakpoint(const RunConfig& config, Variable var);
Json cmd_season(const RunConfig& config);
Json cmd_dry_spells(const RunConfig& config, season::SpellScope scope);
Json cmd_correlate(const RunConfig& config);
Json cmd_normality(const RunConfig& config, Variable var);
Json cmd_regime(const RunConfig& config, Variable var);

} // namespace agroseason::tool

#endif
