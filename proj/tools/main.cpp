#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <string>

#include <CLI11.hpp>

#include <agroseason/errors.hpp>

#include "report.hpp"

namespace {

using namespace agroseason;

// Sentinel-initialized flag values; only non-sentinel entries override
// the config file, so flags always win without clobbering defaults.
struct Flags {
    std::string input;
    std::string station;
    std::string out;
    std::string var;
    std::string criterion;
    std::string config;
    std::string agg;
    std::string period;
    std::string scope;
    double alpha = std::numeric_limits<double>::quiet_NaN();
};

void add_common_options(CLI::App* sub, Flags& f) {
    sub->add_option("--input", f.input, "daily records CSV");
    sub->add_option("--station", f.station, "station metadata JSON (enables ET0)");
    sub->add_option("--out", f.out, "output directory for the report command");
    sub->add_option("--alpha", f.alpha, "significance level in (0,1), default 0.05");
    sub->add_option("--var", f.var, "variable name (rain, tmin, tmax, tmean, rhmin, rhmax, wind, sunshine, et0)");
    sub->add_option("--criterion", f.criterion, "season criterion: sivakumar, presao or both");
    sub->add_option("--config", f.config, "JSON config file (env AGROSEASON_CONFIG is the fallback)");
}

Variable resolve_variable(const Flags& f) {
    return variable_from_name(f.var.empty() ? "rain" : f.var);
}

int run(int argc, char** argv) {
    CLI::App app{"agro-climatic analysis of daily weather-station records: trends, "
                 "change points, rainy-season onset/cessation, dry spells and ET0"};
    app.require_subcommand(1);
    Flags f;

    auto* cmd_report = app.add_subcommand(
        "report", "run every analysis and write report.json plus plot-data CSVs");
    auto* cmd_trend = app.add_subcommand("trend", "monotonic trend test with robust slopes");
    auto* cmd_breakpoint = app.add_subcommand("breakpoint", "single change-point test");
    auto* cmd_season = app.add_subcommand("season", "per-year onset/cessation markers and onset risk");
    auto* cmd_dryspells = app.add_subcommand("dryspells", "dry-spell catalog per year");
    auto* cmd_correlate = app.add_subcommand("correlate", "correlation matrix of annual aggregates");
    auto* cmd_normality = app.add_subcommand("normality", "normality test on annual aggregates");
    auto* cmd_regime = app.add_subcommand("regime", "pooled monthly distribution of a variable");
    for (CLI::App* sub : {cmd_report, cmd_trend, cmd_breakpoint, cmd_season, cmd_dryspells,
                          cmd_correlate, cmd_normality, cmd_regime})
        add_common_options(sub, f);
    cmd_trend->add_option("--agg", f.agg, "aggregate statistic: sum, mean or max");
    cmd_trend->add_option("--period", f.period, "aggregation period: annual or monthly");
    cmd_dryspells->add_option("--scope", f.scope, "spell scope: year or season");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    tool::RunConfig config;
    std::string config_path = f.config;
    if (config_path.empty())
        if (const char* env = std::getenv("AGROSEASON_CONFIG")) config_path = env;
    if (!config_path.empty()) tool::apply_config_file(config, config_path);
    if (!f.input.empty()) config.input_csv = f.input;
    if (!f.station.empty()) config.station_json = f.station;
    if (!f.out.empty()) config.out_dir = f.out;
    if (!f.criterion.empty()) config.criterion = f.criterion;
    if (!std::isnan(f.alpha)) config.alpha = f.alpha;

    tool::Json out;
    if (app.got_subcommand(cmd_report)) {
        const auto data = tool::prepare_data(config);
        const auto bundle = tool::build_report(data, config);
        tool::write_outputs(bundle, config.out_dir);
        out = tool::Json{{"out_dir", config.out_dir}, {"files", bundle.report["files"]}};
    } else if (app.got_subcommand(cmd_trend)) {
        const Variable var = resolve_variable(f);
        const auto stat =
            f.agg.empty() ? ingest::default_statistic(var) : ingest::statistic_from_name(f.agg);
        const auto period = f.period.empty() ? ingest::PeriodKind::Annual
                                             : ingest::period_kind_from_name(f.period);
        out = tool::cmd_trend(config, var, stat, period);
        if (out.value("low_n_warning", false))
            std::cerr << "warning: fewer than 8 points; the normal approximation of the "
                         "trend test is unreliable\n";
    } else if (app.got_subcommand(cmd_breakpoint)) {
        out = tool::cmd_breakpoint(config, resolve_variable(f));
    } else if (app.got_subcommand(cmd_season)) {
        out = tool::cmd_season(config);
    } else if (app.got_subcommand(cmd_dryspells)) {
        season::SpellScope scope = season::SpellScope::WholeYear;
        if (f.scope == "season")
            scope = season::SpellScope::WithinSeason;
        else if (!f.scope.empty() && f.scope != "year")
            throw UsageError("scope must be year or season, got '" + f.scope + "'");
        out = tool::cmd_dry_spells(config, scope);
    } else if (app.got_subcommand(cmd_correlate)) {
        out = tool::cmd_correlate(config);
    } else if (app.got_subcommand(cmd_normality)) {
        out = tool::cmd_normality(config, resolve_variable(f));
    } else if (app.got_subcommand(cmd_regime)) {
        out = tool::cmd_regime(config, resolve_variable(f));
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
