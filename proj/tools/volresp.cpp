#include "volresp/commands.hpp"
#include "volresp/errors.hpp"
#include "volresp/io.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <iostream>
#include <map>

namespace {

using namespace volresp;

// Analysis flags shared by all subcommands. Optional so that only flags actually given
// override the config file.
struct ConfigFlags {
    std::optional<std::filesystem::path> file;
    std::vector<std::size_t> T;
    std::vector<std::size_t> M;
    std::optional<int> tau_max;
    std::optional<double> z_table;
    std::optional<double> rho_threshold;
    std::optional<double> asymmetry_threshold;
    std::optional<std::size_t> stride;
    std::optional<double> max_missing_fraction;

    void attach(CLI::App& app, bool sweep) {
        app.add_option("--config", file, "JSON configuration file")->check(CLI::ExistingFile);
        auto* t = app.add_option("--T", T, "volatility window in days");
        auto* m = app.add_option("--M", M, "correlation window in days");
        if (!sweep) {
            t->expected(1);
            m->expected(1);
        }
        app.add_option("--tau-max", tau_max, "largest lag in days");
        app.add_option("--z-table", z_table, "normal quantile for the confidence interval");
        app.add_option("--rho-threshold", rho_threshold, "significance bar for the interval's lower bound");
        app.add_option("--asymmetry-threshold", asymmetry_threshold, "odd/even mass ratio treated as symmetric");
        if (sweep) {
            app.add_option("--stride", stride, "days between evaluations");
        }
    }

    void attach_missing(CLI::App& app) {
        app.add_option("--max-missing-fraction", max_missing_fraction,
                       "drop tickers missing more than this fraction of dates");
    }

    // Defaults, then config file, then flags.
    std::pair<AnalysisConfig, double> resolve() const {
        AnalysisConfig cfg;
        double missing = 0.0;
        if (file) {
            if (auto m = io::apply_config_file(*file, cfg)) {
                missing = *m;
            }
        }
        if (T.size() == 1) cfg.T = T.front();
        if (M.size() == 1) cfg.M = M.front();
        if (tau_max) cfg.tau_max = *tau_max;
        if (z_table) cfg.z_table = *z_table;
        if (rho_threshold) cfg.rho_threshold = *rho_threshold;
        if (asymmetry_threshold) cfg.asymmetry_threshold = *asymmetry_threshold;
        if (stride) cfg.stride = *stride;
        if (max_missing_fraction) missing = *max_missing_fraction;
        return {cfg, missing};
    }
};

Date date_arg(const std::string& text, const char* flag) {
    const auto d = parse_date(text);
    if (!d) {
        throw ConfigError(fmt::format("{}: expected YYYY-MM-DD, got '{}'", flag, text));
    }
    return *d;
}

std::optional<std::vector<std::string>> universe_arg(const std::optional<std::filesystem::path>& path) {
    if (!path) {
        return std::nullopt;
    }
    return io::load_universe_file(*path);
}

void report(const CommandResult& result) {
    for (const auto& n : result.notes) {
        std::cerr << "note: " << n << '\n';
    }
    for (const auto& f : result.files) {
        std::cout << f.string() << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stock versus market volatility lead-lag analysis"};
    app.set_version_flag("--version", VOLRESP_VERSION);
    app.require_subcommand(1);

    std::filesystem::path out_dir = ".";
    bool no_timestamp = false;
    auto common = [&](CLI::App& sub) {
        sub.add_option("--out", out_dir, "output directory");
        sub.add_flag("--no-timestamp", no_timestamp, "leave the manifest timestamp empty");
    };

    // snapshot
    auto* snapshot = app.add_subcommand("snapshot", "profiles and susceptibility for one date");
    ConfigFlags snap_flags;
    std::filesystem::path snap_prices;
    std::string snap_date;
    std::uint64_t shuffle_seed = 0;
    std::optional<std::filesystem::path> snap_universe;
    snapshot->add_option("--prices", snap_prices, "price file date,ticker,close")->required()->check(CLI::ExistingFile);
    snapshot->add_option("--date", snap_date, "evaluation date YYYY-MM-DD")->required();
    snapshot->add_option("--shuffle-seed", shuffle_seed, "seed for the shuffled-returns null");
    snapshot->add_option("--universe", snap_universe, "JSON ticker list")->check(CLI::ExistingFile);
    snap_flags.attach(*snapshot, false);
    snap_flags.attach_missing(*snapshot);
    common(*snapshot);

    // rolling
    auto* rolling = app.add_subcommand("rolling", "indicator history over a date range");
    ConfigFlags roll_flags;
    std::filesystem::path roll_prices;
    std::string roll_from;
    std::string roll_to;
    std::optional<std::filesystem::path> roll_universe;
    rolling->add_option("--prices", roll_prices, "price file date,ticker,close")->required()->check(CLI::ExistingFile);
    rolling->add_option("--from", roll_from, "first date YYYY-MM-DD")->required();
    rolling->add_option("--to", roll_to, "last date YYYY-MM-DD")->required();
    rolling->add_option("--universe", roll_universe, "JSON ticker list")->check(CLI::ExistingFile);
    roll_flags.attach(*rolling, true);
    roll_flags.attach_missing(*rolling);
    common(*rolling);

    // synth
    auto* synth = app.add_subcommand("synth", "synthetic datasets with known ground truth");
    ConfigFlags synth_flags;
    SynthOptions synth_opts;
    const std::map<std::string, SynthKind> kinds{
        {"ode", SynthKind::Ode}, {"leadlag", SynthKind::LeadLag}, {"shuffle-null", SynthKind::ShuffleNull}};
    const std::map<std::string, LeadDirection> directions{
        {"stocks-lead", LeadDirection::StocksLead}, {"market-leads", LeadDirection::MarketLeads}};
    std::optional<std::size_t> synth_length;
    synth->add_option("--kind", synth_opts.kind, "ode, leadlag or shuffle-null")
        ->required()
        ->transform(CLI::CheckedTransformer(kinds, CLI::ignore_case).description(""))
        ->option_text("KIND REQUIRED");
    synth->add_option("--seed", synth_opts.seed, "generator seed");
    synth->add_option("--length", synth_length, "number of observations");
    synth->add_option("--a", synth_opts.ode.a, "ode inertia");
    synth->add_option("--b", synth_opts.ode.b, "ode restoring coefficient");
    synth->add_option("--dt", synth_opts.ode.dt, "ode time step");
    synth->add_option("--n-stocks", synth_opts.leadlag.n_stocks, "stocks in the lead-lag universe");
    synth->add_option("--lag", synth_opts.leadlag.lag, "lead-lag shift in days");
    synth->add_option("--direction", synth_opts.leadlag.direction, "stocks-lead or market-leads")
        ->transform(CLI::CheckedTransformer(directions, CLI::ignore_case).description(""))
        ->option_text("DIRECTION");
    synth->add_option("--idio-ratio", synth_opts.leadlag.idio_ratio, "idiosyncratic to common variance ratio");
    synth->add_option("--persistence", synth_opts.leadlag.factor_persistence, "AR(1) coefficient of the log-vol factor");
    synth->add_option("--factor-sd", synth_opts.leadlag.factor_sd, "stationary sd of the log-vol factor");
    synth_flags.attach(*synth, false);
    common(*synth);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        CommandResult result;
        if (*snapshot) {
            auto [cfg, missing] = snap_flags.resolve();
            SnapshotOptions o;
            o.prices = snap_prices;
            o.date = date_arg(snap_date, "--date");
            o.config = cfg;
            o.shuffle_seed = shuffle_seed;
            o.universe = universe_arg(snap_universe);
            o.max_missing_fraction = missing;
            o.out_dir = out_dir;
            o.with_timestamp = !no_timestamp;
            o.config.validate();
            result = cmd_snapshot(o);
        } else if (*rolling) {
            auto [cfg, missing] = roll_flags.resolve();
            RollingOptions o;
            o.prices = roll_prices;
            o.from = date_arg(roll_from, "--from");
            o.to = date_arg(roll_to, "--to");
            o.config = cfg;
            if (roll_flags.T.size() > 1) o.T_values = roll_flags.T;
            if (roll_flags.M.size() > 1) o.M_values = roll_flags.M;
            o.universe = universe_arg(roll_universe);
            o.max_missing_fraction = missing;
            o.out_dir = out_dir;
            o.with_timestamp = !no_timestamp;
            result = cmd_rolling(o);
        } else {
            synth_opts.config = synth_flags.resolve().first;
            if (synth_length) {
                synth_opts.ode_length = *synth_length;
                synth_opts.leadlag.length = *synth_length;
            }
            synth_opts.out_dir = out_dir;
            synth_opts.with_timestamp = !no_timestamp;
            result = cmd_synth(synth_opts);
        }
        report(result);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
