#include "volresp/commands.hpp"

#include "volresp/errors.hpp"
#include "volresp/fisher.hpp"
#include "volresp/io.hpp"
#include "volresp/market.hpp"
#include "volresp/susceptibility.hpp"

#include <fmt/format.h>
#include <json.hpp>

namespace volresp {

namespace {

using io::format_number;
using io::Table;

std::string opt_number(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string{};
}

Table profile_table(const AveragedLagProfile& p) {
    Table t{{"tau", "rho_bar", "ci_low", "ci_high", "n"}, {}};
    for (std::size_t k = 0; k < p.size(); ++k) {
        const auto& ci = p.ci[k];
        t.rows.push_back({std::to_string(static_cast<int>(k) - p.tau_max), format_number(p.rho_bar[k]),
                          ci ? format_number(ci->low) : "", ci ? format_number(ci->high) : "",
                          std::to_string(p.counts[k])});
    }
    return t;
}

Table susceptibility_table(const Susceptibility& chi) {
    Table t{{"omega", "re", "im"}, {}};
    for (int w = -chi.tau_max; w <= chi.tau_max; ++w) {
        t.rows.push_back({std::to_string(w), format_number(chi.re_at(w)), format_number(chi.im_at(w))});
    }
    return t;
}

Table coefficient_table(const DateAnalysis& a, int tau_max) {
    Table t{{"ticker", "tau", "rho", "z"}, {}};
    for (std::size_t i = 0; i < a.tickers.size(); ++i) {
        for (std::size_t k = 0; k < a.coefficients[i].size(); ++k) {
            const auto& rho = a.coefficients[i][k];
            if (!rho) {
                continue;
            }
            t.rows.push_back({a.tickers[i], std::to_string(static_cast<int>(k) - tau_max), format_number(*rho),
                              format_number(fisher_z(clip_correlation(*rho)))});
        }
    }
    return t;
}

const std::vector<std::string> kIndicatorColumns{
    "date",   "status",  "skip_reason", "sigma_m",       "rho_max",     "rho_argmax_lag", "ci_low",
    "ci_high", "n",      "re_peak",     "im_peak",       "im_peak_omega", "significant",  "regime"};

std::vector<std::string> indicator_row(const Evaluation& e) {
    if (const auto* skip = std::get_if<SkipRecord>(&e)) {
        std::vector<std::string> row(kIndicatorColumns.size());
        row[0] = format_date(skip->date);
        row[1] = "skipped";
        row[2] = std::string(to_string(skip->reason));
        return row;
    }
    const auto& p = std::get<IndicatorPoint>(e);
    return {format_date(p.date),
            "ok",
            "",
            format_number(p.sigma_m),
            format_number(p.rho_max),
            std::to_string(p.rho_argmax_lag),
            p.rho_max_ci ? format_number(p.rho_max_ci->low) : "",
            p.rho_max_ci ? format_number(p.rho_max_ci->high) : "",
            std::to_string(p.rho_max_n),
            format_number(p.re_peak),
            format_number(p.im_peak),
            std::to_string(p.im_peak_omega),
            p.significant ? "1" : "0",
            std::string(to_string(p.regime))};
}

class OutputSet {
public:
    OutputSet(std::filesystem::path dir, std::string command) : dir_(std::move(dir)), command_(std::move(command)) {}

    void write(const std::string& quantity, const std::string& tag, const Table& table) {
        const auto path = dir_ / fmt::format("{}_{}_{}.csv", command_, quantity, tag);
        io::write_atomic(path, table.to_csv());
        result_.files.push_back(path);
    }

    void note(std::string text) { result_.notes.push_back(std::move(text)); }

    CommandResult finish(io::RunManifest manifest, const std::string& tag, bool with_timestamp) {
        manifest.command = command_;
        for (const auto& f : result_.files) {
            manifest.outputs.push_back(f.filename().string());
        }
        manifest.timestamp = with_timestamp ? io::utc_timestamp() : "";
        const auto path = dir_ / fmt::format("{}_manifest_{}.json", command_, tag);
        io::write_atomic(path, manifest.to_json());
        result_.files.push_back(path);
        return std::move(result_);
    }

private:
    std::filesystem::path dir_;
    std::string command_;
    CommandResult result_;
};

struct LoadedUniverse {
    Universe universe;
    std::vector<std::string> notes;
};

LoadedUniverse load_universe(const std::filesystem::path& prices,
                             const std::optional<std::vector<std::string>>& filter, double max_missing) {
    auto ingest = io::ingest_prices(prices, filter, max_missing);
    std::vector<std::string> notes;
    for (const auto& t : ingest.missing_tickers) {
        notes.push_back(fmt::format("ticker {} not found in price file", t));
    }
    for (const auto& d : ingest.report.dropped_tickers) {
        notes.push_back(fmt::format("dropped ticker {}: {}", d.ticker, d.reason));
    }
    if (!ingest.report.dropped_dates.empty()) {
        notes.push_back(fmt::format("dropped {} dates not shared by all tickers", ingest.report.dropped_dates.size()));
    }
    return {universe_from_prices(ingest.series), std::move(notes)};
}

std::vector<std::string> tickers_of(const Universe& u) {
    std::vector<std::string> out;
    for (const auto& m : u.members()) {
        out.push_back(m.ticker());
    }
    return out;
}

}  // namespace

LagProfile full_sample_profile(std::span<const double> x, std::span<const double> y, int tau_max) {
    const auto n = std::min(x.size(), y.size());
    if (tau_max < 0 || n <= static_cast<std::size_t>(2 * tau_max)) {
        throw ConfigError(fmt::format("series of length {} too short for tau_max {}", n, tau_max));
    }
    const std::size_t window = n - static_cast<std::size_t>(2 * tau_max);
    return lag_scan(x.first(n), y.first(n), n - 1 - static_cast<std::size_t>(tau_max), window, tau_max);
}

CommandResult cmd_snapshot(const SnapshotOptions& options) {
    options.config.validate();
    auto [universe, notes] = load_universe(options.prices, options.universe, options.max_missing_fraction);
    const std::string tag = format_date(options.date);
    OutputSet out(options.out_dir, "snapshot");
    for (auto& n : notes) {
        out.note(std::move(n));
    }

    const auto data = analyze_date(universe, options.date, options.config);
    out.write("profile", tag, profile_table(data.profile));
    out.write("susceptibility", tag, susceptibility_table(data.chi));
    out.write("coefficients", tag, coefficient_table(data, options.config.tau_max));

    Table indicators{{"series"}, {}};
    indicators.header.insert(indicators.header.end(), kIndicatorColumns.begin(), kIndicatorColumns.end());
    auto add_indicator = [&](const std::string& series, const Evaluation& e) {
        auto row = indicator_row(e);
        row.insert(row.begin(), series);
        indicators.rows.push_back(std::move(row));
    };
    add_indicator("data", data.point);

    const Universe shuffled = shuffle_returns(universe, options.shuffle_seed);
    try {
        const auto null = analyze_date(shuffled, options.date, options.config);
        out.write("null-profile", tag, profile_table(null.profile));
        out.write("null-susceptibility", tag, susceptibility_table(null.chi));
        out.write("null-coefficients", tag, coefficient_table(null, options.config.tau_max));
        add_indicator("null", null.point);
    } catch (const EvaluationSkipped& e) {
        out.note(fmt::format("shuffled null not evaluable: {}", e.what()));
        add_indicator("null", e.record());
    }
    out.write("indicators", tag, indicators);

    io::RunManifest manifest;
    manifest.config = options.config;
    manifest.universe = tickers_of(universe);
    manifest.seed = options.shuffle_seed;
    manifest.inputs.push_back({options.prices.string(), io::sha256_file(options.prices)});
    manifest.extra_json = nlohmann::json{{"date", tag}, {"max_missing_fraction", options.max_missing_fraction}}.dump();
    return out.finish(std::move(manifest), tag, options.with_timestamp);
}

CommandResult cmd_rolling(const RollingOptions& options) {
    auto [universe, notes] = load_universe(options.prices, options.universe, options.max_missing_fraction);
    const std::string tag = format_date(options.from) + "_" + format_date(options.to);
    OutputSet out(options.out_dir, "rolling");
    for (auto& n : notes) {
        out.note(std::move(n));
    }
    const auto Ts = options.T_values.empty() ? std::vector<std::size_t>{options.config.T} : options.T_values;
    const auto Ms = options.M_values.empty() ? std::vector<std::size_t>{options.config.M} : options.M_values;

    // Market volatility per T over the requested range.
    const auto& calendar = universe.calendar();
    const std::size_t lo = calendar.lower_bound(options.from);
    const std::size_t hi = calendar.lower_bound(options.to);
    Table sigma{{"date"}, {}};
    std::vector<WindowedStat> sigma_series;
    for (const auto T : Ts) {
        if (T < 1) {
            throw ConfigError("T must be at least 1");
        }
        sigma.header.push_back(fmt::format("sigma_m_T{}", T));
        sigma_series.push_back(market_volatility_series(universe, T));
    }
    for (std::size_t t = lo; t < calendar.size() && (t < hi || (t == hi && calendar[t] == options.to)); ++t) {
        std::vector<std::string> row{format_date(calendar[t])};
        for (const auto& s : sigma_series) {
            row.push_back(s.has(t) ? format_number(s.at(t)) : "");
        }
        sigma.rows.push_back(std::move(row));
    }
    if (sigma.rows.empty()) {
        throw EmptyResultError(fmt::format("no trading days in {} .. {}", format_date(options.from),
                                           format_date(options.to)));
    }
    out.write("sigma-m", tag, sigma);

    std::size_t evaluated = 0;
    nlohmann::json combos = nlohmann::json::array();
    for (const auto T : Ts) {
        for (const auto M : Ms) {
            AnalysisConfig cfg = options.config;
            cfg.T = T;
            cfg.M = M;
            if (!(M > T)) {
                out.note(fmt::format("skipping T={} M={}: M must exceed T", T, M));
                continue;
            }
            cfg.validate();
            std::vector<Evaluation> history;
            try {
                history = rolling_history(universe, cfg, options.from, options.to);
            } catch (const EmptyResultError& e) {
                out.note(fmt::format("T={} M={}: {}", T, M, e.what()));
                continue;
            }
            Table table{kIndicatorColumns, {}};
            for (const auto& e : history) {
                table.rows.push_back(indicator_row(e));
            }
            out.write(fmt::format("indicators-T{}-M{}", T, M), tag, table);
            combos.push_back({{"T", T}, {"M", M}});
            ++evaluated;
        }
    }
    if (evaluated == 0) {
        throw EmptyResultError("no (T, M) combination has an evaluable date in the requested range");
    }

    io::RunManifest manifest;
    manifest.config = options.config;
    manifest.universe = tickers_of(universe);
    manifest.inputs.push_back({options.prices.string(), io::sha256_file(options.prices)});
    manifest.extra_json = nlohmann::json{{"from", format_date(options.from)},
                                         {"to", format_date(options.to)},
                                         {"combinations", combos},
                                         {"max_missing_fraction", options.max_missing_fraction}}
                              .dump();
    return out.finish(std::move(manifest), tag, options.with_timestamp);
}

namespace {

std::string_view direction_name(LeadDirection d) {
    return d == LeadDirection::StocksLead ? "stocks-lead" : "market-leads";
}

CommandResult synth_ode(const SynthOptions& o) {
    const std::string tag = fmt::format("ode-seed{}", o.seed);
    OutputSet out(o.out_dir, "synth");
    const auto pair = ode_pair(o.ode, o.ode_length, o.seed);
    const int tau_max = o.config.tau_max;
    const auto xy = full_sample_profile(pair.x, pair.y, tau_max);
    const auto yx = full_sample_profile(pair.y, pair.x, tau_max);
    const auto chi_xy = dft_susceptibility(xy);
    const auto chi_yx = dft_susceptibility(yx);
    const auto peaks_xy = extract_peaks(chi_xy);
    const auto peaks_yx = extract_peaks(chi_yx);

    Table series{{"t", "x", "y"}, {}};
    for (std::size_t t = 0; t < pair.x.size(); ++t) {
        series.rows.push_back({std::to_string(t), format_number(pair.x[t]), format_number(pair.y[t])});
    }
    out.write("series", tag, series);

    Table profile{{"tau", "rho_xy", "rho_yx"}, {}};
    for (int tau = -tau_max; tau <= tau_max; ++tau) {
        profile.rows.push_back({std::to_string(tau), format_number(xy.at(tau)), format_number(yx.at(tau))});
    }
    out.write("profile", tag, profile);

    Table chi{{"omega", "re_xy", "im_xy", "re_yx", "im_yx"}, {}};
    for (int w = -tau_max; w <= tau_max; ++w) {
        chi.rows.push_back({std::to_string(w), format_number(chi_xy.re_at(w)), format_number(chi_xy.im_at(w)),
                            format_number(chi_yx.re_at(w)), format_number(chi_yx.im_at(w))});
    }
    out.write("susceptibility", tag, chi);

    Table summary{{"key", "value"},
                  {{"truth_driver", "y"},
                   {"truth_response", "x"},
                   {"truth_im_peak_sign_xy", "negative"},
                   {"truth_im_peak_sign_yx", "positive"},
                   {"re_peak_xy", format_number(peaks_xy.re_peak)},
                   {"im_peak_xy", format_number(peaks_xy.im_peak)},
                   {"im_peak_omega_xy", std::to_string(peaks_xy.im_peak_omega)},
                   {"re_peak_yx", format_number(peaks_yx.re_peak)},
                   {"im_peak_yx", format_number(peaks_yx.im_peak)},
                   {"im_peak_omega_yx", std::to_string(peaks_yx.im_peak_omega)}}};
    out.write("summary", tag, summary);

    io::RunManifest manifest;
    manifest.config = o.config;
    manifest.seed = o.seed;
    manifest.extra_json = nlohmann::json{{"kind", "ode"},
                                         {"a", o.ode.a},
                                         {"b", o.ode.b},
                                         {"dt", o.ode.dt},
                                         {"length", o.ode_length}}
                              .dump();
    return out.finish(std::move(manifest), tag, o.with_timestamp);
}

CommandResult synth_universe(const SynthOptions& o) {
    const bool null = o.kind == SynthKind::ShuffleNull;
    const std::string tag = fmt::format("{}-seed{}", null ? "shuffle-null" : "leadlag", o.seed);
    OutputSet out(o.out_dir, "synth");

    LeadLagParams params = o.leadlag;
    params.seed = o.seed;
    Universe universe = leadlag_universe(params);
    if (null) {
        universe = shuffle_returns(universe, o.seed);
    }
    const std::size_t t = universe.length() - 1 - static_cast<std::size_t>(o.config.tau_max);
    const Date date = universe.calendar()[t];
    const auto analysis = analyze_date(universe, date, o.config);

    out.write("profile", tag, profile_table(analysis.profile));
    out.write("susceptibility", tag, susceptibility_table(analysis.chi));

    std::string expected_regime;
    std::string expected_lag;
    if (null) {
        expected_regime = std::string(to_string(RegimeLabel::WeaklyCorrelated));
    } else if (params.lag == 0) {
        expected_regime = std::string(to_string(RegimeLabel::Symmetric));
        expected_lag = "0";
    } else if (params.direction == LeadDirection::StocksLead) {
        expected_regime = std::string(to_string(RegimeLabel::StockLeadsMarket));
        expected_lag = std::to_string(-params.lag);
    } else {
        expected_regime = std::string(to_string(RegimeLabel::MarketLeadsStock));
        expected_lag = std::to_string(params.lag);
    }
    const auto& p = analysis.point;
    Table summary{{"key", "value"},
                  {{"truth_direction", null ? "none" : std::string(direction_name(params.direction))},
                   {"truth_lag", null ? "" : std::to_string(params.lag)},
                   {"truth_regime", expected_regime},
                   {"truth_argmax_lag", expected_lag},
                   {"date", format_date(date)},
                   {"rho_max", format_number(p.rho_max)},
                   {"rho_argmax_lag", std::to_string(p.rho_argmax_lag)},
                   {"ci_low", opt_number(p.rho_max_ci ? std::optional(p.rho_max_ci->low) : std::nullopt)},
                   {"ci_high", opt_number(p.rho_max_ci ? std::optional(p.rho_max_ci->high) : std::nullopt)},
                   {"significant", p.significant ? "1" : "0"},
                   {"regime", std::string(to_string(p.regime))},
                   {"re_peak", format_number(p.re_peak)},
                   {"im_peak", format_number(p.im_peak)},
                   {"im_peak_omega", std::to_string(p.im_peak_omega)}}};
    out.write("summary", tag, summary);

    io::RunManifest manifest;
    manifest.config = o.config;
    manifest.universe = tickers_of(universe);
    manifest.seed = o.seed;
    manifest.extra_json = nlohmann::json{{"kind", null ? "shuffle-null" : "leadlag"},
                                         {"n_stocks", params.n_stocks},
                                         {"length", params.length},
                                         {"direction", direction_name(params.direction)},
                                         {"lag", params.lag}}
                              .dump();
    return out.finish(std::move(manifest), tag, o.with_timestamp);
}

}  // namespace

CommandResult cmd_synth(const SynthOptions& options) {
    options.config.validate();
    if (options.kind == SynthKind::Ode) {
        return synth_ode(options);
    }
    return synth_universe(options);
}

}  // namespace volresp
