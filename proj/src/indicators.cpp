#include "volresp/indicators.hpp"

#include "volresp/errors.hpp"
#include "volresp/parallel.hpp"

#include <cmath>
#include <cstdlib>

#include <fmt/format.h>

namespace volresp {

std::string_view to_string(RegimeLabel label) {
    switch (label) {
        case RegimeLabel::StockLeadsMarket: return "StockLeadsMarket";
        case RegimeLabel::MarketLeadsStock: return "MarketLeadsStock";
        case RegimeLabel::Symmetric: return "Symmetric";
        case RegimeLabel::WeaklyCorrelated: return "WeaklyCorrelated";
    }
    return "Unknown";
}

std::string_view to_string(SkipReason reason) {
    switch (reason) {
        case SkipReason::NotATradingDay: return "not_a_trading_day";
        case SkipReason::InsufficientHistory: return "insufficient_history";
        case SkipReason::InsufficientFuture: return "insufficient_future";
        case SkipReason::DegenerateWindow: return "degenerate_window";
    }
    return "unknown";
}

void AnalysisConfig::validate() const {
    if (T < 1) {
        throw ConfigError("volatility window T must be at least 1");
    }
    if (!(M > T)) {
        throw ConfigError(fmt::format("correlation window M={} must exceed volatility window T={}", M, T));
    }
    if (tau_max < 1) {
        throw ConfigError("tau_max must be at least 1");
    }
    if (stride < 1) {
        throw ConfigError("stride must be at least 1");
    }
    if (!(z_table >= 0.0) || !std::isfinite(z_table)) {
        throw ConfigError("z_table must be finite and non-negative");
    }
    if (!(std::abs(rho_threshold) < 1.0)) {
        throw ConfigError("rho_threshold must lie in (-1, 1)");
    }
    if (!(asymmetry_threshold >= 0.0)) {
        throw ConfigError("asymmetry_threshold must be non-negative");
    }
}

CiConfig AnalysisConfig::ci() const {
    return {z_table, fmt::format("z_table={}", z_table)};
}

VolatilityPanel volatility_panel(const Universe& universe, std::size_t window) {
    VolatilityPanel panel;
    panel.window = window;
    panel.stocks.resize(universe.size());
    parallel_for(universe.size(), [&](std::size_t i) {
        panel.stocks[i] = volatility_series(universe[i].values(), window);
    });
    panel.market = market_volatility_series(universe, window);
    return panel;
}

int argmax_lag(std::span<const double> profile, int tau_max) {
    if (profile.size() != static_cast<std::size_t>(2 * tau_max + 1)) {
        throw AlignmentError("profile length does not match tau_max");
    }
    int best = 0;
    double best_value = profile[static_cast<std::size_t>(tau_max)];
    for (int d = 1; d <= tau_max; ++d) {
        for (int tau : {-d, d}) {
            const double v = profile[static_cast<std::size_t>(tau + tau_max)];
            if (v > best_value) {
                best_value = v;
                best = tau;
            }
        }
    }
    return best;
}

RegimeLabel classify_regime(const AveragedLagProfile& avg, const Susceptibility& chi, bool significant,
                            double asymmetry_threshold) {
    if (chi.tau_max != avg.tau_max) {
        throw AlignmentError("susceptibility and profile have different lag ranges");
    }
    if (!significant) {
        return RegimeLabel::WeaklyCorrelated;
    }
    const auto parts = even_odd_split(avg.rho_bar);
    double odd_mass = 0.0;
    double even_mass = 0.0;
    for (std::size_t k = 0; k < parts.even.size(); ++k) {
        odd_mass += std::abs(parts.odd[k]);
        even_mass += std::abs(parts.even[k]);
    }
    if (odd_mass <= asymmetry_threshold * even_mass) {
        return RegimeLabel::Symmetric;
    }
    const int lag = argmax_lag(avg.rho_bar, avg.tau_max);
    if (lag < 0) {
        return RegimeLabel::StockLeadsMarket;
    }
    if (lag > 0) {
        return RegimeLabel::MarketLeadsStock;
    }
    double right_heavy = 0.0;
    for (int tau = 1; tau <= avg.tau_max; ++tau) {
        right_heavy += parts.odd[static_cast<std::size_t>(tau + avg.tau_max)];
    }
    if (right_heavy < 0.0) {
        return RegimeLabel::StockLeadsMarket;
    }
    if (right_heavy > 0.0) {
        return RegimeLabel::MarketLeadsStock;
    }
    return RegimeLabel::Symmetric;
}

namespace {

[[noreturn]] void skip(Date date, SkipReason reason, std::string detail) {
    throw EvaluationSkipped(SkipRecord{date, reason, std::move(detail)});
}

// Checks that return index t can anchor an evaluation on a series of `length` returns.
void require_feasible(std::size_t t, std::size_t length, Date date, const AnalysisConfig& cfg) {
    if (t < cfg.min_anchor_index()) {
        skip(date, SkipReason::InsufficientHistory,
             fmt::format("{} needs {} earlier returns, only {} available", format_date(date),
                         cfg.min_anchor_index(), t));
    }
    if (t + static_cast<std::size_t>(cfg.tau_max) >= length) {
        skip(date, SkipReason::InsufficientFuture,
             fmt::format("{} needs {} later returns for positive lags, only {} available",
                         format_date(date), cfg.tau_max, length - 1 - t));
    }
}

// Pipeline on precomputed volatilities. `t` indexes returns of the universe the panel was
// built from; `tickers` labels the panel's stocks.
DateAnalysis analyze_on_panel(const VolatilityPanel& panel, std::span<const ReturnSeries> members,
                              std::size_t t, Date date, const AnalysisConfig& cfg) {
    const std::size_t offset = panel.window - 1;
    const std::size_t t_vol = t - offset;

    DateAnalysis out;
    out.tickers.reserve(members.size());
    out.coefficients.reserve(members.size());
    const auto market = std::span<const double>(panel.market.values);
    for (std::size_t i = 0; i < members.size(); ++i) {
        out.tickers.push_back(members[i].ticker());
        out.coefficients.push_back(try_lag_scan(panel.stocks[i].values, market, t_vol, cfg.M, cfg.tau_max));
    }

    try {
        out.profile = average_lag_coefficients(t, cfg.tau_max, cfg.M, out.coefficients, cfg.ci());
    } catch (const DomainError& e) {
        skip(date, SkipReason::DegenerateWindow,
             fmt::format("{}: every stock has a zero-variance window at some lag ({})", format_date(date),
                         e.what()));
    }
    out.chi = dft_susceptibility(out.profile);
    out.peaks = extract_peaks(out.chi);

    IndicatorPoint& p = out.point;
    p.date = date;
    p.index = t;
    p.sigma_m = panel.market.at(t);
    p.rho_argmax_lag = argmax_lag(out.profile.rho_bar, cfg.tau_max);
    const auto k = static_cast<std::size_t>(p.rho_argmax_lag + cfg.tau_max);
    p.rho_max = out.profile.rho_bar[k];
    p.rho_max_ci = out.profile.ci[k];
    p.rho_max_n = out.profile.counts[k];
    p.re_peak = out.peaks.re_peak;
    p.im_peak = out.peaks.im_peak;
    p.im_peak_omega = out.peaks.im_peak_omega;
    p.significant = p.rho_max_ci.has_value() && p.rho_max_ci->low > cfg.rho_threshold;
    p.regime = classify_regime(out.profile, out.chi, p.significant, cfg.asymmetry_threshold);
    return out;
}

}  // namespace

DateAnalysis analyze_date(const Universe& universe, Date date, const AnalysisConfig& cfg) {
    cfg.validate();
    const auto index = universe.calendar().index_of(date);
    if (!index) {
        skip(date, SkipReason::NotATradingDay, fmt::format("{} is not in the trading calendar", format_date(date)));
    }
    const std::size_t t = *index;
    require_feasible(t, universe.length(), date, cfg);

    // Only the returns this date reads; volatilities are pointwise, so the values match a
    // panel built over the whole history.
    const std::size_t first = t - cfg.min_anchor_index();
    const std::size_t count = t + static_cast<std::size_t>(cfg.tau_max) - first + 1;
    const Universe local = universe.slice(first, count);
    const VolatilityPanel panel = volatility_panel(local, cfg.T);
    auto out = analyze_on_panel(panel, local.members(), t - first, date, cfg);
    out.point.index = t;
    out.profile.anchor = t;
    return out;
}

Evaluation evaluate_date(const Universe& universe, Date date, const AnalysisConfig& cfg) {
    try {
        return analyze_date(universe, date, cfg).point;
    } catch (const EvaluationSkipped& e) {
        return e.record();
    }
}

std::vector<Evaluation> rolling_history(const Universe& universe, const AnalysisConfig& cfg, Date from,
                                        Date to) {
    cfg.validate();
    const auto& calendar = universe.calendar();
    if (to < from) {
        throw EmptyResultError(fmt::format("empty date range {} .. {}", format_date(from), format_date(to)));
    }
    const std::size_t lo = calendar.lower_bound(from);
    std::size_t hi = calendar.lower_bound(to);
    if (hi == calendar.size() || calendar[hi] != to) {
        if (hi == 0) {
            throw EmptyResultError("date range lies before the trading calendar");
        }
        --hi;
    }
    if (lo >= calendar.size() || lo > hi) {
        throw EmptyResultError(fmt::format("no trading days in {} .. {}", format_date(from), format_date(to)));
    }

    std::vector<std::size_t> anchors;
    bool any_feasible = false;
    for (std::size_t t = lo; t <= hi; t += cfg.stride) {
        anchors.push_back(t);
        if (t >= cfg.min_anchor_index() && t + static_cast<std::size_t>(cfg.tau_max) < universe.length()) {
            any_feasible = true;
        }
    }
    if (!any_feasible) {
        throw EmptyResultError(fmt::format(
            "no date in {} .. {} has {} earlier and {} later returns", format_date(from), format_date(to),
            cfg.min_anchor_index(), cfg.tau_max));
    }

    const VolatilityPanel panel = volatility_panel(universe, cfg.T);
    std::vector<std::optional<Evaluation>> slots(anchors.size());
    parallel_for(anchors.size(), [&](std::size_t k) {
        const std::size_t t = anchors[k];
        const Date date = calendar[t];
        try {
            require_feasible(t, universe.length(), date, cfg);
            slots[k] = analyze_on_panel(panel, universe.members(), t, date, cfg).point;
        } catch (const EvaluationSkipped& e) {
            slots[k] = e.record();
        }
    });

    std::vector<Evaluation> out;
    out.reserve(slots.size());
    for (auto& s : slots) {
        out.push_back(std::move(*s));
    }
    return out;
}

}  // namespace volresp
