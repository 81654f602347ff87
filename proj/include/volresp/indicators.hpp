#pragma once

#include "volresp/calendar.hpp"
#include "volresp/fisher.hpp"
#include "volresp/market.hpp"
#include "volresp/susceptibility.hpp"
#include "volresp/timeseries.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace volresp {

enum class RegimeLabel { StockLeadsMarket, MarketLeadsStock, Symmetric, WeaklyCorrelated };

[[nodiscard]] std::string_view to_string(RegimeLabel label);

struct AnalysisConfig {
    std::size_t T = 30;               // volatility window, days
    std::size_t M = 250;              // correlation window, days
    int tau_max = 30;                 // lag range, days
    double z_table = 1.96;
    double rho_threshold = 0.5;       // significance bar for the CI lower bound
    std::size_t stride = 1;           // days between rolling evaluations
    double asymmetry_threshold = 0.05;  // odd/even mass ratio below which a profile is symmetric

    /// Throws ConfigError unless M > T >= 1, tau_max >= 1, stride >= 1 and thresholds are sane.
    void validate() const;
    [[nodiscard]] CiConfig ci() const;
    /// Smallest anchor return index whose earliest needed return, anchor - (M-1) - (T-1) - tau_max,
    /// exists.
    [[nodiscard]] std::size_t min_anchor_index() const { return (M - 1) + (T - 1) + static_cast<std::size_t>(tau_max); }
};

struct IndicatorPoint {
    Date date;
    std::size_t index = 0;           // return index of the anchor
    double sigma_m = 0.0;            // market volatility at the anchor (window T)
    double rho_max = 0.0;            // signed maximum of the averaged profile
    int rho_argmax_lag = 0;
    std::optional<Interval> rho_max_ci;
    std::size_t rho_max_n = 0;       // contributing stocks at the argmax lag
    double re_peak = 0.0;
    double im_peak = 0.0;
    int im_peak_omega = 0;
    bool significant = false;
    RegimeLabel regime = RegimeLabel::WeaklyCorrelated;
};

enum class SkipReason { NotATradingDay, InsufficientHistory, InsufficientFuture, DegenerateWindow };

[[nodiscard]] std::string_view to_string(SkipReason reason);

struct SkipRecord {
    Date date;
    SkipReason reason = SkipReason::InsufficientHistory;
    std::string detail;
};

using Evaluation = std::variant<IndicatorPoint, SkipRecord>;

/// Thrown by analyze_date when a date cannot be evaluated; carries the skip record.
class EvaluationSkipped : public std::runtime_error {
public:
    explicit EvaluationSkipped(SkipRecord record)
        : std::runtime_error(record.detail), record_(std::move(record)) {}
    [[nodiscard]] const SkipRecord& record() const noexcept { return record_; }

private:
    SkipRecord record_;
};

/// Volatility series (window T) of every stock and of the market.
struct VolatilityPanel {
    std::size_t window = 0;
    std::vector<WindowedStat> stocks;
    WindowedStat market;
};

[[nodiscard]] VolatilityPanel volatility_panel(const Universe& universe, std::size_t window);

/// Everything computed for one anchor date.
struct DateAnalysis {
    IndicatorPoint point;
    std::vector<std::string> tickers;
    std::vector<std::vector<std::optional<double>>> coefficients;  // [stock][tau + tau_max]
    AveragedLagProfile profile;
    Susceptibility chi;
    PeakSummary peaks;
};

/**
 * Runs the full single-date pipeline: stock and market volatilities, per-stock profiles of
 * rho[sigma_i, sigma_m], the Fisher-averaged profile, its susceptibility and peaks, the
 * maximum with its interval, significance and regime. Throws EvaluationSkipped when the
 * date is not evaluable.
 */
[[nodiscard]] DateAnalysis analyze_date(const Universe& universe, Date date, const AnalysisConfig& cfg);

/// analyze_date reduced to its indicator point, with skips as records.
[[nodiscard]] Evaluation evaluate_date(const Universe& universe, Date date, const AnalysisConfig& cfg);

/**
 * Lead-lag label for an averaged profile rho[sigma_i, sigma_m](tau).
 *
 * Not significant -> WeaklyCorrelated. Odd-part mass at most `asymmetry_threshold` times the
 * even-part mass -> Symmetric. Otherwise the sign of the argmax lag decides: negative means
 * stock volatility earlier matches market volatility now (StockLeadsMarket), positive the
 * reverse. An argmax at zero falls back to the sign of the odd part on positive lags.
 */
[[nodiscard]] RegimeLabel classify_regime(const AveragedLagProfile& avg, const Susceptibility& chi,
                                          bool significant, double asymmetry_threshold = 0.05);

/// Index of the largest value; ties go to the smallest |tau|, then to the negative side.
[[nodiscard]] int argmax_lag(std::span<const double> profile, int tau_max);

/// One evaluation per stride step over the trading days in [from, to], in date order.
/// Throws EmptyResultError when no date in the range has enough history and future.
[[nodiscard]] std::vector<Evaluation> rolling_history(const Universe& universe, const AnalysisConfig& cfg,
                                                      Date from, Date to);

}  // namespace volresp
