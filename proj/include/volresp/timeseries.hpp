#pragma once

#include "volresp/calendar.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace volresp {

/// Daily closing prices of one ticker on a trading calendar.
/// Construction rejects non-positive or non-finite prices, naming ticker and date.
class PriceSeries {
public:
    PriceSeries(std::string ticker, CalendarPtr calendar, std::vector<double> values);

    [[nodiscard]] const std::string& ticker() const noexcept { return ticker_; }
    [[nodiscard]] const CalendarPtr& calendar() const noexcept { return calendar_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

private:
    std::string ticker_;
    CalendarPtr calendar_;
    std::vector<double> values_;
};

/// Log returns of one ticker. The calendar is the price calendar without its first date.
class ReturnSeries {
public:
    ReturnSeries(std::string ticker, CalendarPtr calendar, std::vector<double> values);

    [[nodiscard]] const std::string& ticker() const noexcept { return ticker_; }
    [[nodiscard]] const CalendarPtr& calendar() const noexcept { return calendar_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

private:
    std::string ticker_;
    CalendarPtr calendar_;
    std::vector<double> values_;
};

/// A trailing-window statistic. Defined from index `window - 1` of the
/// underlying series onward; `values[k]` belongs to index `first_valid_index + k`.
struct WindowedStat {
    std::size_t window = 0;
    std::size_t first_valid_index = 0;
    std::vector<double> values;

    [[nodiscard]] bool has(std::size_t t) const noexcept {
        return t >= first_valid_index && t - first_valid_index < values.size();
    }
    /// Throws OutOfRangeError when `t` is not covered.
    [[nodiscard]] double at(std::size_t t) const;
    /// One past the last covered index of the underlying series.
    [[nodiscard]] std::size_t end_index() const noexcept {
        return first_valid_index + values.size();
    }
};

/// Cross-correlation values over the lag grid [-tau_max, tau_max] at one anchor index.
struct LagProfile {
    std::size_t anchor = 0;
    int tau_max = 0;
    std::size_t window = 0;
    std::vector<double> values;  // values[tau + tau_max]

    [[nodiscard]] double at(int tau) const { return values.at(static_cast<std::size_t>(tau + tau_max)); }
    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
};

/// ln(S(t) / S(t-1)) for each consecutive pair of prices.
[[nodiscard]] ReturnSeries log_returns(const PriceSeries& prices);

/// Equal-weight mean of x(t - window + 1) ... x(t).
[[nodiscard]] double sma_mean(std::span<const double> x, std::size_t t, std::size_t window);

/**
 * Windowed lagged cross-covariance
 *
 *   <x(t+tau) y(t)> - <x(t+tau)> <y(t)>
 *
 * where both averages run over `window` trailing days and the x window ends at t + tau.
 * Normalized by 1/window (population form). Throws OutOfRangeError naming the series
 * whose window does not fit.
 */
[[nodiscard]] double cross_covariance(std::span<const double> x, std::span<const double> y,
                                      std::size_t t, int tau, std::size_t window);

/// Square root of the self-covariance at zero lag. Exactly 0 for a constant window.
[[nodiscard]] double volatility(std::span<const double> x, std::size_t t, std::size_t window);

/// Volatility at every index where the window fits.
[[nodiscard]] WindowedStat volatility_series(std::span<const double> x, std::size_t window);

/**
 * Normalized cross-correlation: cross_covariance divided by the volatilities of the
 * x window ending at t + tau and the y window ending at t. Result lies in [-1, 1];
 * overshoot up to 1e-12 from rounding is clamped, anything larger throws
 * ConsistencyError. A zero-variance window throws DegenerateWindowError.
 */
[[nodiscard]] double cross_correlation(std::span<const double> x, std::span<const double> y,
                                       std::size_t t, int tau, std::size_t window);

/// As cross_correlation, but returns nullopt for a zero-variance window instead of throwing.
[[nodiscard]] std::optional<double> try_cross_correlation(std::span<const double> x,
                                                          std::span<const double> y,
                                                          std::size_t t, int tau,
                                                          std::size_t window);

/// cross_correlation for every tau in [-tau_max, tau_max].
[[nodiscard]] LagProfile lag_scan(std::span<const double> x, std::span<const double> y,
                                  std::size_t t, std::size_t window, int tau_max);

/// lag_scan with per-lag nullopt for degenerate windows. Values are bit-identical to
/// individual cross_correlation calls.
[[nodiscard]] std::vector<std::optional<double>> try_lag_scan(std::span<const double> x,
                                                              std::span<const double> y,
                                                              std::size_t t, std::size_t window,
                                                              int tau_max);

/// Tolerance for clamping |rho| back to 1.
inline constexpr double kRhoClampTolerance = 1e-12;

}  // namespace volresp
