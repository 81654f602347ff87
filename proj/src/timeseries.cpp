#include "volresp/timeseries.hpp"

#include "volresp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include <fmt/format.h>

namespace volresp {

namespace {

void require_calendar(const std::string& ticker, const CalendarPtr& calendar, std::size_t n) {
    if (!calendar) {
        throw InputError(fmt::format("series '{}' has no calendar", ticker));
    }
    if (calendar->size() != n) {
        throw AlignmentError(fmt::format("series '{}' has {} values but its calendar has {} dates",
                                         ticker, n, calendar->size()));
    }
}

void require_window(std::size_t window) {
    if (window == 0) {
        throw ConfigError("window length must be at least 1");
    }
}

// First index of a window of length `window` ending at `end`, checked against a series of
// length `n`. `which` names the series in the error message.
std::size_t window_start(std::ptrdiff_t end, std::size_t window, std::size_t n,
                         const char* which) {
    const auto first = end - static_cast<std::ptrdiff_t>(window) + 1;
    if (first < 0 || end >= static_cast<std::ptrdiff_t>(n)) {
        throw OutOfRangeError(fmt::format(
            "{} series: window [{}, {}] does not fit in a series of length {}", which, first, end, n));
    }
    return static_cast<std::size_t>(first);
}

double window_mean(std::span<const double> w) {
    double sum = 0.0;
    for (double v : w) {
        sum += v;
    }
    return sum / static_cast<double>(w.size());
}

// A sum of squared deviations this small is rounding noise around a constant window.
bool is_degenerate(double sum_sq, std::span<const double> w) {
    double max_abs = 0.0;
    for (double v : w) {
        max_abs = std::max(max_abs, std::abs(v));
    }
    const double n = static_cast<double>(w.size());
    const double noise = 4.0 * n * std::numeric_limits<double>::epsilon() * max_abs;
    return sum_sq <= n * noise * noise;
}

// The y side of a lagged window pair. Reused across lags in lag scans.
struct CenteredWindow {
    std::vector<double> centered;
    double sum_sq = 0.0;
    bool degenerate = false;

    explicit CenteredWindow(std::span<const double> w) : centered(w.size()) {
        const double mean = window_mean(w);
        for (std::size_t k = 0; k < w.size(); ++k) {
            const double d = w[k] - mean;
            centered[k] = d;
            sum_sq += d * d;
        }
        degenerate = is_degenerate(sum_sq, w);
    }
};

struct PairMoments {
    double sum_xx = 0.0;
    double sum_xy = 0.0;
    bool x_degenerate = false;
};

PairMoments pair_moments(std::span<const double> xw, const CenteredWindow& y) {
    PairMoments m;
    const double mean = window_mean(xw);
    for (std::size_t k = 0; k < xw.size(); ++k) {
        const double d = xw[k] - mean;
        m.sum_xx += d * d;
        m.sum_xy += d * y.centered[k];
    }
    m.x_degenerate = is_degenerate(m.sum_xx, xw);
    return m;
}

std::optional<double> normalized(const PairMoments& m, const CenteredWindow& y,
                                 std::size_t window) {
    if (m.x_degenerate || y.degenerate) {
        return std::nullopt;
    }
    (void)window;
    // The 1/window factors cancel. A single sqrt of the product keeps rho[x, x] exactly 1.
    const double rho = m.sum_xy / std::sqrt(m.sum_xx * y.sum_sq);
    if (std::abs(rho) > 1.0 + kRhoClampTolerance || !std::isfinite(rho)) {
        throw ConsistencyError(fmt::format("correlation {} outside [-1, 1]", rho));
    }
    return std::clamp(rho, -1.0, 1.0);
}

struct WindowPair {
    std::span<const double> xw;
    std::span<const double> yw;
};

WindowPair lagged_windows(std::span<const double> x, std::span<const double> y, std::size_t t,
                          int tau, std::size_t window) {
    require_window(window);
    const auto anchor = static_cast<std::ptrdiff_t>(t);
    const std::size_t x0 = window_start(anchor + tau, window, x.size(), "first (x)");
    const std::size_t y0 = window_start(anchor, window, y.size(), "second (y)");
    return {x.subspan(x0, window), y.subspan(y0, window)};
}

}  // namespace

PriceSeries::PriceSeries(std::string ticker, CalendarPtr calendar, std::vector<double> values)
    : ticker_(std::move(ticker)), calendar_(std::move(calendar)), values_(std::move(values)) {
    require_calendar(ticker_, calendar_, values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] > 0.0) || !std::isfinite(values_[i])) {
            throw InputError(fmt::format("ticker '{}': non-positive price {} on {}", ticker_,
                                         values_[i], format_date((*calendar_)[i])));
        }
    }
}

ReturnSeries::ReturnSeries(std::string ticker, CalendarPtr calendar, std::vector<double> values)
    : ticker_(std::move(ticker)), calendar_(std::move(calendar)), values_(std::move(values)) {
    require_calendar(ticker_, calendar_, values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw InputError(fmt::format("ticker '{}': non-finite return on {}", ticker_,
                                         format_date((*calendar_)[i])));
        }
    }
}

double WindowedStat::at(std::size_t t) const {
    if (!has(t)) {
        throw OutOfRangeError(fmt::format("windowed statistic undefined at index {} (covers [{}, {}))",
                                          t, first_valid_index, end_index()));
    }
    return values[t - first_valid_index];
}

ReturnSeries log_returns(const PriceSeries& prices) {
    if (prices.size() < 2) {
        throw InputError(fmt::format("ticker '{}': need at least 2 prices for returns, got {}",
                                     prices.ticker(), prices.size()));
    }
    const auto p = prices.values();
    const auto& calendar = *prices.calendar();
    std::vector<double> r(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) {
        if (!(p[i] > 0.0) || !(p[i - 1] > 0.0)) {
            throw InputError(fmt::format("ticker '{}': non-positive price on {}", prices.ticker(),
                                         format_date(calendar[p[i] > 0.0 ? i - 1 : i])));
        }
        r[i - 1] = std::log(p[i] / p[i - 1]);
    }
    return ReturnSeries(prices.ticker(), std::make_shared<const TradingCalendar>(calendar.drop_front(1)),
                        std::move(r));
}

double sma_mean(std::span<const double> x, std::size_t t, std::size_t window) {
    require_window(window);
    const std::size_t first = window_start(static_cast<std::ptrdiff_t>(t), window, x.size(), "input");
    return window_mean(x.subspan(first, window));
}

double cross_covariance(std::span<const double> x, std::span<const double> y, std::size_t t,
                        int tau, std::size_t window) {
    const auto [xw, yw] = lagged_windows(x, y, t, tau, window);
    const CenteredWindow yc(yw);
    return pair_moments(xw, yc).sum_xy / static_cast<double>(window);
}

double volatility(std::span<const double> x, std::size_t t, std::size_t window) {
    require_window(window);
    const std::size_t first = window_start(static_cast<std::ptrdiff_t>(t), window, x.size(), "input");
    const CenteredWindow c(x.subspan(first, window));
    if (c.degenerate) {
        return 0.0;
    }
    return std::sqrt(c.sum_sq / static_cast<double>(window));
}

WindowedStat volatility_series(std::span<const double> x, std::size_t window) {
    require_window(window);
    WindowedStat out;
    out.window = window;
    out.first_valid_index = window - 1;
    if (x.size() >= window) {
        out.values.reserve(x.size() - window + 1);
        for (std::size_t t = window - 1; t < x.size(); ++t) {
            out.values.push_back(volatility(x, t, window));
        }
    }
    return out;
}

std::optional<double> try_cross_correlation(std::span<const double> x, std::span<const double> y,
                                            std::size_t t, int tau, std::size_t window) {
    const auto [xw, yw] = lagged_windows(x, y, t, tau, window);
    const CenteredWindow yc(yw);
    return normalized(pair_moments(xw, yc), yc, window);
}

double cross_correlation(std::span<const double> x, std::span<const double> y, std::size_t t,
                         int tau, std::size_t window) {
    const auto rho = try_cross_correlation(x, y, t, tau, window);
    if (!rho) {
        throw DegenerateWindowError(
            fmt::format("zero-variance window in cross-correlation at t={}, tau={}", t, tau));
    }
    return *rho;
}

std::vector<std::optional<double>> try_lag_scan(std::span<const double> x,
                                                std::span<const double> y, std::size_t t,
                                                std::size_t window, int tau_max) {
    if (tau_max < 0) {
        throw ConfigError("tau_max must be non-negative");
    }
    // Validate the extreme lags up front so a short series fails before any work.
    (void)lagged_windows(x, y, t, -tau_max, window);
    const auto [xw_hi, yw] = lagged_windows(x, y, t, tau_max, window);
    (void)xw_hi;
    const CenteredWindow yc(yw);

    std::vector<std::optional<double>> out;
    out.reserve(static_cast<std::size_t>(2 * tau_max + 1));
    for (int tau = -tau_max; tau <= tau_max; ++tau) {
        const auto x0 = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(t) + tau -
                                                 static_cast<std::ptrdiff_t>(window) + 1);
        out.push_back(normalized(pair_moments(x.subspan(x0, window), yc), yc, window));
    }
    return out;
}

LagProfile lag_scan(std::span<const double> x, std::span<const double> y, std::size_t t,
                    std::size_t window, int tau_max) {
    const auto raw = try_lag_scan(x, y, t, window, tau_max);
    LagProfile profile{t, tau_max, window, {}};
    profile.values.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!raw[i]) {
            throw DegenerateWindowError(fmt::format(
                "zero-variance window in lag scan at t={}, tau={}", t, static_cast<int>(i) - tau_max));
        }
        profile.values.push_back(*raw[i]);
    }
    return profile;
}

}  // namespace volresp
