#pragma once

#include "volresp/calendar.hpp"
#include "volresp/timeseries.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace volresp {

/// Ticker carried by the equal-share portfolio series.
inline constexpr const char* kMarketTicker = "MARKET";

/// Return series of N >= 1 stocks on one shared calendar, with unique tickers.
class Universe {
public:
    explicit Universe(std::vector<ReturnSeries> members);

    [[nodiscard]] std::size_t size() const noexcept { return members_.size(); }
    [[nodiscard]] const ReturnSeries& operator[](std::size_t i) const { return members_[i]; }
    [[nodiscard]] std::span<const ReturnSeries> members() const noexcept { return members_; }
    [[nodiscard]] const TradingCalendar& calendar() const { return *members_.front().calendar(); }
    [[nodiscard]] const CalendarPtr& calendar_ptr() const { return members_.front().calendar(); }
    /// Number of return observations per member.
    [[nodiscard]] std::size_t length() const { return members_.front().size(); }

    /// Sub-universe over return indices [first, first + count), same members.
    [[nodiscard]] Universe slice(std::size_t first, std::size_t count) const;

private:
    std::vector<ReturnSeries> members_;
};

/// Builds a universe from aligned price series by taking log returns.
[[nodiscard]] Universe universe_from_prices(std::span<const PriceSeries> prices);

/// Symmetric N x N matrix of zero-lag windowed covariances at one anchor index.
struct CovarianceMatrix {
    std::size_t t = 0;
    std::size_t window = 0;
    std::size_t n = 0;
    std::vector<double> entries;  // row-major

    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return entries[i * n + j]; }
};

/// m(t) = sum of member returns, under ticker kMarketTicker.
[[nodiscard]] ReturnSeries portfolio_return(const Universe& universe);

/// C_ij = cross_covariance(s_i, s_j, t, 0, window); each unordered pair computed once.
[[nodiscard]] CovarianceMatrix covariance_matrix(const Universe& universe, std::size_t t,
                                                 std::size_t window);

/// Market risk as sqrt of the sum of all covariance-matrix entries.
/// Throws ConsistencyError if the sum is below -1e-12.
[[nodiscard]] double market_volatility(const Universe& universe, std::size_t t,
                                       std::size_t window);

/// market_volatility at every index where the window fits (bit-identical per point).
[[nodiscard]] WindowedStat market_volatility_series(const Universe& universe, std::size_t window);

// ---------------------------------------------------------------------------
// Calendar alignment of raw per-ticker histories.

struct TickerHistory {
    std::string ticker;
    std::vector<std::pair<Date, double>> closes;  // any order; dates unique
};

struct DroppedTicker {
    std::string ticker;
    std::string reason;
};

struct AlignmentReport {
    std::vector<DroppedTicker> dropped_tickers;
    std::vector<Date> dropped_dates;  // dates of the union calendar not in the result
};

struct AlignedPrices {
    std::vector<PriceSeries> series;
    AlignmentReport report;
};

/**
 * Aligns histories on a common calendar. The reference calendar is the union of all dates;
 * a ticker missing more than `max_missing_fraction` of it is dropped, and the survivors are
 * intersected. Prices are never reordered or interpolated. Throws AlignmentError when
 * nothing survives or the intersection is empty.
 */
[[nodiscard]] AlignedPrices align_histories(std::vector<TickerHistory> histories,
                                            double max_missing_fraction = 0.0);

}  // namespace volresp
