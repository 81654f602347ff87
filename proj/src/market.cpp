#include "volresp/market.hpp"

#include "volresp/errors.hpp"
#include "volresp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_set>

#include <fmt/format.h>

namespace volresp {

namespace {

constexpr double kNegativeVarianceTolerance = 1e-12;

// Centered trailing windows of every member at index t, in the same arithmetic as
// cross_covariance so the matrix entries are bit-identical to pairwise calls.
struct CenteredPanel {
    std::size_t window;
    std::vector<double> centered;  // member-major, window values each
    bool all_constant = true;
};

CenteredPanel center_members(const Universe& universe, std::size_t t, std::size_t window) {
    if (window == 0) {
        throw ConfigError("window length must be at least 1");
    }
    if (t + 1 < window || t >= universe.length()) {
        throw OutOfRangeError(fmt::format("covariance window of {} days ending at index {} does not "
                                          "fit in {} returns",
                                          window, t, universe.length()));
    }
    CenteredPanel panel{window, std::vector<double>(universe.size() * window), true};
    const std::size_t first = t + 1 - window;
    for (std::size_t i = 0; i < universe.size(); ++i) {
        const auto w = universe[i].values().subspan(first, window);
        double sum = 0.0;
        double max_abs = 0.0;
        for (double v : w) {
            sum += v;
            max_abs = std::max(max_abs, std::abs(v));
        }
        const double mean = sum / static_cast<double>(window);
        double* out = panel.centered.data() + i * window;
        double sum_sq = 0.0;
        for (std::size_t k = 0; k < window; ++k) {
            out[k] = w[k] - mean;
            sum_sq += out[k] * out[k];
        }
        const double n = static_cast<double>(window);
        const double noise = 4.0 * n * std::numeric_limits<double>::epsilon() * max_abs;
        if (sum_sq > n * noise * noise) {
            panel.all_constant = false;
        }
    }
    return panel;
}

CovarianceMatrix assemble(const CenteredPanel& panel, std::size_t n, std::size_t t) {
    const std::size_t w = panel.window;
    CovarianceMatrix c{t, w, n, std::vector<double>(n * n)};
    for (std::size_t i = 0; i < n; ++i) {
        const double* ci = panel.centered.data() + i * w;
        for (std::size_t j = i; j < n; ++j) {
            const double* cj = panel.centered.data() + j * w;
            double s = 0.0;
            for (std::size_t k = 0; k < w; ++k) {
                s += ci[k] * cj[k];
            }
            const double v = s / static_cast<double>(w);
            c.entries[i * n + j] = v;
            c.entries[j * n + i] = v;
        }
    }
    return c;
}

double volatility_from(const CenteredPanel& panel, const CovarianceMatrix& c) {
    if (panel.all_constant) {
        return 0.0;
    }
    double total = 0.0;
    for (double v : c.entries) {
        total += v;
    }
    if (total < -kNegativeVarianceTolerance) {
        throw ConsistencyError(
            fmt::format("sum of covariance matrix entries is negative ({}) at index {}", total, c.t));
    }
    return std::sqrt(std::max(total, 0.0));
}

}  // namespace

Universe::Universe(std::vector<ReturnSeries> members) : members_(std::move(members)) {
    if (members_.empty()) {
        throw InputError("universe must contain at least one series");
    }
    std::unordered_set<std::string> seen;
    const auto& reference = members_.front();
    for (const auto& m : members_) {
        if (!seen.insert(m.ticker()).second) {
            throw InputError(fmt::format("duplicate ticker '{}' in universe", m.ticker()));
        }
        if (m.calendar() != reference.calendar() && *m.calendar() != *reference.calendar()) {
            throw AlignmentError(fmt::format("calendar of '{}' differs from calendar of '{}'",
                                             m.ticker(), reference.ticker()));
        }
    }
}

Universe Universe::slice(std::size_t first, std::size_t count) const {
    auto cal = std::make_shared<const TradingCalendar>(calendar().slice(first, count));
    std::vector<ReturnSeries> out;
    out.reserve(members_.size());
    for (const auto& m : members_) {
        const auto v = m.values().subspan(first, count);
        out.emplace_back(m.ticker(), cal, std::vector<double>(v.begin(), v.end()));
    }
    return Universe(std::move(out));
}

Universe universe_from_prices(std::span<const PriceSeries> prices) {
    std::vector<ReturnSeries> returns;
    returns.reserve(prices.size());
    CalendarPtr shared;
    for (const auto& p : prices) {
        auto r = log_returns(p);
        if (!shared) {
            shared = r.calendar();
        }
        if (*r.calendar() != *shared) {
            throw AlignmentError(fmt::format("price calendar of '{}' differs from '{}'", p.ticker(),
                                             prices.front().ticker()));
        }
        const auto v = r.values();
        returns.emplace_back(r.ticker(), shared, std::vector<double>(v.begin(), v.end()));
    }
    return Universe(std::move(returns));
}

ReturnSeries portfolio_return(const Universe& universe) {
    std::vector<double> m(universe.length(), 0.0);
    for (const auto& s : universe.members()) {
        const auto v = s.values();
        for (std::size_t t = 0; t < m.size(); ++t) {
            m[t] += v[t];
        }
    }
    return ReturnSeries(kMarketTicker, universe.calendar_ptr(), std::move(m));
}

CovarianceMatrix covariance_matrix(const Universe& universe, std::size_t t, std::size_t window) {
    return assemble(center_members(universe, t, window), universe.size(), t);
}

double market_volatility(const Universe& universe, std::size_t t, std::size_t window) {
    const auto panel = center_members(universe, t, window);
    return volatility_from(panel, assemble(panel, universe.size(), t));
}

WindowedStat market_volatility_series(const Universe& universe, std::size_t window) {
    if (window == 0) {
        throw ConfigError("window length must be at least 1");
    }
    WindowedStat out;
    out.window = window;
    out.first_valid_index = window - 1;
    if (universe.length() < window) {
        return out;
    }
    out.values.resize(universe.length() - window + 1);
    parallel_for(out.values.size(), [&](std::size_t k) {
        out.values[k] = market_volatility(universe, window - 1 + k, window);
    });
    return out;
}

AlignedPrices align_histories(std::vector<TickerHistory> histories, double max_missing_fraction) {
    if (!(max_missing_fraction >= 0.0 && max_missing_fraction <= 1.0)) {
        throw ConfigError("max_missing_fraction must lie in [0, 1]");
    }
    if (histories.empty()) {
        throw AlignmentError("no price histories to align");
    }
    std::set<Date> all_dates;
    for (auto& h : histories) {
        std::sort(h.closes.begin(), h.closes.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 0; i < h.closes.size(); ++i) {
            if (i > 0 && h.closes[i].first == h.closes[i - 1].first) {
                throw InputError(fmt::format("ticker '{}' has duplicate date {}", h.ticker,
                                             format_date(h.closes[i].first)));
            }
            all_dates.insert(h.closes[i].first);
        }
    }

    AlignedPrices result;
    std::vector<const TickerHistory*> survivors;
    const double total = static_cast<double>(all_dates.size());
    for (const auto& h : histories) {
        const std::size_t missing = all_dates.size() - h.closes.size();
        if (static_cast<double>(missing) > max_missing_fraction * total) {
            result.report.dropped_tickers.push_back(
                {h.ticker, fmt::format("missing {} of {} dates", missing, all_dates.size())});
        } else {
            survivors.push_back(&h);
        }
    }
    if (survivors.empty()) {
        throw AlignmentError("every ticker misses too many dates; no common calendar");
    }

    std::vector<Date> common;
    for (const auto& [d, _] : survivors.front()->closes) {
        common.push_back(d);
    }
    for (std::size_t s = 1; s < survivors.size(); ++s) {
        std::vector<Date> next;
        const auto& closes = survivors[s]->closes;
        std::size_t k = 0;
        for (const Date d : common) {
            while (k < closes.size() && closes[k].first < d) {
                ++k;
            }
            if (k < closes.size() && closes[k].first == d) {
                next.push_back(d);
            }
        }
        common = std::move(next);
    }
    if (common.empty()) {
        throw AlignmentError("tickers share no common trading dates");
    }
    std::set_difference(all_dates.begin(), all_dates.end(), common.begin(), common.end(),
                        std::back_inserter(result.report.dropped_dates));

    auto calendar = std::make_shared<const TradingCalendar>(common);
    for (const auto* h : survivors) {
        std::vector<double> values;
        values.reserve(common.size());
        std::size_t k = 0;
        for (const Date d : common) {
            while (h->closes[k].first < d) {
                ++k;
            }
            values.push_back(h->closes[k].second);
        }
        result.series.emplace_back(h->ticker, calendar, std::move(values));
    }
    return result;
}

}  // namespace volresp
