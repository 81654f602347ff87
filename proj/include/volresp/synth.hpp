#pragma once

#include "volresp/calendar.hpp"
#include "volresp/market.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace volresp {

/// Seeded generator with platform-independent output. The engine is std::mt19937_64,
/// whose stream is fixed by the standard; the transforms on top are written out here
/// because the std:: distributions are implementation-defined.
class Rng {
public:
    static constexpr std::string_view kIdentity =
        "mt19937_64; uniform=53-bit; normal=box-muller; int=rejection; shuffle=fisher-yates";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    [[nodiscard]] std::uint64_t next() { return engine_(); }
    /// Uniform in [0, 1).
    [[nodiscard]] double uniform();
    /// Standard normal.
    [[nodiscard]] double normal();
    /// Uniform integer in [0, n), n > 0.
    [[nodiscard]] std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

void shuffle_in_place(std::span<double> values, Rng& rng);

/// Weekday calendar of `length` dates starting on or after 1994-01-03.
[[nodiscard]] CalendarPtr synthetic_calendar(std::size_t length);

/// Each member's returns independently permuted (dates fixed, values moved).
[[nodiscard]] Universe shuffle_returns(const Universe& universe, std::uint64_t seed);

struct OdeParams {
    double a = 1.0;   // inertia
    double b = 0.2;   // restoring coefficient
    double dt = 1.0;  // step, trading days
};

struct OdePair {
    std::vector<double> x;  // response
    std::vector<double> y;  // driver
};

/// Explicit-Euler response of a x' + b x = y to a given driver, starting from rest:
/// x(t) = x(t-1) + (dt / a) (y(t) - b x(t-1)) with x(-1) = 0.
/// Throws ConfigError unless a, b, dt > 0 and b dt / a < 1.
[[nodiscard]] std::vector<double> ode_response(const OdeParams& params, std::span<const double> y);

/// Unit-variance white-noise driver y and its response x. Requires length > 10 a / b.
[[nodiscard]] OdePair ode_pair(const OdeParams& params, std::size_t length, std::uint64_t seed);

enum class LeadDirection { StocksLead, MarketLeads };

/**
 * Parameters of the lead-lag volatility-factor universe.
 *
 * Each stock return is base_vol * (exp(h(t)) * eta(t) + sqrt(idio_ratio) * exp(h(t +- lag) +
 * u_i(t)) * eps_i(t)), with h a stationary AR(1) log-volatility factor, eta a common shock,
 * eps_i and u_i idiosyncratic. With 1 << idio_ratio << n_stocks the stock volatilities follow
 * the shifted factor while the summed market follows the unshifted one, so stocks lead
 * (StocksLead, h(t + lag)) or trail (MarketLeads, h(t - lag)) the market by `lag` days.
 */
struct LeadLagParams {
    std::size_t n_stocks = 71;
    std::size_t length = 3000;  // return observations
    LeadDirection direction = LeadDirection::StocksLead;
    int lag = 14;
    std::uint64_t seed = 0;
    double base_vol = 0.01;
    double factor_persistence = 0.95;
    double factor_sd = 1.0;
    double idio_ratio = 8.0;
    double idio_noise_sd = 0.1;
};

[[nodiscard]] Universe leadlag_universe(const LeadLagParams& params);

}  // namespace volresp
