#include "volresp/synth.hpp"

#include "volresp/errors.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace volresp {

double Rng::uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) {
        throw ConfigError("Rng::below needs n > 0");
    }
    // Reject the top partial block so every residue is equally likely.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = next();
    while (v >= limit) {
        v = next();
    }
    return v % n;
}

void shuffle_in_place(std::span<double> values, Rng& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(values[i - 1], values[j]);
    }
}

CalendarPtr synthetic_calendar(std::size_t length) {
    using namespace std::chrono;
    std::vector<Date> dates;
    dates.reserve(length);
    sys_days day = sys_days{year{1994} / January / 3};
    while (dates.size() < length) {
        const weekday wd{day};
        if (wd != Saturday && wd != Sunday) {
            dates.emplace_back(day);
        }
        day += days{1};
    }
    return std::make_shared<const TradingCalendar>(std::move(dates));
}

Universe shuffle_returns(const Universe& universe, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<ReturnSeries> out;
    out.reserve(universe.size());
    for (const auto& member : universe.members()) {
        std::vector<double> v(member.values().begin(), member.values().end());
        shuffle_in_place(v, rng);
        out.emplace_back(member.ticker(), member.calendar(), std::move(v));
    }
    return Universe(std::move(out));
}

namespace {

void validate(const OdeParams& p) {
    if (!(p.a > 0.0) || !(p.b > 0.0) || !(p.dt > 0.0)) {
        throw ConfigError(fmt::format("ODE needs a, b, dt > 0 (got a={}, b={}, dt={})", p.a, p.b, p.dt));
    }
    if (!(p.b * p.dt / p.a < 1.0)) {
        throw ConfigError(fmt::format("explicit Euler step unstable: b*dt/a = {} >= 1", p.b * p.dt / p.a));
    }
}

}  // namespace

std::vector<double> ode_response(const OdeParams& params, std::span<const double> y) {
    validate(params);
    std::vector<double> x(y.size());
    const double gain = params.dt / params.a;
    double prev = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        prev = prev + gain * (y[t] - params.b * prev);
        x[t] = prev;
    }
    return x;
}

OdePair ode_pair(const OdeParams& params, std::size_t length, std::uint64_t seed) {
    validate(params);
    if (!(static_cast<double>(length) > 10.0 * params.a / params.b)) {
        throw ConfigError(fmt::format("length {} must exceed 10*a/b = {}", length, 10.0 * params.a / params.b));
    }
    Rng rng(seed);
    OdePair pair;
    pair.y.resize(length);
    for (auto& v : pair.y) {
        v = rng.normal();
    }
    pair.x = ode_response(params, pair.y);
    return pair;
}

Universe leadlag_universe(const LeadLagParams& p) {
    if (p.n_stocks < 2) {
        throw ConfigError("lead-lag universe needs at least 2 stocks");
    }
    if (p.lag < 0) {
        throw ConfigError("lead-lag universe needs lag >= 0");
    }
    if (p.length < 2) {
        throw ConfigError("lead-lag universe needs length >= 2");
    }
    if (!(p.factor_persistence >= 0.0 && p.factor_persistence < 1.0) || !(p.factor_sd >= 0.0) ||
        !(p.idio_ratio > 0.0) || !(p.idio_noise_sd >= 0.0) || !(p.base_vol > 0.0)) {
        throw ConfigError("lead-lag universe: invalid factor parameters");
    }

    Rng rng(p.seed);
    const auto lag = static_cast<std::size_t>(p.lag);
    const std::size_t padded = p.length + 2 * lag;

    // h[k] is the factor at time k - lag.
    std::vector<double> h(padded);
    const double innovation = p.factor_sd * std::sqrt(1.0 - p.factor_persistence * p.factor_persistence);
    h[0] = p.factor_sd * rng.normal();
    for (std::size_t k = 1; k < padded; ++k) {
        h[k] = p.factor_persistence * h[k - 1] + innovation * rng.normal();
    }
    std::vector<double> common(p.length);
    for (double& v : common) {
        v = rng.normal();
    }

    const auto calendar = synthetic_calendar(p.length);
    const double idio_scale = std::sqrt(p.idio_ratio);
    std::vector<ReturnSeries> members;
    members.reserve(p.n_stocks);
    for (std::size_t i = 0; i < p.n_stocks; ++i) {
        std::vector<double> r(p.length);
        for (std::size_t t = 0; t < p.length; ++t) {
            const std::size_t now = t + lag;
            const std::size_t shifted = p.direction == LeadDirection::StocksLead ? now + lag : now - lag;
            const double market_part = std::exp(h[now]) * common[t];
            const double idio_vol = std::exp(h[shifted] + p.idio_noise_sd * rng.normal());
            r[t] = p.base_vol * (market_part + idio_scale * idio_vol * rng.normal());
        }
        members.emplace_back(fmt::format("S{:03d}", i + 1), calendar, std::move(r));
    }
    return Universe(std::move(members));
}

}  // namespace volresp
