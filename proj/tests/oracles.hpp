#pragma once

// Reference implementations written straight from the textbook formulas, deliberately
// sharing no code with the library: one-pass <xy> - <x><y> in long double, a naive complex
// DFT, and an independent random source (std::mt19937 with std:: distributions).

#include "volresp/calendar.hpp"
#include "volresp/market.hpp"
#include "volresp/timeseries.hpp"

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace oracle {

inline long double mean(const std::vector<double>& x, std::size_t end, std::size_t w) {
    long double s = 0;
    for (std::size_t k = end + 1 - w; k <= end; ++k) s += x[k];
    return s / static_cast<long double>(w);
}

inline double cov(const std::vector<double>& x, const std::vector<double>& y, std::size_t t, int tau,
                  std::size_t w) {
    const std::size_t xe = static_cast<std::size_t>(static_cast<long>(t) + tau);
    long double sxy = 0;
    for (std::size_t k = 0; k < w; ++k) {
        sxy += static_cast<long double>(x[xe - k]) * y[t - k];
    }
    const long double n = static_cast<long double>(w);
    return static_cast<double>(sxy / n - mean(x, xe, w) * mean(y, t, w));
}

inline double corr(const std::vector<double>& x, const std::vector<double>& y, std::size_t t, int tau,
                   std::size_t w) {
    const std::size_t xe = static_cast<std::size_t>(static_cast<long>(t) + tau);
    const double vx = cov(x, x, xe, 0, w);
    const double vy = cov(y, y, t, 0, w);
    return cov(x, y, t, tau, w) / std::sqrt(vx * vy);
}

inline double stdev(const std::vector<double>& x, std::size_t t, std::size_t w) {
    return std::sqrt(std::max(0.0, cov(x, x, t, 0, w)));
}

/// chi(omega) = tau_max^{-1/2} sum_tau rho_tau exp(-2 pi i omega tau / tau_max).
inline std::vector<std::complex<double>> dft(const std::vector<double>& rho, int tau_max) {
    std::vector<std::complex<double>> out;
    for (int w = -tau_max; w <= tau_max; ++w) {
        std::complex<long double> acc = 0;
        for (int tau = -tau_max; tau <= tau_max; ++tau) {
            const long double ph = -2.0L * std::numbers::pi_v<long double> * w * tau / tau_max;
            acc += static_cast<long double>(rho[static_cast<std::size_t>(tau + tau_max)]) *
                   std::complex<long double>(std::cos(ph), std::sin(ph));
        }
        out.emplace_back(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
        out.back() /= std::sqrt(static_cast<double>(tau_max));
    }
    return out;
}

inline double fisher_average(const std::vector<double>& r) {
    long double s = 0;
    for (double v : r) s += 0.5L * std::log((1.0L + v) / (1.0L - v));
    return static_cast<double>(std::tanh(s / static_cast<long double>(r.size())));
}

struct Source {
    std::mt19937 gen;
    explicit Source(unsigned seed) : gen(seed) {}
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen); }
    double uniform(double a = 0.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(gen); }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(gen); }
    std::vector<double> normals(std::size_t n) {
        std::vector<double> v(n);
        for (auto& e : v) e = normal();
        return v;
    }
};

inline volresp::CalendarPtr weekdays(std::size_t n) {
    using namespace std::chrono;
    std::vector<volresp::Date> dates;
    sys_days d = sys_days{year{2001} / January / 1};
    while (dates.size() < n) {
        const weekday wd{d};
        if (wd != Saturday && wd != Sunday) dates.emplace_back(d);
        d += days{1};
    }
    return std::make_shared<const volresp::TradingCalendar>(std::move(dates));
}

inline volresp::Universe universe(const std::vector<std::vector<double>>& returns) {
    const auto cal = weekdays(returns.front().size());
    std::vector<volresp::ReturnSeries> members;
    for (std::size_t i = 0; i < returns.size(); ++i) {
        members.emplace_back("S" + std::to_string(i), cal, returns[i]);
    }
    return volresp::Universe(std::move(members));
}

/// Returns with a persistent volatility factor so windowed volatilities move over time.
inline std::vector<double> clustered(Source& src, std::size_t n, double persistence = 0.97) {
    std::vector<double> r(n);
    double h = 0.0;
    for (auto& v : r) {
        h = persistence * h + 0.2 * src.normal();
        v = 0.01 * std::exp(h) * src.normal();
    }
    return r;
}

}  // namespace oracle
