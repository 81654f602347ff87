#include "volresp/susceptibility.hpp"

#include "volresp/errors.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace volresp {

namespace {

void require_odd_length(std::size_t n) {
    if (n % 2 == 0) {
        throw AlignmentError(fmt::format("lag profile must have odd length, got {}", n));
    }
}

}  // namespace

Susceptibility dft_susceptibility(std::span<const double> profile, int tau_max) {
    if (tau_max <= 0) {
        throw DomainError("susceptibility needs tau_max >= 1");
    }
    const auto period = static_cast<std::size_t>(tau_max);
    const std::size_t n = 2 * period + 1;
    if (profile.size() != n) {
        throw AlignmentError(
            fmt::format("profile has {} lags, expected {} for tau_max {}", profile.size(), n, tau_max));
    }

    // Phase table over one period, mirrored so that p and period - p agree exactly.
    std::vector<double> cos_table(period);
    std::vector<double> sin_table(period);
    for (std::size_t p = 0; 2 * p <= period; ++p) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(p) / static_cast<double>(period);
        cos_table[p] = std::cos(angle);
        sin_table[p] = std::sin(angle);
        if (p != 0 && period - p != p) {
            cos_table[period - p] = cos_table[p];
            sin_table[period - p] = -sin_table[p];
        }
    }
    if (period % 2 == 0) {
        sin_table[period / 2] = 0.0;
    }
    sin_table[0] = 0.0;

    const double norm = 1.0 / std::sqrt(static_cast<double>(tau_max));
    Susceptibility chi{tau_max, std::vector<double>(n), std::vector<double>(n)};
    const auto m = static_cast<long long>(period);
    for (long long omega = -m; omega <= m; ++omega) {
        double re = 0.0;
        double im = 0.0;
        for (long long tau = -m; tau <= m; ++tau) {
            const long long phase = ((omega * tau) % m + m) % m;
            const double rho = profile[static_cast<std::size_t>(tau + m)];
            re += rho * cos_table[static_cast<std::size_t>(phase)];
            im -= rho * sin_table[static_cast<std::size_t>(phase)];
        }
        chi.re[static_cast<std::size_t>(omega + m)] = norm * re;
        chi.im[static_cast<std::size_t>(omega + m)] = norm * im;
    }
    return chi;
}

Susceptibility dft_susceptibility(const LagProfile& profile) {
    return dft_susceptibility(profile.values, profile.tau_max);
}

Susceptibility dft_susceptibility(const AveragedLagProfile& profile) {
    return dft_susceptibility(profile.rho_bar, profile.tau_max);
}

EvenOddParts even_odd_split(std::span<const double> profile) {
    require_odd_length(profile.size());
    const std::size_t n = profile.size();
    EvenOddParts parts{std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t k = 0; k < n; ++k) {
        const double a = profile[k];
        const double b = profile[n - 1 - k];
        parts.even[k] = (a + b) / 2.0;
        parts.odd[k] = (a - b) / 2.0;
    }
    return parts;
}

std::vector<double> lag_reversed(std::span<const double> profile) {
    require_odd_length(profile.size());
    return {profile.rbegin(), profile.rend()};
}

PeakSummary extract_peaks(const Susceptibility& chi) {
    if (chi.tau_max < 1) {
        throw DomainError("peak extraction needs at least one positive frequency");
    }
    constexpr double kTieTolerance = 1e-12;
    PeakSummary peaks;
    peaks.re_peak = chi.re_at(1);
    peaks.re_peak_omega = 1;
    peaks.im_peak = chi.im_at(1);
    peaks.im_peak_omega = 1;
    for (int omega = 2; omega <= chi.tau_max; ++omega) {
        const double re = chi.re_at(omega);
        if (re > peaks.re_peak) {
            peaks.re_peak = re;
            peaks.re_peak_omega = omega;
        }
        const double im = chi.im_at(omega);
        const double best = std::abs(peaks.im_peak);
        if (std::abs(im) > best + kTieTolerance * best) {
            peaks.im_peak = im;
            peaks.im_peak_omega = omega;
        }
    }
    return peaks;
}

}  // namespace volresp
