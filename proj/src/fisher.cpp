#include "volresp/fisher.hpp"

#include "volresp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace volresp {

namespace {

constexpr double kBelowOne = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;

void validate(const CiConfig& cfg) {
    if (!(cfg.z_table >= 0.0) || !std::isfinite(cfg.z_table)) {
        throw ConfigError(fmt::format("z_table must be a finite non-negative number, got {}", cfg.z_table));
    }
}

}  // namespace

double fisher_z(double rho) {
    if (!(std::abs(rho) < 1.0)) {
        throw DomainError(fmt::format("Fisher transform needs |rho| < 1, got {}", rho));
    }
    return std::atanh(rho);
}

double fisher_inv(double z) {
    return std::clamp(std::tanh(z), -kBelowOne, kBelowOne);
}

double clip_correlation(double rho) {
    if (std::isnan(rho) || std::abs(rho) > 1.0 + kRhoClampTolerance) {
        throw DomainError(fmt::format("{} is not a correlation coefficient", rho));
    }
    constexpr double limit = 1.0 - kFisherClip;
    return std::clamp(rho, -limit, limit);
}

double average_correlation(std::span<const double> coeffs) {
    if (coeffs.empty()) {
        throw DomainError("cannot average an empty list of correlations");
    }
    // Identical inputs average to themselves; skip the transform round-trip.
    if (std::all_of(coeffs.begin(), coeffs.end(), [&](double r) { return r == coeffs.front(); })) {
        return clip_correlation(coeffs.front());
    }
    double sum = 0.0;
    for (double r : coeffs) {
        sum += fisher_z(clip_correlation(r));
    }
    return fisher_inv(sum / static_cast<double>(coeffs.size()));
}

Interval correlation_ci(double rho_bar, std::size_t n, const CiConfig& cfg) {
    validate(cfg);
    if (n <= 3) {
        throw DomainError(fmt::format("confidence interval needs N >= 4, got {}", n));
    }
    const double z = fisher_z(rho_bar);
    const double half = cfg.z_table / std::sqrt(static_cast<double>(n - 3));
    // min/max absorb the one-ulp tanh(atanh(x)) round-trip.
    return {std::min(fisher_inv(z - half), rho_bar), std::max(fisher_inv(z + half), rho_bar)};
}

AveragedLagProfile average_lag_coefficients(
    std::size_t anchor, int tau_max, std::size_t window,
    std::span<const std::vector<std::optional<double>>> coeffs, const CiConfig& cfg) {
    validate(cfg);
    if (coeffs.empty()) {
        throw DomainError("cannot average zero lag profiles");
    }
    if (tau_max < 0) {
        throw ConfigError("tau_max must be non-negative");
    }
    const auto lags = static_cast<std::size_t>(2 * tau_max + 1);
    for (const auto& row : coeffs) {
        if (row.size() != lags) {
            throw AlignmentError(fmt::format("profile has {} lags, expected {}", row.size(), lags));
        }
    }

    AveragedLagProfile out;
    out.anchor = anchor;
    out.tau_max = tau_max;
    out.window = window;
    out.n = coeffs.size();
    out.rho_bar.resize(lags);
    out.counts.resize(lags);
    out.ci.resize(lags);

    std::vector<double> column;
    column.reserve(coeffs.size());
    for (std::size_t k = 0; k < lags; ++k) {
        column.clear();
        for (const auto& row : coeffs) {
            if (row[k]) {
                column.push_back(*row[k]);
            }
        }
        if (column.empty()) {
            throw DomainError(fmt::format("no valid coefficients at lag {}", static_cast<int>(k) - tau_max));
        }
        const double rho = average_correlation(column);
        out.rho_bar[k] = rho;
        out.counts[k] = column.size();
        if (column.size() > 3) {
            out.ci[k] = correlation_ci(rho, column.size(), cfg);
        }
    }
    return out;
}

AveragedLagProfile averaged_lag_profile(std::span<const LagProfile> profiles, const CiConfig& cfg) {
    if (profiles.empty()) {
        throw DomainError("cannot average zero lag profiles");
    }
    const auto& first = profiles.front();
    std::vector<std::vector<std::optional<double>>> coeffs;
    coeffs.reserve(profiles.size());
    for (const auto& p : profiles) {
        if (p.anchor != first.anchor || p.tau_max != first.tau_max || p.window != first.window ||
            p.values.size() != first.values.size()) {
            throw AlignmentError(fmt::format(
                "lag profiles disagree: anchor {} / {}, tau_max {} / {}, window {} / {}", first.anchor,
                p.anchor, first.tau_max, p.tau_max, first.window, p.window));
        }
        coeffs.emplace_back(p.values.begin(), p.values.end());
    }
    return average_lag_coefficients(first.anchor, first.tau_max, first.window, coeffs, cfg);
}

}  // namespace volresp
