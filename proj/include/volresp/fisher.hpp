#pragma once

#include "volresp/timeseries.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace volresp {

struct CiConfig {
    double z_table = 1.96;
    std::string confidence_label = "95%";
};

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

/// Coefficients at or beyond 1 - kFisherClip in magnitude are pulled back to it before
/// the Fisher transform.
inline constexpr double kFisherClip = 1e-12;

/// atanh(rho). Throws DomainError unless |rho| < 1.
[[nodiscard]] double fisher_z(double rho);

/// tanh(z), kept strictly inside (-1, 1) even where tanh rounds to +-1.
[[nodiscard]] double fisher_inv(double z);

/// Clips |rho| >= 1 - kFisherClip to +-(1 - kFisherClip). Values beyond 1 + kRhoClampTolerance
/// or NaN are not correlations and throw DomainError.
[[nodiscard]] double clip_correlation(double rho);

/// Fisher average: fisher_inv of the mean of fisher_z over the (clipped) coefficients.
[[nodiscard]] double average_correlation(std::span<const double> coeffs);

/**
 * Confidence interval around an averaged coefficient:
 *
 *   fisher_inv(fisher_z(rho_bar) +- z_table / sqrt(n - 3))
 *
 * Requires n >= 4 and z_table >= 0. Bounds always bracket rho_bar.
 */
[[nodiscard]] Interval correlation_ci(double rho_bar, std::size_t n, const CiConfig& cfg);

/// Fisher-averaged lag profile with a per-lag interval and contributor count.
struct AveragedLagProfile {
    std::size_t anchor = 0;
    int tau_max = 0;
    std::size_t window = 0;
    std::size_t n = 0;                         // profiles supplied
    std::vector<double> rho_bar;               // rho_bar[tau + tau_max]
    std::vector<std::size_t> counts;           // contributors per lag
    std::vector<std::optional<Interval>> ci;   // absent where counts <= 3

    [[nodiscard]] std::size_t size() const noexcept { return rho_bar.size(); }
    [[nodiscard]] double at(int tau) const { return rho_bar.at(static_cast<std::size_t>(tau + tau_max)); }
};

/// Per-lag Fisher average of complete profiles sharing anchor, tau_max and window.
/// Throws AlignmentError on heterogeneous input, DomainError on an empty list.
[[nodiscard]] AveragedLagProfile averaged_lag_profile(std::span<const LagProfile> profiles,
                                                      const CiConfig& cfg);

/// Per-lag Fisher average where individual (stock, lag) coefficients may be missing.
/// `coeffs[i][tau + tau_max]` is stock i's coefficient. Missing entries are dropped per lag;
/// a lag with no contributors throws DomainError.
[[nodiscard]] AveragedLagProfile average_lag_coefficients(
    std::size_t anchor, int tau_max, std::size_t window,
    std::span<const std::vector<std::optional<double>>> coeffs, const CiConfig& cfg);

}  // namespace volresp
