#pragma once

#include "volresp/fisher.hpp"
#include "volresp/timeseries.hpp"

#include <span>
#include <vector>

namespace volresp {

/// Complex susceptibility on the integer frequency grid [-tau_max, tau_max].
struct Susceptibility {
    int tau_max = 0;
    std::vector<double> re;  // re[omega + tau_max]
    std::vector<double> im;

    [[nodiscard]] double re_at(int omega) const { return re.at(static_cast<std::size_t>(omega + tau_max)); }
    [[nodiscard]] double im_at(int omega) const { return im.at(static_cast<std::size_t>(omega + tau_max)); }
};

struct PeakSummary {
    double re_peak = 0.0;
    int re_peak_omega = 0;
    double im_peak = 0.0;  // signed value where |Im| is largest over omega > 0
    int im_peak_omega = 0;
};

struct EvenOddParts {
    std::vector<double> even;
    std::vector<double> odd;
};

/**
 * Discrete transform of a lag profile rho_tau, tau in [-tau_max, tau_max]:
 *
 *   chi_omega = 1/sqrt(tau_max) * sum_tau rho_tau * exp(-i 2 pi omega tau / tau_max)
 *
 * evaluated at every integer omega in [-tau_max, tau_max] by direct summation in
 * ascending tau. The exponent's period is tau_max, not the grid length. Throws
 * DomainError for tau_max = 0 and AlignmentError if the profile length is not 2 tau_max + 1.
 */
[[nodiscard]] Susceptibility dft_susceptibility(std::span<const double> profile, int tau_max);
[[nodiscard]] Susceptibility dft_susceptibility(const LagProfile& profile);
[[nodiscard]] Susceptibility dft_susceptibility(const AveragedLagProfile& profile);

/// even(tau) = (rho(tau) + rho(-tau)) / 2, odd(tau) = (rho(tau) - rho(-tau)) / 2.
[[nodiscard]] EvenOddParts even_odd_split(std::span<const double> profile);

/// rho(-tau) for every tau.
[[nodiscard]] std::vector<double> lag_reversed(std::span<const double> profile);

/// Re peak over omega > 0; Im value of largest magnitude over omega > 0.
/// Ties (to 1e-12 relative) go to the smaller omega.
[[nodiscard]] PeakSummary extract_peaks(const Susceptibility& chi);

}  // namespace volresp
