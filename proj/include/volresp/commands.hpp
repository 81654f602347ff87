#pragma once

#include "volresp/calendar.hpp"
#include "volresp/indicators.hpp"
#include "volresp/synth.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace volresp {

/// Files written by a command, manifest last.
struct CommandResult {
    std::vector<std::filesystem::path> files;
    std::vector<std::string> notes;  // human-readable remarks (dropped tickers, skipped combinations)
};

struct SnapshotOptions {
    std::filesystem::path prices;
    Date date;
    AnalysisConfig config;
    std::uint64_t shuffle_seed = 0;
    std::optional<std::vector<std::string>> universe;
    double max_missing_fraction = 0.0;
    std::filesystem::path out_dir = ".";
    bool with_timestamp = true;
};

/**
 * Writes, for one date: the averaged lag profile with interval bands, the same for the
 * shuffled-returns null, both susceptibilities, the per-stock coefficients (raw and
 * Fisher-transformed, for histograms), a one-row indicator table, and the manifest.
 * Throws EvaluationSkipped when the date cannot be evaluated.
 */
CommandResult cmd_snapshot(const SnapshotOptions& options);

struct RollingOptions {
    std::filesystem::path prices;
    Date from;
    Date to;
    AnalysisConfig config;  // T and M here are overridden by the sweep lists when non-empty
    std::vector<std::size_t> T_values;
    std::vector<std::size_t> M_values;
    std::optional<std::vector<std::string>> universe;
    double max_missing_fraction = 0.0;
    std::filesystem::path out_dir = ".";
    bool with_timestamp = true;
};

/// Writes the market-volatility table (one column per T) and one indicator table per
/// valid (T, M) combination with M > T, plus the manifest.
CommandResult cmd_rolling(const RollingOptions& options);

enum class SynthKind { Ode, LeadLag, ShuffleNull };

struct SynthOptions {
    SynthKind kind = SynthKind::LeadLag;
    std::uint64_t seed = 0;
    AnalysisConfig config;
    OdeParams ode;
    std::size_t ode_length = 5000;
    LeadLagParams leadlag;
    std::filesystem::path out_dir = ".";
    bool with_timestamp = true;
};

/// Generates the synthetic dataset, analyzes it and writes profile, susceptibility and a
/// summary carrying the ground-truth labels.
CommandResult cmd_synth(const SynthOptions& options);

/// Lag profile of rho[x, y] using the longest window that fits every lag in [-tau_max, tau_max].
[[nodiscard]] LagProfile full_sample_profile(std::span<const double> x, std::span<const double> y, int tau_max);

}  // namespace volresp
