#pragma once

#include "volresp/calendar.hpp"
#include "volresp/indicators.hpp"
#include "volresp/market.hpp"
#include "volresp/timeseries.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace volresp::io {

/// One row of the long-format price file `date,ticker,close`.
struct PriceFileRecord {
    Date date;
    std::string ticker;
    double close = 0.0;
    std::size_t line = 0;
};

/// Reads and validates a price file. Throws InputError with the 1-based line number for a
/// bad header, malformed row, non-positive close, or duplicated (date, ticker).
[[nodiscard]] std::vector<PriceFileRecord> read_price_csv(const std::filesystem::path& path);

struct IngestResult {
    std::vector<PriceSeries> series;
    AlignmentReport report;
    std::vector<std::string> missing_tickers;  // requested by the filter but absent from the file
};

/// Reads a price file, keeps the tickers in `filter` (all when absent) and aligns them.
[[nodiscard]] IngestResult ingest_prices(const std::filesystem::path& path,
                                         const std::optional<std::vector<std::string>>& filter,
                                         double max_missing_fraction = 0.0);

/// Ticker list from a universe file: {"tickers": [{"ticker": "ABT", ...}, ...]}.
[[nodiscard]] std::vector<std::string> load_universe_file(const std::filesystem::path& path);

/// Overrides fields of `cfg` from a JSON object with any of the keys
/// T, M, tau_max, z_table, rho_threshold, stride, asymmetry_threshold.
/// Returns the value of "max_missing_fraction" if present.
std::optional<double> apply_config_file(const std::filesystem::path& path, AnalysisConfig& cfg);

// ---------------------------------------------------------------------------
// Tabular output

/// Shortest decimal form that parses back to the same double.
[[nodiscard]] std::string format_number(double value);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    [[nodiscard]] std::string to_csv() const;
};

/// Writes `content` to `path` via a temporary file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Parses a CSV file produced by Table::to_csv (no quoting).
[[nodiscard]] Table read_table(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Run manifest

[[nodiscard]] std::string sha256_file(const std::filesystem::path& path);

struct InputChecksum {
    std::string path;
    std::string sha256;
};

struct RunManifest {
    std::string command;
    AnalysisConfig config;
    std::vector<std::string> universe;
    std::optional<std::uint64_t> seed;
    std::vector<InputChecksum> inputs;
    std::vector<std::string> outputs;
    std::string extra_json = "{}";  // command-specific parameters, a JSON object
    std::string timestamp;          // excluded from reproducibility comparisons

    [[nodiscard]] std::string to_json() const;
};

[[nodiscard]] std::string utc_timestamp();

}  // namespace volresp::io
