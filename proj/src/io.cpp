#include "volresp/io.hpp"

#include "volresp/errors.hpp"
#include "volresp/synth.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string_view>

#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

namespace volresp::io {

namespace {

using nlohmann::json;

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError(fmt::format("cannot open '{}'", path.string()));
    }
    return in;
}

json read_json(const std::filesystem::path& path) {
    auto in = open_input(path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InputError(fmt::format("'{}': invalid JSON: {}", path.string(), e.what()));
    }
}

}  // namespace

std::vector<PriceFileRecord> read_price_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        throw InputError(fmt::format("'{}': empty file, expected header date,ticker,close", path.string()));
    }
    ++line_no;
    if (trim(line) != "date,ticker,close") {
        throw InputError(fmt::format("'{}' line 1: expected header 'date,ticker,close', got '{}'",
                                     path.string(), trim(line)));
    }

    std::vector<PriceFileRecord> records;
    std::set<std::pair<std::string, Date>> seen;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty()) {
            continue;
        }
        const auto fields = split(text, ',');
        if (fields.size() != 3) {
            throw InputError(fmt::format("'{}' line {}: expected 3 fields, got {}", path.string(), line_no,
                                         fields.size()));
        }
        const auto date = parse_date(trim(fields[0]));
        if (!date) {
            throw InputError(fmt::format("'{}' line {}: invalid date '{}'", path.string(), line_no, fields[0]));
        }
        const auto ticker = trim(fields[1]);
        if (ticker.empty()) {
            throw InputError(fmt::format("'{}' line {}: empty ticker", path.string(), line_no));
        }
        const auto close_text = trim(fields[2]);
        double close = 0.0;
        auto [ptr, ec] = std::from_chars(close_text.data(), close_text.data() + close_text.size(), close);
        if (ec != std::errc{} || ptr != close_text.data() + close_text.size()) {
            throw InputError(fmt::format("'{}' line {}: invalid close '{}'", path.string(), line_no, close_text));
        }
        if (!(close > 0.0) || !std::isfinite(close)) {
            throw InputError(fmt::format("'{}' line {}: close must be positive, got {}", path.string(), line_no,
                                         close_text));
        }
        if (!seen.emplace(std::string(ticker), *date).second) {
            throw InputError(fmt::format("'{}' line {}: duplicate row for {} on {}", path.string(), line_no,
                                         ticker, format_date(*date)));
        }
        records.push_back({*date, std::string(ticker), close, line_no});
    }
    return records;
}

IngestResult ingest_prices(const std::filesystem::path& path,
                           const std::optional<std::vector<std::string>>& filter,
                           double max_missing_fraction) {
    const auto records = read_price_csv(path);
    std::map<std::string, TickerHistory> by_ticker;
    std::optional<std::set<std::string>> wanted;
    if (filter) {
        wanted.emplace(filter->begin(), filter->end());
    }
    for (const auto& r : records) {
        if (wanted && !wanted->contains(r.ticker)) {
            continue;
        }
        auto& h = by_ticker[r.ticker];
        h.ticker = r.ticker;
        h.closes.emplace_back(r.date, r.close);
    }

    IngestResult result;
    if (filter) {
        for (const auto& t : *filter) {
            if (!by_ticker.contains(t)) {
                result.missing_tickers.push_back(t);
            }
        }
    }
    std::vector<TickerHistory> histories;
    histories.reserve(by_ticker.size());
    if (filter) {
        // Keep the filter's order so outputs follow the universe file.
        for (const auto& t : *filter) {
            if (auto it = by_ticker.find(t); it != by_ticker.end()) {
                histories.push_back(std::move(it->second));
                by_ticker.erase(it);
            }
        }
    } else {
        for (auto& [_, h] : by_ticker) {
            histories.push_back(std::move(h));
        }
    }
    if (histories.empty()) {
        throw AlignmentError(fmt::format("'{}': no price rows for the requested tickers", path.string()));
    }
    auto aligned = align_histories(std::move(histories), max_missing_fraction);
    result.series = std::move(aligned.series);
    result.report = std::move(aligned.report);
    return result;
}

std::vector<std::string> load_universe_file(const std::filesystem::path& path) {
    const auto doc = read_json(path);
    if (!doc.contains("tickers") || !doc["tickers"].is_array()) {
        throw InputError(fmt::format("'{}': expected an object with a \"tickers\" array", path.string()));
    }
    std::vector<std::string> tickers;
    for (const auto& entry : doc["tickers"]) {
        if (entry.is_string()) {
            tickers.push_back(entry.get<std::string>());
        } else if (entry.is_object() && entry.contains("ticker") && entry["ticker"].is_string()) {
            tickers.push_back(entry["ticker"].get<std::string>());
        } else {
            throw InputError(fmt::format("'{}': malformed ticker entry {}", path.string(), entry.dump()));
        }
    }
    if (tickers.empty()) {
        throw InputError(fmt::format("'{}': universe file lists no tickers", path.string()));
    }
    return tickers;
}

std::optional<double> apply_config_file(const std::filesystem::path& path, AnalysisConfig& cfg) {
    const auto doc = read_json(path);
    if (!doc.is_object()) {
        throw ConfigError(fmt::format("'{}': configuration must be a JSON object", path.string()));
    }
    static const std::set<std::string> known{"T",      "M",      "tau_max", "z_table", "rho_threshold",
                                             "stride", "asymmetry_threshold", "max_missing_fraction"};
    for (const auto& [key, _] : doc.items()) {
        if (!known.contains(key)) {
            throw ConfigError(fmt::format("'{}': unknown configuration key '{}'", path.string(), key));
        }
    }
    try {
        if (doc.contains("T")) cfg.T = doc["T"].get<std::size_t>();
        if (doc.contains("M")) cfg.M = doc["M"].get<std::size_t>();
        if (doc.contains("tau_max")) cfg.tau_max = doc["tau_max"].get<int>();
        if (doc.contains("z_table")) cfg.z_table = doc["z_table"].get<double>();
        if (doc.contains("rho_threshold")) cfg.rho_threshold = doc["rho_threshold"].get<double>();
        if (doc.contains("stride")) cfg.stride = doc["stride"].get<std::size_t>();
        if (doc.contains("asymmetry_threshold")) cfg.asymmetry_threshold = doc["asymmetry_threshold"].get<double>();
        if (doc.contains("max_missing_fraction")) return doc["max_missing_fraction"].get<double>();
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("'{}': {}", path.string(), e.what()));
    }
    return std::nullopt;
}

std::string format_number(double value) {
    return fmt::format("{}", value);
}

std::string Table::to_csv() const {
    std::string out;
    auto append_row = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) {
                out += ',';
            }
            out += row[i];
        }
        out += '\n';
    };
    append_row(header);
    for (const auto& row : rows) {
        append_row(row);
    }
    return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw InputError(fmt::format("cannot write '{}'", tmp.string()));
        }
        out << content;
        if (!out.flush()) {
            throw InputError(fmt::format("failed writing '{}'", tmp.string()));
        }
    }
    std::filesystem::rename(tmp, path);
}

Table read_table(const std::filesystem::path& path) {
    auto in = open_input(path);
    Table table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        std::vector<std::string> row;
        for (auto f : split(line, ',')) {
            row.emplace_back(f);
        }
        if (first) {
            table.header = std::move(row);
            first = false;
        } else {
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

std::string sha256_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("SHA-256 initialisation failed");
    }
    std::vector<char> buffer(1 << 16);
    while (in) {
        in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
        const auto got = in.gcount();
        if (got > 0) {
            EVP_DigestUpdate(ctx, buffer.data(), static_cast<std::size_t>(got));
        }
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex += fmt::format("{:02x}", digest[i]);
    }
    return hex;
}

std::string RunManifest::to_json() const {
    json doc;
    doc["tool"] = "volresp";
    doc["version"] = VOLRESP_VERSION;
    doc["command"] = command;
    doc["config"] = {{"T", config.T},
                     {"M", config.M},
                     {"tau_max", config.tau_max},
                     {"z_table", config.z_table},
                     {"rho_threshold", config.rho_threshold},
                     {"stride", config.stride},
                     {"asymmetry_threshold", config.asymmetry_threshold}};
    doc["universe"] = universe;
    doc["seed"] = seed ? json(*seed) : json(nullptr);
    doc["rng"] = std::string(Rng::kIdentity);
    json ins = json::array();
    for (const auto& i : inputs) {
        ins.push_back({{"path", i.path}, {"sha256", i.sha256}});
    }
    doc["inputs"] = ins;
    doc["outputs"] = outputs;
    doc["parameters"] = json::parse(extra_json);
    doc["timestamp"] = timestamp;
    return doc.dump(2) + "\n";
}

std::string utc_timestamp() {
    const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
    const auto day = std::chrono::floor<std::chrono::days>(now);
    const std::chrono::hh_mm_ss hms{now - day};
    return fmt::format("{}T{:02d}:{:02d}:{:02d}Z", format_date(Date{day}), hms.hours().count(),
                       hms.minutes().count(), hms.seconds().count());
}

}  // namespace volresp::io
