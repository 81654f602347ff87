#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace volresp {

using Date = std::chrono::year_month_day;

/// Parses a strict ISO-8601 calendar date (YYYY-MM-DD).
/// Returns std::nullopt for anything else, including impossible dates.
[[nodiscard]] std::optional<Date> parse_date(std::string_view text);

[[nodiscard]] std::string format_date(Date date);

/// Ordered daily dates; strictly increasing and non-empty.
class TradingCalendar {
public:
    explicit TradingCalendar(std::vector<Date> dates);

    [[nodiscard]] std::size_t size() const noexcept { return dates_.size(); }
    [[nodiscard]] Date operator[](std::size_t i) const { return dates_[i]; }
    [[nodiscard]] Date front() const { return dates_.front(); }
    [[nodiscard]] Date back() const { return dates_.back(); }
    [[nodiscard]] std::span<const Date> dates() const noexcept { return dates_; }

    /// Index of an exact date, if it is a trading day.
    [[nodiscard]] std::optional<std::size_t> index_of(Date date) const;

    /// Index of the first trading day on or after `date`.
    [[nodiscard]] std::size_t lower_bound(Date date) const;

    /// Calendar without its first `n` dates.
    [[nodiscard]] TradingCalendar drop_front(std::size_t n) const;

    /// Sub-calendar [first, first + count).
    [[nodiscard]] TradingCalendar slice(std::size_t first, std::size_t count) const;

    friend bool operator==(const TradingCalendar&, const TradingCalendar&) = default;

private:
    std::vector<Date> dates_;
};

using CalendarPtr = std::shared_ptr<const TradingCalendar>;

}  // namespace volresp
