#include "volresp/calendar.hpp"

#include "volresp/errors.hpp"

#include <algorithm>
#include <charconv>

#include <fmt/format.h>

namespace volresp {

namespace {

bool parse_int(std::string_view text, int& out) {
    if (text.empty()) {
        return false;
    }
    for (char c : text) {
        if (c < '0' || c > '9') {
            return false;
        }
    }
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    int y = 0;
    int m = 0;
    int d = 0;
    if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
        !parse_int(text.substr(8, 2), d)) {
        return std::nullopt;
    }
    const Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!date.ok()) {
        return std::nullopt;
    }
    return date;
}

std::string format_date(Date date) {
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(date.year()),
                       static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
}

TradingCalendar::TradingCalendar(std::vector<Date> dates) : dates_(std::move(dates)) {
    if (dates_.empty()) {
        throw InputError("trading calendar must not be empty");
    }
    for (std::size_t i = 1; i < dates_.size(); ++i) {
        if (!(dates_[i - 1] < dates_[i])) {
            throw InputError(fmt::format("trading calendar not strictly increasing at {} -> {}",
                                         format_date(dates_[i - 1]), format_date(dates_[i])));
        }
    }
}

std::optional<std::size_t> TradingCalendar::index_of(Date date) const {
    auto it = std::lower_bound(dates_.begin(), dates_.end(), date);
    if (it == dates_.end() || *it != date) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - dates_.begin());
}

std::size_t TradingCalendar::lower_bound(Date date) const {
    return static_cast<std::size_t>(std::lower_bound(dates_.begin(), dates_.end(), date) -
                                    dates_.begin());
}

TradingCalendar TradingCalendar::drop_front(std::size_t n) const {
    if (n >= dates_.size()) {
        throw InputError("cannot drop the whole trading calendar");
    }
    return TradingCalendar({dates_.begin() + static_cast<std::ptrdiff_t>(n), dates_.end()});
}

TradingCalendar TradingCalendar::slice(std::size_t first, std::size_t count) const {
    if (count == 0 || first + count > dates_.size()) {
        throw OutOfRangeError("calendar slice out of range");
    }
    auto begin = dates_.begin() + static_cast<std::ptrdiff_t>(first);
    return TradingCalendar({begin, begin + static_cast<std::ptrdiff_t>(count)});
}

}  // namespace volresp
