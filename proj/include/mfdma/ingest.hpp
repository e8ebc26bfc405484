#ifndef MFDMA_INGEST_HPP
#define MFDMA_INGEST_HPP

// Price records to absolute log-return (volatility) series.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mfdma/core.hpp"

namespace mfdma {

struct PriceRecord {
    std::string timestamp;       ///< as written in the source
    std::int64_t minute = 0;     ///< minutes since 1970-01-01T00:00
    double close = 0.0;

    std::int64_t day() const {
        return minute >= 0 ? minute / 1440 : -((-minute + 1439) / 1440);
    }
};

class PriceSeries {
public:
    PriceSeries() = default;
    explicit PriceSeries(std::vector<PriceRecord> records) : records_(std::move(records)) {
        for (std::size_t i = 0; i < records_.size(); ++i) {
            if (!(records_[i].close > 0.0) || !std::isfinite(records_[i].close))
                throw Error(ErrorCode::NonPositivePrice, "record " + std::to_string(i + 1) + " (" +
                                                             records_[i].timestamp + ") has a non-positive close");
            if (i > 0 && records_[i].minute <= records_[i - 1].minute)
                throw Error(ErrorCode::UnsortedTimestamps, "record " + std::to_string(i + 1) + " (" +
                                                               records_[i].timestamp +
                                                               ") is not after the previous one");
        }
    }

    std::span<const PriceRecord> records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }

private:
    std::vector<PriceRecord> records_;
};

struct VolatilityMetadata {
    std::string instrument;
    std::string first_timestamp;
    std::string last_timestamp;
    std::size_t count = 0;          ///< returns kept
    std::size_t dropped_gaps = 0;   ///< returns removed at date changes
};

struct VolatilitySeries {
    Series1D values;
    VolatilityMetadata metadata;
};

struct VolatilityOptions {
    std::string instrument;
    /// Drop the return that spans a change of calendar date (overnight and
    /// weekend gaps). Off by default: every consecutive pair yields a return.
    bool drop_session_gaps = false;
};

/// R(t) = |ln P(t) - ln P(t-1)|.
inline VolatilitySeries volatility(const PriceSeries& prices, const VolatilityOptions& options = {}) {
    const auto recs = prices.records();
    if (recs.size() < 2) throw Error(ErrorCode::InsufficientData, "need at least 2 price records");
    std::vector<double> r;
    r.reserve(recs.size() - 1);
    VolatilitySeries out;
    for (std::size_t t = 1; t < recs.size(); ++t) {
        if (options.drop_session_gaps && recs[t].day() != recs[t - 1].day()) {
            ++out.metadata.dropped_gaps;
            continue;
        }
        // The ratio form keeps volatility(kP) bitwise equal to volatility(P)
        // whenever k is a power of two.
        r.push_back(std::abs(std::log(recs[t].close / recs[t - 1].close)));
    }
    if (r.empty()) throw Error(ErrorCode::InsufficientData, "no returns left after dropping session gaps");
    out.metadata.instrument = options.instrument;
    out.metadata.first_timestamp = recs.front().timestamp;
    out.metadata.last_timestamp = recs.back().timestamp;
    out.metadata.count = r.size();
    out.values = Series1D(std::move(r));
    return out;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline bool parse_fixed_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    for (std::size_t i = pos; i < pos + len; ++i)
        if (s[i] < '0' || s[i] > '9') return false;
    auto res = std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return res.ec == std::errc{};
}

}  // namespace detail

/// Minutes since the Unix epoch for `YYYY-MM-DD[T ]HH:MM[:SS][Z]`.
/// Seconds are accepted but must be zero (minute resolution).
inline bool parse_minute_timestamp(std::string_view s, std::int64_t& minutes) {
    int y, mo, d, h, mi, sec = 0;
    if (s.size() < 16) return false;
    if (!detail::parse_fixed_int(s, 0, 4, y) || s[4] != '-' || !detail::parse_fixed_int(s, 5, 2, mo) ||
        s[7] != '-' || !detail::parse_fixed_int(s, 8, 2, d) || (s[10] != 'T' && s[10] != ' ') ||
        !detail::parse_fixed_int(s, 11, 2, h) || s[13] != ':' || !detail::parse_fixed_int(s, 14, 2, mi))
        return false;
    std::size_t pos = 16;
    if (pos < s.size() && s[pos] == ':') {
        if (!detail::parse_fixed_int(s, pos + 1, 2, sec) || sec != 0) return false;
        pos += 3;
    }
    if (pos < s.size() && s[pos] == 'Z') ++pos;
    if (pos != s.size()) return false;
    if (h > 23 || mi > 59) return false;
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return false;
    const auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
    minutes = static_cast<std::int64_t>(days) * 1440 + h * 60 + mi;
    return true;
}

/// Parses `timestamp,close` CSV text. `source` names the input in messages.
inline PriceSeries parse_prices(std::istream& in, const std::string& source = "<input>") {
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& why) {
        throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line_no) + ": " + why);
    };
    bool header_seen = false;
    std::vector<PriceRecord> records;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = detail::trim(line);
        if (line_no == 1 && view.size() >= 3 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
        if (view.empty()) continue;
        if (!header_seen) {
            const auto comma = view.find(',');
            if (comma == std::string_view::npos || detail::trim(view.substr(0, comma)) != "timestamp" ||
                detail::trim(view.substr(comma + 1)) != "close")
                fail("expected header 'timestamp,close'");
            header_seen = true;
            continue;
        }
        const auto comma = view.find(',');
        if (comma == std::string_view::npos || view.find(',', comma + 1) != std::string_view::npos)
            fail("expected exactly two comma-separated fields");
        const auto ts = detail::trim(view.substr(0, comma));
        const auto px = detail::trim(view.substr(comma + 1));
        PriceRecord rec;
        rec.timestamp = std::string(ts);
        if (!parse_minute_timestamp(ts, rec.minute)) fail("bad timestamp '" + rec.timestamp + "'");
        const auto res = std::from_chars(px.data(), px.data() + px.size(), rec.close);
        if (res.ec != std::errc{} || res.ptr != px.data() + px.size())
            fail("bad close value '" + std::string(px) + "'");
        records.push_back(std::move(rec));
    }
    if (!header_seen) {
        line_no = 1;
        fail("empty file; expected header 'timestamp,close'");
    }
    return PriceSeries(std::move(records));
}

inline PriceSeries read_prices(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
    return parse_prices(in, path);
}

}  // namespace mfdma

#endif  // MFDMA_INGEST_HPP
