#pragma once

#include <cstdint>
#include <vector>

#include "sesstat/market_data.hpp"

namespace sesstat {

// The three per-day log-return sequences of one stock. Entry t spans the
// consecutive retained bars (t, t+1):
//   r_overnight = ln(open_{t+1} / close_t)
//   r_daytime   = ln(close_{t+1} / open_{t+1})
//   r_total     = ln(close_{t+1} / close_t) = r_overnight + r_daytime
// gap_flags[t] is set when a dropped input row falls strictly between the
// two bars, so the entry spans more than one original trading record.
struct SessionReturns {
    std::string ticker;
    std::vector<Date> dates;  // date of the later bar of each pair
    std::vector<double> r_total;
    std::vector<double> r_overnight;
    std::vector<double> r_daytime;
    std::vector<std::uint8_t> gap_flags;

    const std::vector<double>& by_kind(Kind kind) const;
    std::size_t size() const { return r_total.size(); }
};

struct VolatilitySeries {
    std::vector<double> values;  // elementwise |return|
    Kind kind = Kind::total;
};

// Throws InsufficientDataError when the series has fewer than two bars.
SessionReturns compute_returns(const PriceSeries& series);

VolatilitySeries volatility(const std::vector<double>& returns, Kind kind);

// Copy with every gap-flagged entry removed (all remaining flags false).
SessionReturns exclude_gap_entries(const SessionReturns& returns);

}  // namespace sesstat
