#include "sesstat/session_returns.hpp"

#include <algorithm>
#include <cmath>

namespace sesstat {

const std::vector<double>& SessionReturns::by_kind(Kind kind) const {
    switch (kind) {
        case Kind::total: return r_total;
        case Kind::overnight: return r_overnight;
        case Kind::daytime: return r_daytime;
    }
    throw ArgumentError("bad kind");
}

SessionReturns compute_returns(const PriceSeries& series) {
    const std::size_t n_bars = series.bars.size();
    if (n_bars < 2)
        throw InsufficientDataError(series.ticker + ": need at least 2 bars, have " +
                                    std::to_string(n_bars));

    SessionReturns out;
    out.ticker = series.ticker;
    const std::size_t n = n_bars - 1;
    out.dates.reserve(n);
    out.r_total.reserve(n);
    out.r_overnight.reserve(n);
    out.r_daytime.reserve(n);
    out.gap_flags.reserve(n);

    const auto& drops = series.dropped_dates;
    for (std::size_t t = 1; t < n_bars; ++t) {
        const PriceBar& prev = series.bars[t - 1];
        const PriceBar& cur = series.bars[t];
        out.dates.push_back(cur.date);
        out.r_overnight.push_back(std::log(cur.open / prev.close));
        out.r_daytime.push_back(std::log(cur.close / cur.open));
        out.r_total.push_back(std::log(cur.close / prev.close));
        auto it = std::upper_bound(drops.begin(), drops.end(), prev.date);
        out.gap_flags.push_back(it != drops.end() && *it < cur.date);
    }
    return out;
}

VolatilitySeries volatility(const std::vector<double>& returns, Kind kind) {
    VolatilitySeries out;
    out.kind = kind;
    out.values.reserve(returns.size());
    for (double r : returns) out.values.push_back(std::fabs(r));
    return out;
}

SessionReturns exclude_gap_entries(const SessionReturns& returns) {
    SessionReturns out;
    out.ticker = returns.ticker;
    for (std::size_t t = 0; t < returns.size(); ++t) {
        if (returns.gap_flags[t]) continue;
        out.dates.push_back(returns.dates[t]);
        out.r_total.push_back(returns.r_total[t]);
        out.r_overnight.push_back(returns.r_overnight[t]);
        out.r_daytime.push_back(returns.r_daytime[t]);
        out.gap_flags.push_back(0);
    }
    return out;
}

}  // namespace sesstat
