#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sesstat/common.hpp"

namespace sesstat {

// One trading day of one ticker. split_factor s on date d means prices
// strictly before d must be divided by s to remove the split jump.
struct PriceBar {
    Date date;
    double open = 0.0;
    double close = 0.0;
    double split_factor = 1.0;
};

struct PriceSeries {
    std::string ticker;
    std::vector<PriceBar> bars;  // strictly increasing by date

    // Dates of rows that were dropped during parsing (missing or invalid
    // price fields) and had a parseable date. Sorted. Downstream return
    // computation uses these to flag entries that span a dropped row.
    std::vector<Date> dropped_dates;
};

// A skipped input row: which line, why, and whose series it belonged to.
struct RowIssue {
    std::size_t line = 0;  // 1-based, header is line 1
    std::string ticker;
    std::string message;
};

struct ParseResult {
    std::vector<PriceSeries> series;          // sorted by ticker
    std::map<std::string, std::size_t> skipped;  // ticker -> dropped-row count
    std::vector<RowIssue> issues;
};

// Reads `ticker,date,open,close[,split_factor]` CSV. Rows may arrive in any
// order; output is grouped per ticker and sorted by date. Rows with a missing
// or non-positive price are skipped, tallied per ticker, and reported as
// issues while the rest of the series is still built. Throws FormatError on
// a malformed header or on two retained rows with the same (ticker, date).
ParseResult parse_price_csv(std::istream& in);
ParseResult parse_price_csv(const std::string& text);

// Checks the PriceSeries invariants (dates strictly increasing, prices and
// split factors positive); throws FormatError naming the first violation.
void validate(const PriceSeries& series);

// Divides every price strictly before each split date by that split factor,
// cumulatively across multiple splits; output split factors are all 1.0.
// Idempotent once no factor differs from 1.0.
PriceSeries apply_split_adjustment(const PriceSeries& series);

// Keeps bars with start <= date <= end (dropped-date annotations filtered
// the same way). Throws ArgumentError when start > end.
PriceSeries filter_date_range(const PriceSeries& series, Date start, Date end);

}  // namespace sesstat
