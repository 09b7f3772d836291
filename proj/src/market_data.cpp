#include "sesstat/market_data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <optional>
#include <sstream>
#include <utility>

namespace sesstat {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

// Empty field -> nullopt. Unparseable or trailing junk -> throws.
std::optional<double> parse_price_field(std::string_view raw, const char* what) {
    std::string_view s = trim(raw);
    if (s.empty()) return std::nullopt;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw FormatError(std::string("unparseable ") + what + " '" + std::string(s) + "'");
    return value;
}

struct PendingRow {
    std::size_t line;
    PriceBar bar;
};

}  // namespace

ParseResult parse_price_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw FormatError("empty input, expected a header line");
    ++line_no;
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
        static_cast<unsigned char>(line[1]) == 0xBB &&
        static_cast<unsigned char>(line[2]) == 0xBF)
        line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    auto header = split_fields(line);
    bool has_split = false;
    auto header_matches = [&](std::initializer_list<const char*> names) {
        if (header.size() != names.size()) return false;
        auto it = names.begin();
        for (const auto& field : header)
            if (lower(trim(field)) != *it++) return false;
        return true;
    };
    if (header_matches({"ticker", "date", "open", "close", "split_factor"}))
        has_split = true;
    else if (!header_matches({"ticker", "date", "open", "close"}))
        throw FormatError("bad header '" + line +
                          "', expected ticker,date,open,close[,split_factor]");

    std::map<std::string, std::vector<PendingRow>> rows;
    std::map<std::string, std::vector<Date>> dropped;
    ParseResult result;

    auto skip_row = [&](const std::string& ticker, std::size_t at, std::string why,
                        std::optional<Date> date) {
        ++result.skipped[ticker];
        result.issues.push_back({at, ticker, std::move(why)});
        if (date) dropped[ticker].push_back(*date);
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;

        auto fields = split_fields(line);
        std::string ticker(trim(fields[0]));
        if (fields.size() != (has_split ? 5u : 4u)) {
            skip_row(ticker.empty() ? "?" : ticker, line_no,
                     "wrong field count", std::nullopt);
            continue;
        }
        if (ticker.empty()) {
            skip_row("?", line_no, "empty ticker", std::nullopt);
            continue;
        }

        std::optional<Date> date;
        try {
            date = Date::parse(trim(fields[1]));
        } catch (const FormatError& e) {
            skip_row(ticker, line_no, e.what(), std::nullopt);
            continue;
        }

        try {
            auto open = parse_price_field(fields[2], "open");
            auto close = parse_price_field(fields[3], "close");
            std::optional<double> split;
            if (has_split) split = parse_price_field(fields[4], "split_factor");
            if (!open || !close) {
                skip_row(ticker, line_no, "missing price field", date);
                continue;
            }
            if (*open <= 0.0 || *close <= 0.0) {
                skip_row(ticker, line_no, "non-positive price", date);
                continue;
            }
            if (split && *split <= 0.0) {
                skip_row(ticker, line_no, "non-positive split_factor", date);
                continue;
            }
            rows[ticker].push_back(
                {line_no, PriceBar{*date, *open, *close, split.value_or(1.0)}});
        } catch (const FormatError& e) {
            skip_row(ticker, line_no, e.what(), date);
        }
    }

    for (auto& [ticker, pending] : rows) {
        std::stable_sort(pending.begin(), pending.end(),
                         [](const PendingRow& a, const PendingRow& b) {
                             return a.bar.date < b.bar.date;
                         });
        for (std::size_t i = 1; i < pending.size(); ++i)
            if (pending[i].bar.date == pending[i - 1].bar.date)
                throw FormatError("duplicate rows for " + ticker + " on " +
                                  pending[i].bar.date.str() + " (lines " +
                                  std::to_string(pending[i - 1].line) + " and " +
                                  std::to_string(pending[i].line) + ")");
        PriceSeries series;
        series.ticker = ticker;
        series.bars.reserve(pending.size());
        for (const auto& row : pending) series.bars.push_back(row.bar);
        auto& drops = dropped[ticker];
        std::sort(drops.begin(), drops.end());
        series.dropped_dates = std::move(drops);
        result.series.push_back(std::move(series));
    }
    return result;
}

ParseResult parse_price_csv(const std::string& text) {
    std::istringstream in(text);
    return parse_price_csv(in);
}

void validate(const PriceSeries& series) {
    for (std::size_t i = 0; i < series.bars.size(); ++i) {
        const PriceBar& bar = series.bars[i];
        if (bar.open <= 0.0 || bar.close <= 0.0)
            throw FormatError(series.ticker + " " + bar.date.str() +
                              ": non-positive price");
        if (bar.split_factor <= 0.0)
            throw FormatError(series.ticker + " " + bar.date.str() +
                              ": non-positive split_factor");
        if (i > 0 && !(series.bars[i - 1].date < bar.date))
            throw FormatError(series.ticker + ": dates not strictly increasing at " +
                              bar.date.str());
    }
}

PriceSeries apply_split_adjustment(const PriceSeries& series) {
    PriceSeries out = series;
    double cumulative = 1.0;
    for (std::size_t i = out.bars.size(); i-- > 0;) {
        PriceBar& bar = out.bars[i];
        bar.open /= cumulative;
        bar.close /= cumulative;
        if (bar.split_factor != 1.0) cumulative *= bar.split_factor;
        bar.split_factor = 1.0;
    }
    return out;
}

PriceSeries filter_date_range(const PriceSeries& series, Date start, Date end) {
    if (end < start)
        throw ArgumentError("date range start " + start.str() + " is after end " +
                            end.str());
    PriceSeries out;
    out.ticker = series.ticker;
    for (const PriceBar& bar : series.bars)
        if (start <= bar.date && bar.date <= end) out.bars.push_back(bar);
    for (const Date& d : series.dropped_dates)
        if (start <= d && d <= end) out.dropped_dates.push_back(d);
    return out;
}

}  // namespace sesstat
