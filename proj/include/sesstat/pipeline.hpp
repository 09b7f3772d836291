#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sesstat/common.hpp"
#include "sesstat/dfa.hpp"
#include "sesstat/market_data.hpp"
#include "sesstat/session_returns.hpp"
#include "sesstat/tail_fit.hpp"
#include "sesstat/xcorr.hpp"

namespace sesstat {

// Everything one analysis run needs; mirrors the CLI flags and the config
// file one to one. An empty out_dir means analyze without writing files.
struct PipelineConfig {
    std::vector<std::string> inputs;  // price CSV paths
    std::optional<Date> from;         // closed date range, either side open
    std::optional<Date> to;
    double tail_fraction = 0.10;
    double significance = 0.01;
    std::optional<double> cv_coefficient;  // required off the 1% level
    bool scan_xmin = false;
    int dfa_order = 1;
    int dfa_points = 30;
    int max_lag = 20;
    std::size_t subsets = 10;
    std::size_t bins = 8;
    double hist_bin_width = 0.02;
    std::uint64_t seed = 42;
    std::string out_dir;
    bool exclude_gaps = false;  // drop gap-flagged entries before analysis
    std::optional<std::string> dump_returns_dir;
    std::optional<std::string> dump_dfa_dir;
    unsigned jobs = 1;
};

// Throws ArgumentError on out-of-domain parameters or unreadable inputs.
void validate_config(const PipelineConfig& config);

// One isolated failure, attributed to a ticker; aggregation-time checks use
// the pseudo-ticker "<cohort>".
struct StageError {
    std::string ticker;
    std::string stage;
    std::string message;
};

// Tail stage of one volatility kind: the shared selected sample plus all
// three family fits on it.
struct TailStage {
    double x_min = 0.0;
    std::size_t n_tail = 0;
    FamilyComparison families;
};

// The three return-pair names, in the fixed order used everywhere:
// (total, overnight), (total, daytime), (overnight, daytime).
inline constexpr std::array<std::string_view, 3> kPairNames = {
    "total_overnight", "total_daytime", "overnight_daytime"};
inline constexpr std::array<std::array<Kind, 2>, 3> kPairKinds = {{
    {Kind::total, Kind::overnight},
    {Kind::total, Kind::daytime},
    {Kind::overnight, Kind::daytime},
}};

// Everything measured on one stock. Stages that failed leave their optional
// empty; the failure itself lands in the run's error list.
struct StockRecord {
    std::string ticker;
    std::size_t n_bars = 0;         // bars after adjustment and filtering
    std::size_t n_returns = 0;      // return entries analyzed
    std::size_t n_gap_entries = 0;  // gap-flagged entries before exclusion
    std::array<std::optional<TailStage>, 3> tails;  // by Kind, volatilities
    std::optional<StockDfa> dfa;
    std::optional<ReturnPairXcorr> xcorr;
    std::array<std::optional<YearlyXcorr>, 3> yearly;  // by pair
};

// Accepted-fit counts per (volatility kind, family), Table-1 style, plus
// the per-kind overlap with the power law.
struct GoodFitTable {
    std::array<std::size_t, 3> stocks_with_tail{};           // by Kind
    std::array<std::array<std::size_t, 3>, 3> records{};     // [kind][family]
    std::array<std::array<std::size_t, 3>, 3> accepted{};    // [kind][family]
    // Records accepted by both this family and the power law.
    std::array<std::array<std::size_t, 3>, 3> accepted_also_power_law{};
};

// Density histogram: heights integrate to 1 over the covered range.
struct Histogram {
    std::vector<double> bin_lo;
    std::vector<double> bin_hi;
    std::vector<std::size_t> counts;
    std::vector<double> heights;  // count / (n * bin_width)
    double bin_width = 0.0;
    std::size_t n = 0;
    double mean = 0.0;    // moment-based overlay parameters
    double stddev = 0.0;  // population
};

// Cohort ensemble of one scaling-exponent measure with its histogram.
struct AlphaHistogram {
    std::string name;
    std::vector<double> values;  // ticker order
    Histogram hist;              // empty (n = 0) when no stock qualified
};

// Scatter plus equal-width binning of one tail-exponent pair across stocks.
struct ZetaTendency {
    std::string pair;
    std::vector<double> x;  // exponent of the total volatility tail
    std::vector<double> y;  // exponent of the session volatility tail
    std::optional<CohortSummary> binned;
};

// Distribution of one pair's zero-lag correlation across the cohort.
struct XcorrDist {
    std::string pair;
    std::vector<double> values;  // c_zero per stock, ticker order
    Histogram hist;
    double mean = 0.0;
    double stddev = 0.0;  // population
    std::size_t n_significant = 0;
};

// One subset-correlation row over two per-stock exponent vectors.
struct AlphaXcorrRow {
    std::string measure;
    std::size_t n = 0;  // stocks with both measures
    std::optional<CohortSummary> summary;
    std::string error;  // set when the row could not be computed
};

// Cross-stock mean and spread of the yearly correlations, per pair.
struct YearlyAggregate {
    int year = 0;
    std::array<double, 3> mean{};
    std::array<double, 3> stddev{};  // population
    std::array<std::size_t, 3> n_stocks{};
};

struct CohortReport {
    std::string version;
    PipelineConfig config;
    std::size_t n_stocks_input = 0;     // tickers parsed from the inputs
    std::size_t n_stocks_analyzed = 0;  // tickers with a StockRecord
    std::vector<StockRecord> stocks;    // ticker-ascending
    std::vector<StageError> errors;
    std::vector<std::string> parse_issues;  // skipped input rows
    GoodFitTable good_fit;
    std::vector<AlphaHistogram> alpha_hists;
    std::vector<ZetaTendency> zeta_tendencies;
    std::vector<XcorrDist> xcorr_dists;
    std::vector<AlphaXcorrRow> table2;
    std::vector<YearlyAggregate> yearly;
};

// Input stage result: adjusted, date-filtered, validated series by ticker.
struct LoadedCohort {
    std::map<std::string, PriceSeries> series;
    std::size_t n_parsed = 0;               // tickers seen in the inputs
    std::vector<std::string> parse_issues;  // skipped rows, per file and line
    std::vector<StageError> errors;         // tickers the date filter emptied
};

// Parse, split-adjust, date-filter and validate all inputs. Throws on
// unreadable files, malformed CSV, a ticker spanning two files, or a cohort
// left empty.
LoadedCohort load_cohort(const PipelineConfig& config);

// Density histogram over equal-width bins spanning [min, max]; an all-equal
// sample collapses to a single bin of height 1 / bin_width.
Histogram histogram_pdf(const std::vector<double>& values, double bin_width);

// Accepted-fit counts over every recorded tail fit.
GoodFitTable good_fit_table(const std::vector<StockRecord>& stocks);

// The full run: ingest, per-stock analysis (optionally in parallel),
// deterministic ticker-ordered aggregation. Per-stock failures land in
// errors; only configuration and IO problems throw.
CohortReport run_pipeline(const PipelineConfig& config);

}  // namespace sesstat
