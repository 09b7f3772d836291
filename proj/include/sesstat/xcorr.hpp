#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sesstat/common.hpp"
#include "sesstat/session_returns.hpp"

namespace sesstat {

// Lagged cross-correlation record: values[i] = corr(x(t), y(t + lags[i]))
// computed over the overlapping index range with moments recomputed on the
// overlap, so every entry is a valid Pearson coefficient in [-1, 1].
struct LagCorrelogram {
    std::vector<int> lags;       // -L..L inclusive, length 2L+1
    std::vector<double> values;  // correlation at each lag
    double c_zero = 0.0;         // entry at lag 0, equals pearson(x, y)
    double noise_sigma = 0.0;    // population std of the 2L off-zero entries
    std::size_t n_overlap = 0;   // pairs used at lag 0

    // Lag with the largest |value|; earliest (most negative) lag wins ties.
    int argmax_lag() const;
};

// One output bin of bin_tendency: y-statistics of the points whose x falls
// in [lo, hi). The last bin is closed on the right.
struct BinStat {
    double lo = 0.0;
    double hi = 0.0;
    double mean = 0.0;    // mean of y in the bin
    double stddev = 0.0;  // population std of y in the bin
    std::size_t count = 0;
    bool merged = false;  // absorbed an undersized neighbor
};

// Aggregate over a cohort of per-stock measures. Subset-style summaries
// (cohort_xcorr) fill subset_values / shuffled_baseline / seed; bin-style
// summaries (bin_tendency) fill bins. mean / stddev summarize subset_values
// in the former and all of y in the latter.
struct CohortSummary {
    std::string measure;
    std::vector<double> subset_values;  // per-subset correlation
    double mean = 0.0;
    double stddev = 0.0;  // population std
    std::optional<double> shuffled_baseline;  // pearson after seeded shuffle
    std::uint64_t seed = 0;
    std::size_t subset_count = 0;
    std::vector<BinStat> bins;
};

// Per-calendar-year correlation between two return kinds of one stock.
struct YearlyXcorr {
    Kind kind_a = Kind::total;
    Kind kind_b = Kind::total;
    std::vector<int> years;            // qualifying years, ascending
    std::vector<double> values;        // per-year correlation
    std::vector<std::size_t> counts;   // per-year pair count
    std::vector<int> omitted_years;    // present but under the day floor
    double global_c = 0.0;             // correlation over the whole series
};

// The three pairwise correlograms of one stock's return components.
struct ReturnPairXcorr {
    LagCorrelogram total_overnight;
    LagCorrelogram total_daytime;
    LagCorrelogram overnight_daytime;
};

// Pearson correlation with population (1/n) moments, clamped to [-1, 1].
// Requires equal lengths >= 3; zero variance in either input is degenerate.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

// Correlogram over lags -max_lag..max_lag. Requires equal lengths
// > 2 * max_lag + 10 and max_lag >= 1.
LagCorrelogram lagged_xcorr(const std::vector<double>& x,
                            const std::vector<double>& y, int max_lag = 20);

// |c_zero| / noise_sigma. Throws DegenerateError when noise_sigma is zero.
double significance_ratio(const LagCorrelogram& correlogram);

// True when the significance ratio exceeds the threshold.
bool significant(const LagCorrelogram& correlogram, double threshold = 3.0);

// Correlograms for (total, overnight), (total, daytime) and
// (overnight, daytime). Requires more than 50 entries (after the optional
// removal of gap-flagged entries).
ReturnPairXcorr return_pair_analysis(const SessionReturns& returns,
                                     int max_lag = 20,
                                     bool exclude_gaps = false);

// Per-calendar-year pearson between two return kinds. Years with fewer than
// min_days entries are omitted and listed; no qualifying year is an error.
YearlyXcorr yearly_xcorr(const SessionReturns& returns, Kind kind_a,
                         Kind kind_b, std::size_t min_days = 50);

// Splits two equally ordered per-stock vectors into `subsets` contiguous
// runs (remainder spread over the first runs), correlates each run, and
// reports mean +/- std over runs plus a seeded shuffled-pair baseline.
// Requires equal lengths >= 2 * subsets.
CohortSummary cohort_alpha_xcorr(const std::vector<double>& alpha_a,
                                 const std::vector<double>& alpha_b,
                                 std::size_t subsets = 10,
                                 std::uint64_t seed = 0,
                                 std::string measure = "");

// Equal-width bins over the range of x; reports per-bin mean and population
// std of y. Bins with fewer than 5 points are merged into their right
// neighbor (the trailing bin merges left) and flagged.
CohortSummary bin_tendency(const std::vector<double>& x,
                           const std::vector<double>& y, std::size_t bins = 8,
                           std::string measure = "");

}  // namespace sesstat
