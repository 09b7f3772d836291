#include "sesstat/xcorr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

namespace sesstat {

namespace {

// Population Pearson coefficient over m pairs, clamped to [-1, 1].
// Accepts m >= 2 so that minimum-size cohort subsets stay computable; the
// public pearson() adds its own >= 3 gate.
double pearson_at(const double* x, const double* y, std::size_t m) {
    if (m < 2) throw InsufficientDataError("pearson: need at least 2 pairs");
    // A constant input has zero variance by definition; catch it before the
    // mean subtraction can leave rounding dust in the moment sums.
    if (std::equal(x + 1, x + m, x) || std::equal(y + 1, y + m, y)) {
        throw DegenerateError("pearson: zero variance input");
    }
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mean_x += x[i];
        mean_y += y[i];
    }
    mean_x /= static_cast<double>(m);
    mean_y /= static_cast<double>(m);
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) {
        throw DegenerateError("pearson: zero variance input");
    }
    const double c = sxy / std::sqrt(sxx * syy);
    return std::clamp(c, -1.0, 1.0);
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) /
           static_cast<double>(v.size());
}

// Population standard deviation.
double stddev_of(const std::vector<double>& v, double mean) {
    if (v.empty()) return 0.0;
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace

int LagCorrelogram::argmax_lag() const {
    if (values.empty()) throw ArgumentError("argmax_lag: empty correlogram");
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (std::fabs(values[i]) > std::fabs(values[best])) best = i;
    }
    return lags[best];
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) {
        throw ArgumentError("pearson: length mismatch");
    }
    if (x.size() < 3) {
        throw InsufficientDataError("pearson: need at least 3 pairs");
    }
    return pearson_at(x.data(), y.data(), x.size());
}

LagCorrelogram lagged_xcorr(const std::vector<double>& x,
                            const std::vector<double>& y, int max_lag) {
    if (max_lag < 1) throw ArgumentError("lagged_xcorr: max_lag must be >= 1");
    if (x.size() != y.size()) {
        throw ArgumentError("lagged_xcorr: length mismatch");
    }
    const std::size_t n = x.size();
    const std::size_t min_len = 2 * static_cast<std::size_t>(max_lag) + 10;
    if (n <= min_len) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "lagged_xcorr: need more than %zu entries, got %zu",
                      min_len, n);
        throw InsufficientDataError(buf);
    }

    LagCorrelogram out;
    out.lags.reserve(2 * static_cast<std::size_t>(max_lag) + 1);
    out.values.reserve(2 * static_cast<std::size_t>(max_lag) + 1);
    for (int dt = -max_lag; dt <= max_lag; ++dt) {
        // Pairs (x(t), y(t + dt)) over the overlapping index range.
        const std::size_t k = static_cast<std::size_t>(dt < 0 ? -dt : dt);
        const std::size_t m = n - k;
        const double* xs = dt < 0 ? x.data() + k : x.data();
        const double* ys = dt < 0 ? y.data() : y.data() + k;
        out.lags.push_back(dt);
        out.values.push_back(pearson_at(xs, ys, m));
    }

    out.c_zero = out.values[static_cast<std::size_t>(max_lag)];
    out.n_overlap = n;

    std::vector<double> off;
    off.reserve(2 * static_cast<std::size_t>(max_lag));
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        if (out.lags[i] != 0) off.push_back(out.values[i]);
    }
    out.noise_sigma = stddev_of(off, mean_of(off));
    return out;
}

double significance_ratio(const LagCorrelogram& correlogram) {
    if (!(correlogram.noise_sigma > 0.0)) {
        throw DegenerateError("significance_ratio: zero noise floor");
    }
    return std::fabs(correlogram.c_zero) / correlogram.noise_sigma;
}

bool significant(const LagCorrelogram& correlogram, double threshold) {
    return significance_ratio(correlogram) > threshold;
}

ReturnPairXcorr return_pair_analysis(const SessionReturns& returns,
                                     int max_lag, bool exclude_gaps) {
    const SessionReturns* use = &returns;
    SessionReturns filtered;
    if (exclude_gaps) {
        filtered = exclude_gap_entries(returns);
        use = &filtered;
    }
    if (use->size() <= 50) {
        throw InsufficientDataError(
            "return_pair_analysis: need more than 50 entries");
    }
    ReturnPairXcorr out;
    out.total_overnight = lagged_xcorr(use->r_total, use->r_overnight, max_lag);
    out.total_daytime = lagged_xcorr(use->r_total, use->r_daytime, max_lag);
    out.overnight_daytime =
        lagged_xcorr(use->r_overnight, use->r_daytime, max_lag);
    return out;
}

YearlyXcorr yearly_xcorr(const SessionReturns& returns, Kind kind_a,
                         Kind kind_b, std::size_t min_days) {
    if (min_days < 3) throw ArgumentError("yearly_xcorr: min_days too small");
    if (returns.size() != returns.dates.size()) {
        throw ArgumentError("yearly_xcorr: dates out of sync with returns");
    }
    const std::vector<double>& a = returns.by_kind(kind_a);
    const std::vector<double>& b = returns.by_kind(kind_b);

    std::map<int, std::vector<std::size_t>> by_year;
    for (std::size_t i = 0; i < returns.dates.size(); ++i) {
        by_year[returns.dates[i].year].push_back(i);
    }

    YearlyXcorr out;
    out.kind_a = kind_a;
    out.kind_b = kind_b;
    for (const auto& [year, idx] : by_year) {
        if (idx.size() < min_days) {
            out.omitted_years.push_back(year);
            continue;
        }
        std::vector<double> ya(idx.size());
        std::vector<double> yb(idx.size());
        for (std::size_t j = 0; j < idx.size(); ++j) {
            ya[j] = a[idx[j]];
            yb[j] = b[idx[j]];
        }
        out.years.push_back(year);
        out.values.push_back(pearson(ya, yb));
        out.counts.push_back(idx.size());
    }
    if (out.years.empty()) {
        throw InsufficientDataError("yearly_xcorr: no year reaches the floor");
    }
    out.global_c = pearson(a, b);
    return out;
}

CohortSummary cohort_alpha_xcorr(const std::vector<double>& alpha_a,
                                 const std::vector<double>& alpha_b,
                                 std::size_t subsets, std::uint64_t seed,
                                 std::string measure) {
    if (alpha_a.size() != alpha_b.size()) {
        throw ArgumentError("cohort_alpha_xcorr: length mismatch");
    }
    if (subsets == 0) {
        throw ArgumentError("cohort_alpha_xcorr: subsets must be >= 1");
    }
    const std::size_t n = alpha_a.size();
    if (n < 2 * subsets) {
        throw InsufficientDataError(
            "cohort_alpha_xcorr: need at least two stocks per subset");
    }

    CohortSummary out;
    out.measure = std::move(measure);
    out.seed = seed;
    out.subset_count = subsets;

    // Contiguous equal-size runs; the first n % subsets runs take the
    // remainder, one extra stock each.
    const std::size_t base = n / subsets;
    const std::size_t extra = n % subsets;
    std::size_t cursor = 0;
    for (std::size_t s = 0; s < subsets; ++s) {
        const std::size_t len = base + (s < extra ? 1 : 0);
        out.subset_values.push_back(
            pearson_at(alpha_a.data() + cursor, alpha_b.data() + cursor, len));
        cursor += len;
    }
    out.mean = mean_of(out.subset_values);
    out.stddev = stddev_of(out.subset_values, out.mean);

    // Baseline: correlate against a seeded Fisher-Yates permutation of one
    // vector, over the full cohort.
    std::vector<double> shuffled = alpha_b;
    Rng rng(seed);
    for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
        const std::size_t j = rng.below(i + 1);
        std::swap(shuffled[i], shuffled[j]);
    }
    out.shuffled_baseline = pearson_at(alpha_a.data(), shuffled.data(), n);
    return out;
}

CohortSummary bin_tendency(const std::vector<double>& x,
                           const std::vector<double>& y, std::size_t bins,
                           std::string measure) {
    if (x.size() != y.size()) {
        throw ArgumentError("bin_tendency: length mismatch");
    }
    if (x.empty()) throw ArgumentError("bin_tendency: empty input");
    if (bins == 0) throw ArgumentError("bin_tendency: bins must be >= 1");

    const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
    const double x_lo = *lo_it;
    const double x_hi = *hi_it;

    struct Work {
        double lo, hi;
        std::vector<double> ys;
        bool merged = false;
    };
    std::vector<Work> work;
    if (x_lo == x_hi) {
        // Degenerate range: one bin holding everything.
        work.push_back({x_lo, x_hi, y, false});
    } else {
        const double width = (x_hi - x_lo) / static_cast<double>(bins);
        work.resize(bins);
        for (std::size_t i = 0; i < bins; ++i) {
            work[i].lo = x_lo + static_cast<double>(i) * width;
            work[i].hi = x_lo + static_cast<double>(i + 1) * width;
        }
        work.back().hi = x_hi;
        for (std::size_t i = 0; i < x.size(); ++i) {
            auto idx = static_cast<std::size_t>((x[i] - x_lo) / width);
            if (idx >= bins) idx = bins - 1;
            work[idx].ys.push_back(y[i]);
        }
    }

    // Merge undersized bins rightward; a trailing undersized bin merges into
    // its left neighbor. A single remaining bin stays whatever its count.
    constexpr std::size_t kMinPoints = 5;
    std::size_t i = 0;
    while (work.size() > 1 && i < work.size() - 1) {
        if (work[i].ys.size() < kMinPoints) {
            work[i + 1].lo = work[i].lo;
            work[i + 1].ys.insert(work[i + 1].ys.end(), work[i].ys.begin(),
                                  work[i].ys.end());
            work[i + 1].merged = true;
            work.erase(work.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            ++i;
        }
    }
    if (work.size() > 1 && work.back().ys.size() < kMinPoints) {
        Work& prev = work[work.size() - 2];
        prev.hi = work.back().hi;
        prev.ys.insert(prev.ys.end(), work.back().ys.begin(),
                       work.back().ys.end());
        prev.merged = true;
        work.pop_back();
    }

    CohortSummary out;
    out.measure = std::move(measure);
    out.subset_count = work.size();
    for (const Work& w : work) {
        BinStat stat;
        stat.lo = w.lo;
        stat.hi = w.hi;
        stat.count = w.ys.size();
        stat.mean = mean_of(w.ys);
        stat.stddev = stddev_of(w.ys, stat.mean);
        stat.merged = w.merged;
        out.bins.push_back(stat);
    }
    out.mean = mean_of(y);
    out.stddev = stddev_of(y, out.mean);
    return out;
}

}  // namespace sesstat
