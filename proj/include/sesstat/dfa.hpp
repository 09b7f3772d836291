#pragma once

#include <array>
#include <optional>
#include <vector>

#include "sesstat/session_returns.hpp"

namespace sesstat {

// Fluctuation function F(l) sampled on a log-spaced grid of box sizes.
struct DfaCurve {
    std::vector<int> scales;           // strictly increasing, within [l_min, N/4]
    std::vector<double> fluctuations;  // F(l) >= 0, same units as the input
    int detrend_order = 1;
    std::size_t series_length = 0;
};

// One log-log OLS fit over a scale range of a DfaCurve.
struct AlphaFit {
    double alpha = 0.0;         // slope of log10 F vs log10 l
    double rms_residual = 0.0;  // RMS of the log10 fit residuals
    int l_lo = 0;               // actual fitted scale endpoints
    int l_hi = 0;
    std::size_t n_points = 0;
};

// Scaling exponents of one series: either a single regime over the whole
// grid, or short/long regimes split at the geometric midpoint scale.
// fell_back is set when a two-regime fit had too few points in one half
// and degraded to a single fit.
struct DfaExponents {
    std::optional<AlphaFit> single;
    std::optional<AlphaFit> short_scale;
    std::optional<AlphaFit> long_scale;
    std::optional<double> crossover_scale;
    bool fell_back = false;
};

// y(i) = sum_{k<=i} (x_k - mean(x)); compensated summation keeps the
// telescoping last element near zero. Throws below 4 samples.
std::vector<double> profile(const std::vector<double>& series);

// RMS detrended fluctuation of a precomputed profile at one box size.
// Boxes: floor(N/l) from the start and floor(N/l) from the end; each box is
// detrended by a least-squares polynomial of the given degree. Scale must
// satisfy order+2 <= l <= N/4.
double fluctuation_at_scale(const std::vector<double>& prof, int scale, int order);

// F(l) on `points` log-spaced distinct integer scales in
// [max(2(order+2), 6), N/4]. Requires N >= 100.
DfaCurve dfa_curve(const std::vector<double>& series, int order = 1, int points = 30);

// OLS of log10 F on log10 l over scales in [l_lo, l_hi]. Needs >= 4 points
// in range; any F = 0 in range means the signal was a pure polynomial trend
// and raises DegenerateError. No constraint is placed on the slope here;
// regime fits below enforce the (0, 1.5) exponent range.
AlphaFit fit_alpha(const DfaCurve& curve, int l_lo, int l_hi);
AlphaFit fit_alpha(const DfaCurve& curve);  // full scale range

// Whole-grid fit packaged as exponents; alpha outside (0, 1.5) raises
// DegenerateError.
DfaExponents single_regime_fit(const DfaCurve& curve);

// Splits the grid at the geometric midpoint sqrt(l_min*l_max) and fits each
// half (boundary scale included in both). Needs >= 8 points; falls back to
// a flagged single fit when either half has fewer than 4.
DfaExponents two_regime_fit(const DfaCurve& curve);

// Per-kind DFA of one stock: returns get a single-regime fit, volatilities
// a two-regime fit. Failures are captured per kind, not propagated.
struct KindDfa {
    std::optional<DfaCurve> curve;
    std::optional<DfaExponents> exponents;
    std::string error;  // empty on success
};

struct StockDfa {
    std::string ticker;
    std::array<KindDfa, 3> returns;       // indexed by static_cast<size_t>(Kind)
    std::array<KindDfa, 3> volatilities;
};

StockDfa analyze_stock_dfa(const SessionReturns& rets, int order = 1, int points = 30);

}  // namespace sesstat
