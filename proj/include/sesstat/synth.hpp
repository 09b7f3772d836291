#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sesstat/market_data.hpp"

namespace sesstat {

// Synthetic daily-bar stock. price0 acts as the close of the (virtual) day
// before the first bar, so every generated day draws a full (r_N, r_D) pair.
// When heavy_tail_zeta is set, each day's Gaussian pair is multiplied by one
// shared Pareto amplitude (x_min = 1), which fattens the volatility tails to
// the given exponent while leaving the session correlation at rho_nd
// (exactly, for zeta > 2 where second moments exist).
struct OhlcSpec {
    std::size_t n_days = 1000;
    double price0 = 50.0;
    double vol_daytime = 0.02;
    double vol_overnight = 0.012;
    double rho_nd = -0.1;
    std::optional<double> heavy_tail_zeta;
    Date start_date{1988, 1, 4};
    std::string ticker = "SYN";
};

// A cohort of stocks with per-stock jitter: lengths uniform in
// [min_days, max_days], session vols scaled by independent uniform(0.8, 1.2)
// factors, rho_nd shifted by uniform(-0.05, 0.05) and clamped to [-1, 1].
// Tickers are base.ticker + zero-padded index.
struct CohortSpec {
    std::size_t n_stocks = 50;
    std::size_t min_days = 1000;
    std::size_t max_days = 5000;
    OhlcSpec base;
};

// x = x_min * u^(-1/zeta): survival (x/x_min)^(-zeta) on [x_min, inf).
std::vector<double> gen_pareto(std::size_t n, double zeta, double x_min,
                               std::uint64_t seed);

// x = x_min - x_star * ln(u): survival e^(-(x-x_min)/x_star).
std::vector<double> gen_exponential(std::size_t n, double x_star, double x_min,
                                    std::uint64_t seed);

// Survival (x/x_min)^(-zeta) * e^(-(x-x_min)/x_star), sampled by inverting
// the survival function with bisection (zeta >= 0, x_star > 0).
std::vector<double> gen_cutoff(std::size_t n, double zeta, double x_star,
                               double x_min, std::uint64_t seed);

// Zero-mean unit-variance series whose detrended-fluctuation exponent is
// alpha_target, built by Fourier filtering: white Gaussian spectrum shaped
// by k^(-beta/2) with beta = 2*alpha_target - 1 (power spectrum f^(-beta)),
// DC removed, inverse-transformed on a power-of-two grid >= max(n, 1024),
// truncated to n, then standardized exactly. alpha_target in (0.05, 0.95),
// n >= 2.
std::vector<double> gen_long_memory(std::size_t n, double alpha_target,
                                    std::uint64_t seed);

// x iid standard Gaussian, y = rho*x + sqrt(1-rho^2)*z. rho = 1 gives y = x
// bitwise.
std::pair<std::vector<double>, std::vector<double>> gen_correlated_pair(
    std::size_t n, double rho, std::uint64_t seed);

PriceSeries gen_ohlc_stock(const OhlcSpec& spec, std::uint64_t seed);

std::vector<PriceSeries> gen_cohort(const CohortSpec& spec, std::uint64_t seed);

// CLI-facing description of one generation request; the seed is recorded in
// every output sidecar so runs can be reproduced bit for bit.
enum class GenKind {
    pareto,
    exponential,
    cutoff,
    long_memory,
    correlated_pair,
    ohlc_stock,
    cohort,
};

std::string_view to_string(GenKind kind);
GenKind gen_kind_from_string(std::string_view name);

struct GeneratorSpec {
    GenKind kind = GenKind::cohort;
    std::uint64_t seed = 42;
    std::size_t n = 1000;  // sample count (tail/long-memory/pair kinds)
    double zeta = 3.0;
    double x_min = 1.0;
    double x_star = 1.0;
    double alpha_target = 0.63;
    double rho = 0.0;
    OhlcSpec ohlc;
    CohortSpec cohort;
};

// Exactly one member is filled, matching spec.kind.
struct GenOutput {
    std::vector<double> samples;
    std::pair<std::vector<double>, std::vector<double>> sample_pair;
    std::vector<PriceSeries> series;
};

GenOutput run_generator(const GeneratorSpec& spec);

}  // namespace sesstat
