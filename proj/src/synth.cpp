#include "sesstat/synth.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <string>

namespace sesstat {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw ArgumentError(what);
}

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

std::vector<double> gen_pareto(std::size_t n, double zeta, double x_min,
                               std::uint64_t seed) {
    require(n >= 1, "gen_pareto: n must be >= 1");
    require(zeta > 0.0, "gen_pareto: zeta must be > 0");
    require(x_min > 0.0, "gen_pareto: x_min must be > 0");
    Rng rng(seed);
    std::vector<double> out(n);
    for (double& x : out) x = x_min * std::pow(rng.uniform(), -1.0 / zeta);
    return out;
}

std::vector<double> gen_exponential(std::size_t n, double x_star, double x_min,
                                    std::uint64_t seed) {
    require(n >= 1, "gen_exponential: n must be >= 1");
    require(x_star > 0.0, "gen_exponential: x_star must be > 0");
    require(x_min > 0.0, "gen_exponential: x_min must be > 0");
    Rng rng(seed);
    std::vector<double> out(n);
    for (double& x : out) x = x_min - x_star * std::log(rng.uniform());
    return out;
}

std::vector<double> gen_cutoff(std::size_t n, double zeta, double x_star,
                               double x_min, std::uint64_t seed) {
    require(n >= 1, "gen_cutoff: n must be >= 1");
    require(zeta >= 0.0, "gen_cutoff: zeta must be >= 0");
    require(x_star > 0.0, "gen_cutoff: x_star must be > 0");
    require(x_min > 0.0, "gen_cutoff: x_min must be > 0");

    auto survival = [&](double x) {
        return std::pow(x / x_min, -zeta) * std::exp(-(x - x_min) / x_star);
    };
    Rng rng(seed);
    std::vector<double> out(n);
    for (double& x : out) {
        const double u = rng.uniform();
        double lo = x_min;
        double hi = x_min + x_star;
        while (survival(hi) > u) hi = x_min + (hi - x_min) * 2.0;
        // S is continuous and strictly decreasing, so bisection converges.
        while (hi - lo > 1e-12 * std::max(1.0, hi)) {
            const double mid = 0.5 * (lo + hi);
            (survival(mid) > u ? lo : hi) = mid;
        }
        x = 0.5 * (lo + hi);
    }
    return out;
}

std::vector<double> gen_long_memory(std::size_t n, double alpha_target,
                                    std::uint64_t seed) {
    require(n >= 2, "gen_long_memory: n must be >= 2");
    require(alpha_target > 0.05 && alpha_target < 0.95,
            "gen_long_memory: alpha_target must lie in (0.05, 0.95)");

    std::size_t npad = 1024;
    while (npad < n) npad <<= 1;

    double* in = fftw_alloc_real(npad);
    fftw_complex* spec = fftw_alloc_complex(npad / 2 + 1);

    Rng rng(seed);
    for (std::size_t i = 0; i < npad; ++i) in[i] = rng.gaussian();

    fftw_plan fwd, bwd;
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fwd = fftw_plan_dft_r2c_1d(static_cast<int>(npad), in, spec, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_1d(static_cast<int>(npad), spec, in, FFTW_ESTIMATE);
    }
    fftw_execute(fwd);

    // Shape the amplitude spectrum to k^(-beta/2) so power goes as k^(-beta);
    // beta = 2*alpha - 1 makes the detrended-fluctuation exponent alpha.
    const double beta = 2.0 * alpha_target - 1.0;
    spec[0][0] = 0.0;
    spec[0][1] = 0.0;
    for (std::size_t k = 1; k <= npad / 2; ++k) {
        const double gain = std::pow(static_cast<double>(k), -beta / 2.0);
        spec[k][0] *= gain;
        spec[k][1] *= gain;
    }

    fftw_execute(bwd);  // unnormalized: scales by npad

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = in[i] / static_cast<double>(npad);

    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    fftw_free(in);
    fftw_free(spec);

    double mean = 0.0;
    for (double x : out) mean += x;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double x : out) var += (x - mean) * (x - mean);
    var /= static_cast<double>(n);
    if (var == 0.0) throw DegenerateError("gen_long_memory: zero-variance draw");
    const double inv_sd = 1.0 / std::sqrt(var);
    for (double& x : out) x = (x - mean) * inv_sd;
    return out;
}

std::pair<std::vector<double>, std::vector<double>> gen_correlated_pair(
    std::size_t n, double rho, std::uint64_t seed) {
    require(n >= 1, "gen_correlated_pair: n must be >= 1");
    require(rho >= -1.0 && rho <= 1.0, "gen_correlated_pair: rho must lie in [-1, 1]");
    Rng rng(seed);
    std::vector<double> x(n), y(n);
    const double mix = std::sqrt(1.0 - rho * rho);
    for (std::size_t i = 0; i < n; ++i) {
        const double g = rng.gaussian();
        const double z = rng.gaussian();
        x[i] = g;
        y[i] = rho * g + mix * z;
    }
    return {std::move(x), std::move(y)};
}

PriceSeries gen_ohlc_stock(const OhlcSpec& spec, std::uint64_t seed) {
    require(spec.n_days >= 1, "gen_ohlc_stock: n_days must be >= 1");
    require(spec.price0 > 0.0, "gen_ohlc_stock: price0 must be > 0");
    require(spec.vol_daytime >= 0.0 && spec.vol_overnight >= 0.0,
            "gen_ohlc_stock: session vols must be >= 0");
    require(spec.rho_nd >= -1.0 && spec.rho_nd <= 1.0,
            "gen_ohlc_stock: rho_nd must lie in [-1, 1]");
    if (spec.heavy_tail_zeta)
        require(*spec.heavy_tail_zeta > 0.0,
                "gen_ohlc_stock: heavy_tail_zeta must be > 0");

    Rng rng(seed);
    PriceSeries series;
    series.ticker = spec.ticker;
    series.bars.reserve(spec.n_days);

    const double mix = std::sqrt(1.0 - spec.rho_nd * spec.rho_nd);
    double close_prev = spec.price0;
    Date date = spec.start_date;
    for (std::size_t i = 0; i < spec.n_days; ++i) {
        const double g1 = rng.gaussian();
        const double g2 = rng.gaussian();
        double amp = 1.0;
        if (spec.heavy_tail_zeta)
            amp = std::pow(rng.uniform(), -1.0 / *spec.heavy_tail_zeta);
        const double r_n = spec.vol_overnight * g1 * amp;
        const double r_d = spec.vol_daytime * (spec.rho_nd * g1 + mix * g2) * amp;
        const double open = close_prev * std::exp(r_n);
        const double close = open * std::exp(r_d);
        series.bars.push_back({date, open, close, 1.0});
        close_prev = close;
        date = date.next_weekday();
    }
    return series;
}

std::vector<PriceSeries> gen_cohort(const CohortSpec& spec, std::uint64_t seed) {
    require(spec.n_stocks >= 1, "gen_cohort: n_stocks must be >= 1");
    require(spec.min_days >= 2, "gen_cohort: min_days must be >= 2");
    require(spec.min_days <= spec.max_days,
            "gen_cohort: min_days must be <= max_days");

    Rng master(seed);
    std::vector<PriceSeries> out;
    out.reserve(spec.n_stocks);
    for (std::size_t i = 0; i < spec.n_stocks; ++i) {
        OhlcSpec one = spec.base;
        char suffix[16];
        std::snprintf(suffix, sizeof suffix, "%04zu", i + 1);
        one.ticker = spec.base.ticker + suffix;
        one.n_days = spec.min_days + master.below(spec.max_days - spec.min_days + 1);
        one.vol_daytime *= 0.8 + 0.4 * master.uniform();
        one.vol_overnight *= 0.8 + 0.4 * master.uniform();
        one.rho_nd = std::clamp(one.rho_nd + 0.1 * (master.uniform() - 0.5), -1.0, 1.0);
        out.push_back(gen_ohlc_stock(one, master.next_u64()));
    }
    return out;
}

std::string_view to_string(GenKind kind) {
    switch (kind) {
        case GenKind::pareto: return "pareto";
        case GenKind::exponential: return "exponential";
        case GenKind::cutoff: return "cutoff";
        case GenKind::long_memory: return "long_memory";
        case GenKind::correlated_pair: return "correlated_pair";
        case GenKind::ohlc_stock: return "ohlc_stock";
        case GenKind::cohort: return "cohort";
    }
    return "unknown";
}

GenKind gen_kind_from_string(std::string_view name) {
    if (name == "pareto") return GenKind::pareto;
    if (name == "exponential") return GenKind::exponential;
    if (name == "cutoff") return GenKind::cutoff;
    if (name == "long_memory") return GenKind::long_memory;
    if (name == "correlated_pair") return GenKind::correlated_pair;
    if (name == "ohlc_stock") return GenKind::ohlc_stock;
    if (name == "cohort") return GenKind::cohort;
    throw ArgumentError("unknown generator kind '" + std::string(name) + "'");
}

GenOutput run_generator(const GeneratorSpec& spec) {
    GenOutput out;
    switch (spec.kind) {
        case GenKind::pareto:
            out.samples = gen_pareto(spec.n, spec.zeta, spec.x_min, spec.seed);
            break;
        case GenKind::exponential:
            out.samples = gen_exponential(spec.n, spec.x_star, spec.x_min, spec.seed);
            break;
        case GenKind::cutoff:
            out.samples =
                gen_cutoff(spec.n, spec.zeta, spec.x_star, spec.x_min, spec.seed);
            break;
        case GenKind::long_memory:
            out.samples = gen_long_memory(spec.n, spec.alpha_target, spec.seed);
            break;
        case GenKind::correlated_pair:
            out.sample_pair = gen_correlated_pair(spec.n, spec.rho, spec.seed);
            break;
        case GenKind::ohlc_stock:
            out.series.push_back(gen_ohlc_stock(spec.ohlc, spec.seed));
            break;
        case GenKind::cohort:
            out.series = gen_cohort(spec.cohort, spec.seed);
            break;
    }
    return out;
}

}  // namespace sesstat
