#include "sesstat/dfa.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sesstat {

namespace {

double kahan_sum(const std::vector<double>& xs) {
    double sum = 0.0, comp = 0.0;
    for (double x : xs) {
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

// Solves the small SPD system G c = b in place by Gaussian elimination with
// partial pivoting; dimensions here never exceed order+1 <= 11.
void solve_dense(std::vector<double> g, std::vector<double>& b, int n) {
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(g[r * n + col]) > std::fabs(g[pivot * n + col])) pivot = r;
        if (pivot != col) {
            for (int c = 0; c < n; ++c) std::swap(g[col * n + c], g[pivot * n + c]);
            std::swap(b[col], b[pivot]);
        }
        const double diag = g[col * n + col];
        for (int r = col + 1; r < n; ++r) {
            const double f = g[r * n + col] / diag;
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) g[r * n + c] -= f * g[col * n + c];
            b[r] -= f * b[col];
        }
    }
    for (int row = n - 1; row >= 0; --row) {
        double acc = b[row];
        for (int c = row + 1; c < n; ++c) acc -= g[row * n + c] * b[c];
        b[row] = acc / g[row * n + row];
    }
}

// Least-squares detrending machinery for one box size: powers of the scaled
// abscissa u_j = 2j/(l-1) - 1 and the Gram matrix of the monomial basis.
struct BoxBasis {
    int scale;
    int dim;                       // order + 1
    std::vector<double> powers;    // scale x dim, row-major
    std::vector<double> gram;      // dim x dim

    BoxBasis(int l, int order) : scale(l), dim(order + 1), powers(l * dim), gram(dim * dim, 0.0) {
        for (int j = 0; j < l; ++j) {
            const double u = l > 1 ? 2.0 * j / (l - 1) - 1.0 : 0.0;
            double p = 1.0;
            for (int k = 0; k < dim; ++k) {
                powers[j * dim + k] = p;
                p *= u;
            }
        }
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) {
                double acc = 0.0;
                for (int j = 0; j < l; ++j)
                    acc += powers[j * dim + a] * powers[j * dim + b];
                gram[a * dim + b] = acc;
            }
    }

    // Sum of squared residuals of the best-fit polynomial over one box.
    double residual_sq(const double* y) const {
        std::vector<double> rhs(dim, 0.0);
        for (int j = 0; j < scale; ++j)
            for (int k = 0; k < dim; ++k) rhs[k] += powers[j * dim + k] * y[j];
        solve_dense(gram, rhs, dim);
        double acc = 0.0;
        for (int j = 0; j < scale; ++j) {
            double fit = 0.0;
            for (int k = 0; k < dim; ++k) fit += rhs[k] * powers[j * dim + k];
            const double r = y[j] - fit;
            acc += r * r;
        }
        return acc;
    }
};

struct LogLogFit {
    double slope;
    double rms;
};

LogLogFit ols_loglog(const std::vector<double>& lx, const std::vector<double>& ly) {
    const std::size_t n = lx.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (intercept + slope * lx[i]);
        rss += r * r;
    }
    return {slope, std::sqrt(rss / static_cast<double>(n))};
}

void check_alpha_range(const AlphaFit& fit, const char* which) {
    if (!(fit.alpha > 0.0 && fit.alpha < 1.5))
        throw DegenerateError(std::string("fitted ") + which + " exponent " +
                              std::to_string(fit.alpha) + " outside (0, 1.5)");
}

}  // namespace

std::vector<double> profile(const std::vector<double>& series) {
    if (series.size() < 4)
        throw InsufficientDataError("profile needs at least 4 samples, have " +
                                    std::to_string(series.size()));
    const double mean = kahan_sum(series) / static_cast<double>(series.size());
    std::vector<double> out;
    out.reserve(series.size());
    double sum = 0.0, comp = 0.0;
    for (double x : series) {
        const double y = (x - mean) - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        out.push_back(sum);
    }
    return out;
}

double fluctuation_at_scale(const std::vector<double>& prof, int scale, int order) {
    if (order < 1) throw ArgumentError("detrend order must be at least 1");
    const std::size_t n = prof.size();
    if (scale < order + 2)
        throw ArgumentError("scale " + std::to_string(scale) +
                            " too small for detrend order " + std::to_string(order));
    if (static_cast<std::size_t>(scale) > n / 4)
        throw ArgumentError("scale " + std::to_string(scale) + " exceeds N/4 = " +
                            std::to_string(n / 4));

    const std::size_t l = static_cast<std::size_t>(scale);
    const std::size_t boxes = n / l;
    const BoxBasis basis(scale, order);
    double acc = 0.0;
    for (std::size_t b = 0; b < boxes; ++b)
        acc += basis.residual_sq(prof.data() + b * l);
    for (std::size_t b = 0; b < boxes; ++b)
        acc += basis.residual_sq(prof.data() + (n - (b + 1) * l));
    return std::sqrt(acc / static_cast<double>(2 * boxes * l));
}

DfaCurve dfa_curve(const std::vector<double>& series, int order, int points) {
    if (order < 1) throw ArgumentError("detrend order must be at least 1");
    if (points < 2) throw ArgumentError("scale grid needs at least 2 points");
    const std::size_t n = series.size();
    if (n < 100)
        throw InsufficientDataError("dfa needs at least 100 samples, have " +
                                    std::to_string(n));
    const int lo = std::max(2 * (order + 2), 6);
    const int hi = static_cast<int>(n / 4);
    if (hi < lo)
        throw InsufficientDataError("series too short for detrend order " +
                                    std::to_string(order));

    std::vector<int> scales;
    const double llo = std::log10(static_cast<double>(lo));
    const double lhi = std::log10(static_cast<double>(hi));
    for (int i = 0; i < points; ++i) {
        const double f = points > 1 ? static_cast<double>(i) / (points - 1) : 0.0;
        int s = static_cast<int>(std::lround(std::pow(10.0, llo + f * (lhi - llo))));
        s = std::clamp(s, lo, hi);
        if (scales.empty() || s > scales.back()) scales.push_back(s);
    }

    const std::vector<double> prof = profile(series);
    DfaCurve curve;
    curve.detrend_order = order;
    curve.series_length = n;
    curve.scales = std::move(scales);
    curve.fluctuations.reserve(curve.scales.size());
    for (int s : curve.scales)
        curve.fluctuations.push_back(fluctuation_at_scale(prof, s, order));
    return curve;
}

AlphaFit fit_alpha(const DfaCurve& curve, int l_lo, int l_hi) {
    std::vector<double> lx, ly;
    int seen_lo = 0, seen_hi = 0;
    for (std::size_t i = 0; i < curve.scales.size(); ++i) {
        const int s = curve.scales[i];
        if (s < l_lo || s > l_hi) continue;
        const double f = curve.fluctuations[i];
        if (f <= 0.0)
            throw DegenerateError("F(" + std::to_string(s) +
                                  ") = 0: input was a pure polynomial trend");
        if (lx.empty()) seen_lo = s;
        seen_hi = s;
        lx.push_back(std::log10(static_cast<double>(s)));
        ly.push_back(std::log10(f));
    }
    if (lx.size() < 4)
        throw ArgumentError("need at least 4 curve points in [" + std::to_string(l_lo) +
                            ", " + std::to_string(l_hi) + "], have " +
                            std::to_string(lx.size()));
    const LogLogFit fit = ols_loglog(lx, ly);
    return {fit.slope, fit.rms, seen_lo, seen_hi, lx.size()};
}

AlphaFit fit_alpha(const DfaCurve& curve) {
    if (curve.scales.empty()) throw ArgumentError("empty curve");
    return fit_alpha(curve, curve.scales.front(), curve.scales.back());
}

DfaExponents single_regime_fit(const DfaCurve& curve) {
    DfaExponents out;
    out.single = fit_alpha(curve);
    check_alpha_range(*out.single, "single-regime");
    return out;
}

DfaExponents two_regime_fit(const DfaCurve& curve) {
    if (curve.scales.size() < 8)
        throw InsufficientDataError("two-regime fit needs at least 8 curve points, have " +
                                    std::to_string(curve.scales.size()));
    const double l_min = curve.scales.front();
    const double l_max = curve.scales.back();
    const double split = std::sqrt(l_min * l_max);

    std::size_t n_low = 0, n_high = 0;
    for (int s : curve.scales) {
        if (s <= split) ++n_low;
        if (s >= split) ++n_high;
    }
    DfaExponents out;
    if (n_low < 4 || n_high < 4) {
        out.single = fit_alpha(curve);
        out.fell_back = true;
        check_alpha_range(*out.single, "single-regime");
        return out;
    }
    out.short_scale = fit_alpha(curve, curve.scales.front(),
                                static_cast<int>(std::floor(split)));
    out.long_scale = fit_alpha(curve, static_cast<int>(std::ceil(split)),
                               curve.scales.back());
    out.crossover_scale = split;
    check_alpha_range(*out.short_scale, "short-scale");
    check_alpha_range(*out.long_scale, "long-scale");
    return out;
}

StockDfa analyze_stock_dfa(const SessionReturns& rets, int order, int points) {
    if (rets.size() < 100)
        throw InsufficientDataError(rets.ticker + ": dfa needs at least 100 returns, have " +
                                    std::to_string(rets.size()));
    StockDfa out;
    out.ticker = rets.ticker;
    for (Kind kind : {Kind::total, Kind::overnight, Kind::daytime}) {
        const auto idx = static_cast<std::size_t>(kind);
        const std::vector<double>& r = rets.by_kind(kind);
        try {
            DfaCurve curve = dfa_curve(r, order, points);
            out.returns[idx].exponents = single_regime_fit(curve);
            out.returns[idx].curve = std::move(curve);
        } catch (const Error& e) {
            out.returns[idx].error = e.what();
        }
        try {
            DfaCurve curve = dfa_curve(volatility(r, kind).values, order, points);
            out.volatilities[idx].exponents = two_regime_fit(curve);
            out.volatilities[idx].curve = std::move(curve);
        } catch (const Error& e) {
            out.volatilities[idx].error = e.what();
        }
    }
    return out;
}

}  // namespace sesstat
