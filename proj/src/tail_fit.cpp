#include "sesstat/tail_fit.hpp"

#include <algorithm>
#include <cmath>

namespace sesstat {

namespace {

void check_tail(const TailSample& tail) {
    if (tail.n() < 10)
        throw InsufficientDataError("tail has " + std::to_string(tail.n()) +
                                    " points, need at least 10");
    if (tail.x_min <= 0.0) throw ArgumentError("tail x_min must be > 0");
    for (double x : tail.values)
        if (x < tail.x_min)
            throw ArgumentError("tail value " + std::to_string(x) +
                                " below x_min = " + std::to_string(tail.x_min));
}

TailSample build_tail(std::vector<double> kept, double x_min, Kind kind) {
    std::sort(kept.begin(), kept.end(), std::greater<>());
    if (kept.size() < 10)
        throw InsufficientDataError("tail has " + std::to_string(kept.size()) +
                                    " points, need at least 10");
    TailSample tail;
    tail.values = std::move(kept);
    tail.x_min = x_min;
    tail.source_kind = kind;
    return tail;
}

double cutoff_loglik(const std::vector<double>& values, double x_min, double zeta,
                     double x_star) {
    double acc = 0.0;
    for (double x : values)
        acc += -zeta * std::log(x / x_min) - (x - x_min) / x_star +
               std::log(zeta / x + 1.0 / x_star);
    return acc;
}

}  // namespace

std::string_view to_string(TailFamily family) {
    switch (family) {
        case TailFamily::power_law: return "power_law";
        case TailFamily::exponential: return "exponential";
        case TailFamily::power_law_cutoff: return "power_law_cutoff";
    }
    return "unknown";
}

double TailFit::survival(double x) const {
    double s = 1.0;
    if (zeta) s *= std::pow(x / x_min, -*zeta);
    if (x_star) s *= std::exp(-(x - x_min) / *x_star);
    return s;
}

TailSample select_tail_fraction(const std::vector<double>& values, double q,
                                Kind kind) {
    if (!(q > 0.0 && q <= 1.0)) throw ArgumentError("tail fraction must lie in (0, 1]");
    std::vector<double> positive;
    positive.reserve(values.size());
    for (double v : values)
        if (v > 0.0) positive.push_back(v);
    if (positive.empty())
        throw InsufficientDataError("no positive values to select a tail from");

    std::sort(positive.begin(), positive.end(), std::greater<>());
    const std::size_t k = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(positive.size())));
    const double x_min = positive[k - 1];
    // ties at x_min extend the tail past k
    std::size_t end = k;
    while (end < positive.size() && positive[end] >= x_min) ++end;
    positive.resize(end);
    return build_tail(std::move(positive), x_min, kind);
}

TailSample select_tail_threshold(const std::vector<double>& values, double x_min,
                                 Kind kind) {
    if (x_min <= 0.0) throw ArgumentError("tail x_min must be > 0");
    std::vector<double> kept;
    for (double v : values)
        if (v >= x_min) kept.push_back(v);
    return build_tail(std::move(kept), x_min, kind);
}

TailSample scan_xmin(const std::vector<double>& values, Kind kind,
                     std::size_t min_tail) {
    min_tail = std::max<std::size_t>(min_tail, 10);
    std::vector<double> positive;
    for (double v : values)
        if (v > 0.0) positive.push_back(v);
    if (positive.size() < min_tail)
        throw InsufficientDataError("not enough positive values to scan thresholds");
    std::sort(positive.begin(), positive.end(), std::greater<>());

    std::vector<double> logs(positive.size());
    for (std::size_t i = 0; i < positive.size(); ++i) logs[i] = std::log(positive[i]);
    std::vector<double> log_prefix(positive.size() + 1, 0.0);
    for (std::size_t i = 0; i < positive.size(); ++i)
        log_prefix[i + 1] = log_prefix[i] + logs[i];

    double best_d = 2.0;
    std::size_t best_k = 0;
    // candidate thresholds are the distinct sample values whose tails keep
    // at least min_tail points; k = tail size at that threshold
    for (std::size_t k = min_tail; k <= positive.size(); ++k) {
        if (k < positive.size() && positive[k] == positive[k - 1])
            continue;  // not a distinct threshold: ties must stay inside
        const double t = positive[k - 1];
        const double log_sum = log_prefix[k] - static_cast<double>(k) * std::log(t);
        if (log_sum <= 0.0) continue;  // all candidate values equal t
        const double zeta = static_cast<double>(k) / log_sum;
        double d = 0.0;
        const double n = static_cast<double>(k);
        for (std::size_t i = 0; i < k; ++i) {
            const double model = std::exp(-zeta * (logs[i] - std::log(t)));
            d = std::max(d, std::fabs(model - static_cast<double>(i) / n));
            d = std::max(d, std::fabs(model - static_cast<double>(i + 1) / n));
        }
        if (d < best_d) {
            best_d = d;
            best_k = k;
        }
    }
    if (best_k == 0)
        throw DegenerateError("threshold scan found no usable tail");
    std::vector<double> kept(positive.begin(),
                             positive.begin() + static_cast<long>(best_k));
    return build_tail(std::move(kept), positive[best_k - 1], kind);
}

namespace detail {

double hill_zeta(const std::vector<double>& values, double x_min) {
    double log_sum = 0.0;
    for (double x : values) log_sum += std::log(x / x_min);
    if (log_sum <= 0.0)
        throw DegenerateError("all tail values equal x_min: no slope to estimate");
    return static_cast<double>(values.size()) / log_sum;
}

double exponential_scale(const std::vector<double>& values, double x_min) {
    double acc = 0.0;
    for (double x : values) acc += x - x_min;
    const double scale = acc / static_cast<double>(values.size());
    if (scale <= 0.0)
        throw DegenerateError("all tail values equal x_min: zero scale");
    return scale;
}

}  // namespace detail

TailFit fit_power_law(const TailSample& tail, double significance,
                      std::optional<double> cv_coefficient) {
    check_tail(tail);
    TailFit fit;
    fit.family = TailFamily::power_law;
    fit.x_min = tail.x_min;
    fit.n_tail = tail.n();
    const double zeta = detail::hill_zeta(tail.values, tail.x_min);
    fit.zeta = zeta;

    double log_sum = 0.0;
    for (double x : tail.values) log_sum += std::log(x / tail.x_min);
    fit.log_likelihood = static_cast<double>(tail.n()) * std::log(zeta / tail.x_min) -
                         (zeta + 1.0) * log_sum;

    fit.ks_d = ks_statistic(tail, [&fit](double x) { return fit.survival(x); });
    const Verdict v = ks_verdict(fit.ks_d, tail.n(), significance, cv_coefficient);
    fit.cv = v.cv;
    fit.accepted = v.accepted;
    return fit;
}

TailFit fit_exponential(const TailSample& tail, double significance,
                        std::optional<double> cv_coefficient) {
    check_tail(tail);
    TailFit fit;
    fit.family = TailFamily::exponential;
    fit.x_min = tail.x_min;
    fit.n_tail = tail.n();
    const double x_star = detail::exponential_scale(tail.values, tail.x_min);
    fit.x_star = x_star;

    double ll = 0.0;
    for (double x : tail.values) ll += -std::log(x_star) - (x - tail.x_min) / x_star;
    fit.log_likelihood = ll;

    fit.ks_d = ks_statistic(tail, [&fit](double x) { return fit.survival(x); });
    const Verdict v = ks_verdict(fit.ks_d, tail.n(), significance, cv_coefficient);
    fit.cv = v.cv;
    fit.accepted = v.accepted;
    return fit;
}

TailFit fit_power_law_cutoff(const TailSample& tail, double significance,
                             std::optional<double> cv_coefficient) {
    check_tail(tail);
    const double zeta0 = detail::hill_zeta(tail.values, tail.x_min);
    const double xs0 = detail::exponential_scale(tail.values, tail.x_min);

    // Nelder-Mead on (zeta, ln x_star); zeta < 0 is walled off by -inf.
    auto objective = [&](const std::array<double, 2>& p) {
        if (p[0] < 0.0) return -1e300;
        return cutoff_loglik(tail.values, tail.x_min, p[0], std::exp(p[1]));
    };

    std::array<std::array<double, 2>, 3> pts = {{
        {zeta0, std::log(xs0)},
        {zeta0 + std::max(0.1, 0.05 * zeta0), std::log(xs0)},
        {zeta0, std::log(xs0) + 0.2},
    }};
    std::array<double, 3> ll;
    for (int i = 0; i < 3; ++i) ll[i] = objective(pts[i]);

    auto order = [&] {
        // best first
        for (int a = 0; a < 2; ++a)
            for (int b = a + 1; b < 3; ++b)
                if (ll[b] > ll[a]) {
                    std::swap(ll[a], ll[b]);
                    std::swap(pts[a], pts[b]);
                }
    };
    order();

    bool converged = false;
    for (int iter = 0; iter < 500; ++iter) {
        if (ll[0] - ll[2] < 1e-9) {
            converged = true;
            break;
        }
        const std::array<double, 2> centroid = {(pts[0][0] + pts[1][0]) / 2.0,
                                                (pts[0][1] + pts[1][1]) / 2.0};
        auto mix = [&](double t) {
            return std::array<double, 2>{centroid[0] + t * (pts[2][0] - centroid[0]),
                                         centroid[1] + t * (pts[2][1] - centroid[1])};
        };
        const auto reflected = mix(-1.0);
        const double ll_r = objective(reflected);
        if (ll_r > ll[0]) {
            const auto expanded = mix(-2.0);
            const double ll_e = objective(expanded);
            if (ll_e > ll_r) {
                pts[2] = expanded;
                ll[2] = ll_e;
            } else {
                pts[2] = reflected;
                ll[2] = ll_r;
            }
        } else if (ll_r > ll[1]) {
            pts[2] = reflected;
            ll[2] = ll_r;
        } else {
            const auto contracted = mix(ll_r > ll[2] ? -0.5 : 0.5);
            const double ll_c = objective(contracted);
            if (ll_c > std::max(ll[2], ll_r)) {
                pts[2] = contracted;
                ll[2] = ll_c;
            } else {
                for (int i = 1; i < 3; ++i) {
                    for (int d = 0; d < 2; ++d)
                        pts[i][d] = pts[0][d] + 0.5 * (pts[i][d] - pts[0][d]);
                    ll[i] = objective(pts[i]);
                }
            }
        }
        order();
    }
    if (!converged) converged = ll[0] - ll[2] < 1e-9;

    TailFit fit;
    fit.family = TailFamily::power_law_cutoff;
    fit.x_min = tail.x_min;
    fit.n_tail = tail.n();
    fit.zeta = std::max(0.0, pts[0][0]);
    fit.x_star = std::exp(pts[0][1]);
    fit.log_likelihood = ll[0];
    fit.ks_d = ks_statistic(tail, [&fit](double x) { return fit.survival(x); });
    const Verdict v = ks_verdict(fit.ks_d, tail.n(), significance, cv_coefficient);
    fit.cv = v.cv;
    fit.accepted = v.accepted;

    if (!converged)
        throw NonConvergenceError(
            "cutoff fit hit 500 iterations with simplex spread " +
                std::to_string(ll[0] - ll[2]),
            fit);
    return fit;
}

double ks_statistic(const TailSample& tail,
                    const std::function<double(double)>& fitted_survival) {
    const double n = static_cast<double>(tail.n());
    double d = 0.0;
    for (std::size_t i = 0; i < tail.values.size(); ++i) {
        const double model = fitted_survival(tail.values[i]);
        d = std::max(d, std::fabs(model - static_cast<double>(i) / n));
        d = std::max(d, std::fabs(model - static_cast<double>(i + 1) / n));
    }
    return d;
}

Verdict ks_verdict(double d, std::size_t n, double significance,
                   std::optional<double> cv_coefficient) {
    if (n < 1) throw ArgumentError("ks_verdict needs n >= 1");
    double coefficient;
    if (cv_coefficient) {
        coefficient = *cv_coefficient;
        if (coefficient <= 0.0) throw ArgumentError("cv coefficient must be > 0");
    } else if (significance == 0.01) {
        coefficient = 1.63;
    } else {
        throw ArgumentError(
            "significance " + std::to_string(significance) +
            " has no built-in critical value; pass a cv coefficient");
    }
    Verdict v;
    v.cv = coefficient / std::sqrt(static_cast<double>(n));
    v.accepted = d <= v.cv;
    return v;
}

FamilyComparison compare_families(const TailSample& tail, double significance,
                                  std::optional<double> cv_coefficient) {
    FamilyComparison out;
    auto store = [&](TailFamily family, auto&& fitter) {
        const auto idx = static_cast<std::size_t>(family);
        try {
            out.fits[idx] = fitter();
        } catch (const NonConvergenceError& e) {
            out.errors[idx] = e.what();
        } catch (const Error& e) {
            out.errors[idx] = e.what();
        }
    };
    store(TailFamily::power_law,
          [&] { return fit_power_law(tail, significance, cv_coefficient); });
    store(TailFamily::exponential,
          [&] { return fit_exponential(tail, significance, cv_coefficient); });
    store(TailFamily::power_law_cutoff,
          [&] { return fit_power_law_cutoff(tail, significance, cv_coefficient); });

    double best_d = 2.0;
    for (const auto& fit : out.fits) {
        if (!fit || !fit->accepted) continue;
        if (fit->ks_d < best_d) {
            best_d = fit->ks_d;
            out.best = fit->family;
        }
    }
    return out;
}

}  // namespace sesstat
