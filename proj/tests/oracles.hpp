// Independent reference implementations used only to cross-check the library.
// Everything here favors obviousness over speed and shares no code with src/.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sesstat/common.hpp"

namespace oracles {

// Detrended fluctuation at one scale, recomputed from scratch: same box
// partition and abscissa contract, but the per-box least squares is done by
// modified Gram-Schmidt orthogonalization instead of normal equations.
inline double naive_dfa_fluctuation(const std::vector<double>& prof, int scale,
                                    int order) {
    const std::size_t n = prof.size();
    const std::size_t l = static_cast<std::size_t>(scale);
    const std::size_t boxes = n / l;
    const int dim = order + 1;

    // Columns of the Vandermonde on u_j = 2j/(l-1) - 1.
    std::vector<std::vector<double>> v(dim, std::vector<double>(l));
    for (std::size_t j = 0; j < l; ++j) {
        const double u = l > 1 ? 2.0 * static_cast<double>(j) / (l - 1) - 1.0 : 0.0;
        double p = 1.0;
        for (int k = 0; k < dim; ++k) {
            v[k][j] = p;
            p *= u;
        }
    }
    std::vector<std::vector<double>> q = v;
    for (int k = 0; k < dim; ++k) {
        for (int prev = 0; prev < k; ++prev) {
            double dot = 0.0;
            for (std::size_t j = 0; j < l; ++j) dot += q[prev][j] * q[k][j];
            for (std::size_t j = 0; j < l; ++j) q[k][j] -= dot * q[prev][j];
        }
        double norm = 0.0;
        for (std::size_t j = 0; j < l; ++j) norm += q[k][j] * q[k][j];
        norm = std::sqrt(norm);
        for (std::size_t j = 0; j < l; ++j) q[k][j] /= norm;
    }

    auto box_ssr = [&](std::size_t start) {
        std::vector<double> resid(prof.begin() + static_cast<long>(start),
                                  prof.begin() + static_cast<long>(start + l));
        for (int k = 0; k < dim; ++k) {
            double dot = 0.0;
            for (std::size_t j = 0; j < l; ++j) dot += q[k][j] * resid[j];
            for (std::size_t j = 0; j < l; ++j) resid[j] -= dot * q[k][j];
        }
        double acc = 0.0;
        for (double r : resid) acc += r * r;
        return acc;
    };

    double total = 0.0;
    for (std::size_t b = 0; b < boxes; ++b) total += box_ssr(b * l);
    for (std::size_t b = 0; b < boxes; ++b) total += box_ssr(n - (b + 1) * l);
    return std::sqrt(total / static_cast<double>(2 * boxes * l));
}

// Two-sided Kolmogorov-Smirnov distance against a model survival function,
// computed from explicit exceedance counts at each distinct sample value
// rather than from sorted-index arithmetic.
template <typename Survival>
double naive_ks(std::vector<double> values, Survival survival) {
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double x = values[i];
        if (i > 0 && values[i - 1] == x) continue;  // one check per distinct value
        const auto lo = std::lower_bound(values.begin(), values.end(), x);
        const auto hi = std::upper_bound(values.begin(), values.end(), x);
        const double emp_at_least = static_cast<double>(values.end() - lo) / n;
        const double emp_above = static_cast<double>(values.end() - hi) / n;
        const double model = survival(x);
        d = std::max(d, std::fabs(model - emp_at_least));
        d = std::max(d, std::fabs(model - emp_above));
    }
    return d;
}

struct CutoffGridFit {
    double zeta = 0.0;
    double x_star = 0.0;
    double log_likelihood = 0.0;
};

// Exhaustive grid search for the power-law-with-cutoff MLE:
// f(x) = (x/x_min)^(-zeta) * exp(-(x-x_min)/x_star) * (zeta/x + 1/x_star).
inline CutoffGridFit grid_cutoff_fit(const std::vector<double>& values, double x_min,
                                     double zeta_lo, double zeta_hi, double xs_lo,
                                     double xs_hi, int steps) {
    auto loglik = [&](double zeta, double xs) {
        double acc = 0.0;
        for (double x : values)
            acc += -zeta * std::log(x / x_min) - (x - x_min) / xs +
                   std::log(zeta / x + 1.0 / xs);
        return acc;
    };
    CutoffGridFit best;
    best.log_likelihood = -1e300;
    for (int i = 0; i <= steps; ++i) {
        const double zeta = zeta_lo + (zeta_hi - zeta_lo) * i / steps;
        for (int j = 0; j <= steps; ++j) {
            // geometric spacing keeps resolution even across scales
            const double xs = xs_lo * std::pow(xs_hi / xs_lo, static_cast<double>(j) / steps);
            const double ll = loglik(zeta, xs);
            if (ll > best.log_likelihood) best = {zeta, xs, ll};
        }
    }
    return best;
}

// Draws from the cutoff law by rejection from a shifted exponential
// envelope; independent of the library's inverse-CDF bisection sampler.
inline std::vector<double> rejection_cutoff_sample(std::size_t n, double zeta,
                                                   double x_star, double x_min,
                                                   std::uint64_t seed) {
    sesstat::Rng rng(seed);
    const double bound = 1.0 + zeta * x_star / x_min;
    std::vector<double> out;
    out.reserve(n);
    std::size_t guard = 0;
    while (out.size() < n) {
        if (++guard > 2000 * n) throw std::runtime_error("rejection sampler stalled");
        const double x = x_min - x_star * std::log(rng.uniform());
        const double ratio = std::pow(x / x_min, -zeta) * (zeta * x_star / x + 1.0);
        if (rng.uniform() * bound <= ratio) out.push_back(x);
    }
    return out;
}

}  // namespace oracles
