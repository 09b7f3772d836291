#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sesstat/common.hpp"

namespace sesstat {

enum class TailFamily { power_law, exponential, power_law_cutoff };

std::string_view to_string(TailFamily family);

// Upper tail of a volatility sample: every value >= x_min > 0, sorted
// descending. One TailSample is shared across all three family fits so the
// comparison uses the same range and points.
struct TailSample {
    std::vector<double> values;
    double x_min = 0.0;
    Kind source_kind = Kind::total;

    std::size_t n() const { return values.size(); }
};

// One fitted family with its goodness-of-fit verdict. The verdict uses the
// fixed asymptotic critical value (no Monte-Carlo recalibration), which is
// anticonservative with estimated parameters; reports label it as such.
struct TailFit {
    TailFamily family = TailFamily::power_law;
    std::optional<double> zeta;    // absent for the exponential family
    std::optional<double> x_star;  // absent for the pure power law
    double x_min = 0.0;
    std::size_t n_tail = 0;
    double ks_d = 0.0;
    double cv = 0.0;
    bool accepted = false;
    double log_likelihood = 0.0;

    // Fitted survival function; S(x_min) = 1, non-increasing.
    double survival(double x) const;
};

// The cutoff optimizer hit its iteration cap; best_fit is the best point
// found (its spread tolerance was not met, treat parameters as approximate).
struct NonConvergenceError : Error {
    NonConvergenceError(const std::string& msg, TailFit best)
        : Error(msg), best_fit(std::move(best)) {}
    TailFit best_fit;
};

// Top-fraction tail: zero entries are excluded first, x_min is the
// ceil(q*len)-th largest remaining value, and ties at x_min extend the tail.
// q in (0, 1]. Throws InsufficientDataError when fewer than 10 points stay.
TailSample select_tail_fraction(const std::vector<double>& values, double q,
                                Kind kind);

// Explicit-threshold tail: every value >= x_min (> 0 required).
TailSample select_tail_threshold(const std::vector<double>& values, double x_min,
                                 Kind kind);

// Threshold scan: picks the distinct value whose tail minimizes the
// power-law KS distance (all thresholds leaving >= min_tail points).
TailSample scan_xmin(const std::vector<double>& values, Kind kind,
                     std::size_t min_tail = 10);

// Hill estimator: zeta = n / sum ln(x_i/x_min) for S(x) = (x/x_min)^(-zeta).
TailFit fit_power_law(const TailSample& tail, double significance = 0.01,
                      std::optional<double> cv_coefficient = std::nullopt);

// Scale MLE: x_star = mean(x_i - x_min) for S(x) = e^(-(x-x_min)/x_star).
TailFit fit_exponential(const TailSample& tail, double significance = 0.01,
                        std::optional<double> cv_coefficient = std::nullopt);

// Joint MLE for S(x) = (x/x_min)^(-zeta) e^(-(x-x_min)/x_star), density
// f(x) = S(x) (zeta/x + 1/x_star), by Nelder-Mead over (zeta >= 0, ln x_star)
// started from the two single-family estimates; converged when the simplex
// log-likelihood spread drops below 1e-9, capped at 500 iterations (the cap
// raises NonConvergenceError carrying the best point).
TailFit fit_power_law_cutoff(const TailSample& tail, double significance = 0.01,
                             std::optional<double> cv_coefficient = std::nullopt);

// Two-sided KS distance: each sorted sample point is compared against both
// empirical step edges i/n and (i+1)/n.
double ks_statistic(const TailSample& tail,
                    const std::function<double(double)>& fitted_survival);

struct Verdict {
    double cv = 0.0;
    bool accepted = false;
};

// cv = 1.63/sqrt(n) at the 1% level; any other significance needs an
// explicit coefficient. accepted means d <= cv.
Verdict ks_verdict(double d, std::size_t n, double significance = 0.01,
                   std::optional<double> cv_coefficient = std::nullopt);

// All three families fitted on the same tail; per-family failures are kept
// as messages instead of aborting the other fits. best = accepted fit with
// the smallest KS distance, if any fit was accepted.
struct FamilyComparison {
    std::array<std::optional<TailFit>, 3> fits;  // indexed by TailFamily
    std::array<std::string, 3> errors;
    std::optional<TailFamily> best;
};

FamilyComparison compare_families(const TailSample& tail, double significance = 0.01,
                                  std::optional<double> cv_coefficient = std::nullopt);

namespace detail {

// MLE building blocks without the n >= 10 gate, for direct verification.
double hill_zeta(const std::vector<double>& values, double x_min);
double exponential_scale(const std::vector<double>& values, double x_min);

}  // namespace detail

}  // namespace sesstat
