#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "sesstat/dfa.hpp"
#include "sesstat/synth.hpp"

using namespace sesstat;

TEST_CASE("profile of a constant series is identically zero") {
    auto p = profile({3.5, 3.5, 3.5, 3.5, 3.5});
    for (double y : p) CHECK(std::fabs(y) <= 1e-12);
}

TEST_CASE("profile of an alternating series") {
    auto p = profile({1.0, -1.0, 1.0, -1.0});
    REQUIRE(p.size() == 4);
    CHECK(p[0] == doctest::Approx(1.0));
    CHECK(p[1] == doctest::Approx(0.0));
    CHECK(p[2] == doctest::Approx(1.0));
    CHECK(p[3] == doctest::Approx(0.0));
}

TEST_CASE("profile telescopes to zero at the end") {
    Rng rng(99);
    std::vector<double> x(5000);
    double peak = 0.0;
    for (double& v : x) {
        v = 100.0 + rng.gaussian();
        peak = std::max(peak, std::fabs(v));
    }
    auto p = profile(x);
    CHECK(std::fabs(p.back()) <= 1e-12 * static_cast<double>(x.size()) * peak);
}

TEST_CASE("profile rejects short input") {
    CHECK_THROWS_AS(profile({1.0, 2.0, 3.0}), InsufficientDataError);
}

TEST_CASE("fluctuation of a zero profile is zero") {
    std::vector<double> zeros(200, 0.0);
    CHECK(fluctuation_at_scale(zeros, 10, 1) == 0.0);
}

TEST_CASE("fluctuation of a polynomial profile vanishes at matching order") {
    for (int m = 1; m <= 4; ++m) {
        std::vector<double> prof(400);
        double scale_mag = 0.0;
        for (std::size_t i = 0; i < prof.size(); ++i) {
            const double t = static_cast<double>(i) / 400.0;
            double acc = 0.0;
            double p = 1.0;
            for (int k = 0; k <= m; ++k) {
                acc += (2.0 + k) * p;
                p *= t;
            }
            prof[i] = acc;
            scale_mag = std::max(scale_mag, std::fabs(acc));
        }
        for (int l : {m + 2, 10, 50, 100})
            CHECK(fluctuation_at_scale(prof, l, m) <= 1e-9 * scale_mag);
    }
}

TEST_CASE("fluctuation scale domain is enforced") {
    std::vector<double> prof(100, 1.0);
    CHECK_THROWS_AS(fluctuation_at_scale(prof, 2, 1), ArgumentError);   // < m+2
    CHECK_THROWS_AS(fluctuation_at_scale(prof, 26, 1), ArgumentError);  // > N/4
    CHECK_NOTHROW(fluctuation_at_scale(prof, 25, 1));
    CHECK_THROWS_AS(fluctuation_at_scale(prof, 10, 0), ArgumentError);
}

TEST_CASE("fluctuation matches the naive reimplementation") {
    Rng rng(2024);
    std::vector<double> x(5000);
    for (double& v : x) v = rng.gaussian();
    auto prof = profile(x);
    for (int order = 1; order <= 4; ++order) {
        for (int scale : {6, 16, 50, 177, 643, 1250}) {
            const double mine = fluctuation_at_scale(prof, scale, order);
            const double ref = oracles::naive_dfa_fluctuation(prof, scale, order);
            CHECK(mine == doctest::Approx(ref).epsilon(1e-10));
        }
    }
}

TEST_CASE("curve grid stays inside its contract") {
    Rng rng(5);
    std::vector<double> x(1000);
    for (double& v : x) v = rng.gaussian();
    auto curve = dfa_curve(x, 1, 30);
    REQUIRE(!curve.scales.empty());
    CHECK(curve.scales.front() >= 6);
    CHECK(curve.scales.back() <= 250);
    CHECK(curve.scales.size() <= 30);
    for (std::size_t i = 1; i < curve.scales.size(); ++i)
        CHECK(curve.scales[i] > curve.scales[i - 1]);
    CHECK(curve.series_length == 1000);
    CHECK(curve.detrend_order == 1);
    for (double f : curve.fluctuations) CHECK(f >= 0.0);

    CHECK_THROWS_AS(dfa_curve(std::vector<double>(50, 1.0), 1, 30),
                    InsufficientDataError);
}

TEST_CASE("polynomial input with the next detrend order gives a flat zero curve") {
    // An input that is a degree-m polynomial integrates to a degree-(m+1)
    // profile, so order m+1 removes it entirely.
    for (int m = 0; m <= 3; ++m) {
        std::vector<double> x(600);
        double mag = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double t = static_cast<double>(i) / 600.0;
            double acc = 0.0;
            double p = 1.0;
            for (int k = 0; k <= m; ++k) {
                acc += (1.0 + 0.5 * k) * p;
                p *= t;
            }
            x[i] = acc;
            mag = std::max(mag, std::fabs(acc));
        }
        auto curve = dfa_curve(x, m + 1, 20);
        for (double f : curve.fluctuations) CHECK(f <= 1e-9 * mag);
        // A constant input detrends to exact zeros, which refuse to fit;
        // higher degrees leave rounding dust, so F stays positive.
        if (m == 0) CHECK_THROWS_AS(fit_alpha(curve), DegenerateError);
    }
}

TEST_CASE("exact power-law curve fits exactly") {
    DfaCurve curve;
    curve.detrend_order = 1;
    curve.series_length = 4000;
    curve.scales = {6, 9, 14, 21, 32, 48, 72, 108, 162, 243, 364, 546, 819, 1000};
    for (int s : curve.scales)
        curve.fluctuations.push_back(std::pow(static_cast<double>(s), 0.6));
    auto fit = fit_alpha(curve);
    CHECK(fit.alpha == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(fit.rms_residual <= 1e-12);
    CHECK(fit.n_points == curve.scales.size());
    CHECK(fit.l_lo == 6);
    CHECK(fit.l_hi == 1000);
}

TEST_CASE("fit range selection and failure modes") {
    DfaCurve curve;
    curve.scales = {6, 8, 10, 12, 14, 16};
    curve.fluctuations = {1, 2, 3, 4, 5, 6};
    CHECK_THROWS_AS(fit_alpha(curve, 6, 10), ArgumentError);  // 3 points only

    curve.fluctuations[2] = 0.0;
    CHECK_THROWS_AS(fit_alpha(curve), DegenerateError);
}

TEST_CASE("white noise fits near one half") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Rng rng(seed);
        std::vector<double> x(5000);
        for (double& v : x) v = rng.gaussian();
        auto fit = fit_alpha(dfa_curve(x, 1, 30));
        CHECK(std::fabs(fit.alpha - 0.5) <= 0.05);
    }
}

TEST_CASE("integrating a series raises the exponent by one") {
    Rng rng(77);
    std::vector<double> inc(5000);
    for (double& v : inc) v = rng.gaussian();
    std::vector<double> walk(inc.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < inc.size(); ++i) {
        acc += inc[i];
        walk[i] = acc;
    }
    const double a_inc = fit_alpha(dfa_curve(inc, 1, 30)).alpha;
    const double a_walk = fit_alpha(dfa_curve(walk, 1, 30)).alpha;
    CHECK(std::fabs((a_walk - a_inc) - 1.0) <= 0.1);
}

TEST_CASE("constant shift and positive scaling leave the fit alone") {
    Rng rng(31);
    std::vector<double> x(2000);
    for (double& v : x) v = rng.gaussian();
    auto base = dfa_curve(x, 1, 25);

    std::vector<double> shifted(x), scaled(x);
    for (double& v : shifted) v += 5.0;
    for (double& v : scaled) v *= 3.7;
    auto c_shift = dfa_curve(shifted, 1, 25);
    auto c_scale = dfa_curve(scaled, 1, 25);

    REQUIRE(c_shift.scales == base.scales);
    REQUIRE(c_scale.scales == base.scales);
    for (std::size_t i = 0; i < base.scales.size(); ++i) {
        CHECK(c_shift.fluctuations[i] ==
              doctest::Approx(base.fluctuations[i]).epsilon(1e-9));
        CHECK(c_scale.fluctuations[i] ==
              doctest::Approx(3.7 * base.fluctuations[i]).epsilon(1e-9));
    }
    CHECK(fit_alpha(c_scale).alpha == doctest::Approx(fit_alpha(base).alpha).epsilon(1e-9));
}

TEST_CASE("exact piecewise curve splits into its two slopes") {
    DfaCurve curve;
    curve.detrend_order = 1;
    curve.series_length = 1000;
    curve.scales = {6, 8, 11, 15, 20, 27, 36, 48, 64, 86, 115, 154, 206, 250};
    const double split = std::sqrt(6.0 * 250.0);  // about 38.7
    for (int s : curve.scales) {
        const double sd = static_cast<double>(s);
        curve.fluctuations.push_back(sd <= split
                                         ? std::pow(sd, 0.6)
                                         : std::pow(split, -0.2) * std::pow(sd, 0.8));
    }
    auto ex = two_regime_fit(curve);
    REQUIRE(ex.short_scale.has_value());
    REQUIRE(ex.long_scale.has_value());
    CHECK(!ex.fell_back);
    CHECK(ex.short_scale->alpha == doctest::Approx(0.6).epsilon(1e-6));
    CHECK(ex.long_scale->alpha == doctest::Approx(0.8).epsilon(1e-6));
    REQUIRE(ex.crossover_scale.has_value());
    CHECK(*ex.crossover_scale == doctest::Approx(split));
    CHECK(*ex.crossover_scale > curve.scales.front());
    CHECK(*ex.crossover_scale < curve.scales.back());
}

TEST_CASE("two-regime fit needs eight points and falls back when lopsided") {
    DfaCurve thin;
    thin.scales = {6, 8, 10, 12, 14, 16, 18};
    for (int s : thin.scales)
        thin.fluctuations.push_back(std::pow(static_cast<double>(s), 0.6));
    CHECK_THROWS_AS(two_regime_fit(thin), InsufficientDataError);

    // Nine points but only three at or below sqrt(6*600): falls back.
    DfaCurve lopsided;
    lopsided.scales = {6, 20, 59, 70, 90, 150, 250, 400, 600};
    for (int s : lopsided.scales)
        lopsided.fluctuations.push_back(std::pow(static_cast<double>(s), 0.6));
    auto ex = two_regime_fit(lopsided);
    CHECK(ex.fell_back);
    REQUIRE(ex.single.has_value());
    CHECK(!ex.short_scale.has_value());
    CHECK(ex.single->alpha == doctest::Approx(0.6).epsilon(1e-9));
}

TEST_CASE("monofractal series shows no systematic regime split") {
    double sum_short = 0.0, sum_long = 0.0;
    int used = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto x = gen_long_memory(8192, 0.75, seed);
        auto ex = two_regime_fit(dfa_curve(x, 1, 30));
        REQUIRE(!ex.fell_back);
        sum_short += ex.short_scale->alpha;
        sum_long += ex.long_scale->alpha;
        ++used;
    }
    // Per-seed halves wobble with sampling noise; the means must agree.
    CHECK(std::fabs(sum_short / used - sum_long / used) <= 0.05);
}

namespace {

// Long-memory "price history": overnight and daytime legs split a common
// persistent magnitude sequence so every kind shares its scaling exponent.
// r = (h + 6) * sign with h standardized keeps |r| = h + 6 exactly, so the
// volatility inherits h's correlation structure unchanged.
SessionReturns long_memory_returns(std::size_t n, double alpha, std::uint64_t seed) {
    auto h = gen_long_memory(n, alpha, seed);
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    SessionReturns out;
    out.ticker = "LM";
    Date d{1990, 1, 2};
    for (std::size_t i = 0; i < n; ++i) {
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        const double r = (h[i] + 6.0) * sign;
        out.dates.push_back(d);
        out.r_total.push_back(r);
        out.r_overnight.push_back(0.4 * r);
        out.r_daytime.push_back(0.6 * r);
        out.gap_flags.push_back(0);
        d = d.next_weekday();
    }
    return out;
}

}  // namespace

TEST_CASE("per-stock analysis separates return and volatility regimes") {
    auto rets = long_memory_returns(8192, 0.8, 17);
    auto dfa = analyze_stock_dfa(rets, 1, 30);
    for (std::size_t k = 0; k < 3; ++k) {
        INFO("kind ", k);
        REQUIRE(dfa.returns[k].error.empty());
        REQUIRE(dfa.returns[k].exponents.has_value());
        REQUIRE(dfa.returns[k].exponents->single.has_value());
        // signs are coin flips, so the returns themselves are uncorrelated
        CHECK(std::fabs(dfa.returns[k].exponents->single->alpha - 0.5) <= 0.07);

        REQUIRE(dfa.volatilities[k].error.empty());
        REQUIRE(dfa.volatilities[k].exponents.has_value());
        const auto& vol = *dfa.volatilities[k].exponents;
        REQUIRE(vol.short_scale.has_value());
        REQUIRE(vol.long_scale.has_value());
        // |r| = h + 6 shares h's exponent in both halves of the grid
        CHECK(std::fabs(vol.short_scale->alpha - 0.8) <= 0.1);
        CHECK(std::fabs(vol.long_scale->alpha - 0.8) <= 0.1);
    }
}

TEST_CASE("constant-price stock degenerates instead of fitting") {
    PriceSeries s;
    s.ticker = "FLAT";
    Date d{1990, 1, 2};
    for (int i = 0; i < 300; ++i) {
        s.bars.push_back({d, 100.0, 100.0, 1.0});
        d = d.next_weekday();
    }
    auto rets = compute_returns(s);
    auto dfa = analyze_stock_dfa(rets);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(!dfa.returns[k].error.empty());      // all-zero returns: no slope
        CHECK(!dfa.volatilities[k].error.empty()); // all-zero volatility
        CHECK(!dfa.volatilities[k].exponents.has_value());
    }
}

TEST_CASE("per-stock analysis refuses short series") {
    auto rets = long_memory_returns(99, 0.6, 3);
    CHECK_THROWS_AS(analyze_stock_dfa(rets), InsufficientDataError);
}
