#include "sesstat/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <thread>

namespace sesstat {

namespace {

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

// Population standard deviation.
double stddev_of(const std::vector<double>& v, double mean) {
    if (v.empty()) return 0.0;
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(v.size()));
}

std::string num12(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ArgumentError(what);
}

struct StockOutcome {
    std::optional<StockRecord> record;
    std::vector<StageError> errors;
};

StockOutcome analyze_one(const PriceSeries& series,
                         const PipelineConfig& config) {
    StockOutcome out;
    SessionReturns returns;
    try {
        returns = compute_returns(series);
    } catch (const std::exception& e) {
        out.errors.push_back({series.ticker, "returns", e.what()});
        return out;
    }

    StockRecord rec;
    rec.ticker = series.ticker;
    rec.n_bars = series.bars.size();
    rec.n_gap_entries = static_cast<std::size_t>(std::count_if(
        returns.gap_flags.begin(), returns.gap_flags.end(),
        [](std::uint8_t f) { return f != 0; }));
    if (config.exclude_gaps) returns = exclude_gap_entries(returns);
    rec.n_returns = returns.size();

    for (std::size_t k = 0; k < 3; ++k) {
        const Kind kind = static_cast<Kind>(k);
        try {
            const VolatilitySeries vol = volatility(returns.by_kind(kind), kind);
            TailSample sample =
                config.scan_xmin
                    ? scan_xmin(vol.values, kind)
                    : select_tail_fraction(vol.values, config.tail_fraction,
                                           kind);
            TailStage stage;
            stage.x_min = sample.x_min;
            stage.n_tail = sample.n();
            stage.families = compare_families(sample, config.significance,
                                              config.cv_coefficient);
            rec.tails[k] = std::move(stage);
        } catch (const std::exception& e) {
            out.errors.push_back(
                {rec.ticker, "tails/" + std::string(to_string(kind)),
                 e.what()});
        }
    }

    try {
        rec.dfa = analyze_stock_dfa(returns, config.dfa_order,
                                    config.dfa_points);
    } catch (const std::exception& e) {
        out.errors.push_back({rec.ticker, "dfa", e.what()});
    }

    try {
        rec.xcorr = return_pair_analysis(returns, config.max_lag, false);
    } catch (const std::exception& e) {
        out.errors.push_back({rec.ticker, "xcorr", e.what()});
    }

    for (std::size_t p = 0; p < 3; ++p) {
        try {
            rec.yearly[p] =
                yearly_xcorr(returns, kPairKinds[p][0], kPairKinds[p][1]);
        } catch (const std::exception& e) {
            out.errors.push_back(
                {rec.ticker, "yearly/" + std::string(kPairNames[p]),
                 e.what()});
        }
    }

    out.record = std::move(rec);
    return out;
}

// Per-stock sidecar dumps; any write failure aborts the run (IO error).
void dump_stock_files(const PriceSeries& series, const StockRecord& rec,
                      const PipelineConfig& config) {
    namespace fs = std::filesystem;
    if (config.dump_returns_dir) {
        fs::create_directories(*config.dump_returns_dir);
        const fs::path path =
            fs::path(*config.dump_returns_dir) / (rec.ticker + ".csv");
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("cannot write " + path.string());
        out << "date,r_total,r_overnight,r_daytime,gap\n";
        SessionReturns returns = compute_returns(series);
        if (config.exclude_gaps) returns = exclude_gap_entries(returns);
        for (std::size_t i = 0; i < returns.size(); ++i) {
            out << returns.dates[i].str() << ',' << num12(returns.r_total[i])
                << ',' << num12(returns.r_overnight[i]) << ','
                << num12(returns.r_daytime[i]) << ','
                << int(returns.gap_flags[i]) << '\n';
        }
        if (!out.flush()) throw Error("short write: " + path.string());
    }
    if (config.dump_dfa_dir && rec.dfa) {
        fs::create_directories(*config.dump_dfa_dir);
        const fs::path path =
            fs::path(*config.dump_dfa_dir) / (rec.ticker + ".csv");
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("cannot write " + path.string());
        out << "series,kind,scale,fluctuation\n";
        const auto emit = [&](const char* label, const KindDfa& kd, Kind kind) {
            if (!kd.curve) return;
            for (std::size_t i = 0; i < kd.curve->scales.size(); ++i) {
                out << label << ',' << to_string(kind) << ','
                    << kd.curve->scales[i] << ','
                    << num12(kd.curve->fluctuations[i]) << '\n';
            }
        };
        for (std::size_t k = 0; k < 3; ++k) {
            const Kind kind = static_cast<Kind>(k);
            emit("returns", rec.dfa->returns[k], kind);
            emit("volatility", rec.dfa->volatilities[k], kind);
        }
        if (!out.flush()) throw Error("short write: " + path.string());
    }
}

// Per-kind accessors into the DFA exponents, used by the table-2 rows.
std::optional<double> returns_alpha(const StockRecord& rec, Kind kind) {
    if (!rec.dfa) return std::nullopt;
    const KindDfa& kd = rec.dfa->returns[static_cast<std::size_t>(kind)];
    if (!kd.exponents || !kd.exponents->single) return std::nullopt;
    return kd.exponents->single->alpha;
}

std::optional<double> vol_alpha(const StockRecord& rec, Kind kind,
                                bool short_scale) {
    if (!rec.dfa) return std::nullopt;
    const KindDfa& kd = rec.dfa->volatilities[static_cast<std::size_t>(kind)];
    if (!kd.exponents) return std::nullopt;
    const std::optional<AlphaFit>& fit =
        short_scale ? kd.exponents->short_scale : kd.exponents->long_scale;
    if (!fit) return std::nullopt;
    return fit->alpha;
}

std::optional<double> power_law_zeta(const StockRecord& rec, Kind kind) {
    const std::optional<TailStage>& stage =
        rec.tails[static_cast<std::size_t>(kind)];
    if (!stage) return std::nullopt;
    const std::optional<TailFit>& fit =
        stage->families.fits[static_cast<std::size_t>(TailFamily::power_law)];
    if (!fit || !fit->zeta) return std::nullopt;
    return *fit->zeta;
}

void build_alpha_hists(CohortReport& report) {
    using Getter = std::optional<double> (*)(const StockRecord&, Kind);
    struct Spec {
        std::string name;
        Kind kind;
        Getter get;
    };
    static const Getter kReturns = returns_alpha;
    static const Getter kVolShort = [](const StockRecord& r, Kind k) {
        return vol_alpha(r, k, true);
    };
    static const Getter kVolLong = [](const StockRecord& r, Kind k) {
        return vol_alpha(r, k, false);
    };

    std::vector<Spec> specs;
    for (std::size_t k = 0; k < 3; ++k) {
        const Kind kind = static_cast<Kind>(k);
        specs.push_back(
            {"returns_" + std::string(to_string(kind)), kind, kReturns});
    }
    for (std::size_t k = 0; k < 3; ++k) {
        const Kind kind = static_cast<Kind>(k);
        const std::string base = "vol_" + std::string(to_string(kind));
        specs.push_back({base + "_short", kind, kVolShort});
        specs.push_back({base + "_long", kind, kVolLong});
    }

    for (const Spec& spec : specs) {
        AlphaHistogram hist;
        hist.name = spec.name;
        for (const StockRecord& rec : report.stocks) {
            if (auto a = spec.get(rec, spec.kind)) hist.values.push_back(*a);
        }
        if (!hist.values.empty()) {
            hist.hist =
                histogram_pdf(hist.values, report.config.hist_bin_width);
        }
        report.alpha_hists.push_back(std::move(hist));
    }
}

void build_zeta_tendencies(CohortReport& report) {
    for (const Kind session : {Kind::overnight, Kind::daytime}) {
        ZetaTendency tendency;
        tendency.pair = "total_vs_" + std::string(to_string(session));
        for (const StockRecord& rec : report.stocks) {
            const auto zx = power_law_zeta(rec, Kind::total);
            const auto zy = power_law_zeta(rec, session);
            if (zx && zy) {
                tendency.x.push_back(*zx);
                tendency.y.push_back(*zy);
            }
        }
        if (!tendency.x.empty()) {
            tendency.binned = bin_tendency(tendency.x, tendency.y,
                                           report.config.bins,
                                           "zeta_" + tendency.pair);
        }
        report.zeta_tendencies.push_back(std::move(tendency));
    }
}

void build_xcorr_dists(CohortReport& report) {
    for (std::size_t p = 0; p < 3; ++p) {
        XcorrDist dist;
        dist.pair = std::string(kPairNames[p]);
        for (const StockRecord& rec : report.stocks) {
            if (!rec.xcorr) continue;
            const LagCorrelogram& cg =
                p == 0   ? rec.xcorr->total_overnight
                : p == 1 ? rec.xcorr->total_daytime
                         : rec.xcorr->overnight_daytime;
            dist.values.push_back(cg.c_zero);
            if (cg.noise_sigma > 0.0 && significant(cg)) ++dist.n_significant;
        }
        dist.mean = mean_of(dist.values);
        dist.stddev = stddev_of(dist.values, dist.mean);
        if (!dist.values.empty()) {
            dist.hist =
                histogram_pdf(dist.values, report.config.hist_bin_width);
        }
        report.xcorr_dists.push_back(std::move(dist));
    }
}

void build_table2(CohortReport& report) {
    struct Measure {
        std::string name;
        std::function<std::optional<double>(const StockRecord&, Kind)> get;
    };
    const std::vector<Measure> measures = {
        {"alpha_returns", [](const StockRecord& r, Kind k) {
             return returns_alpha(r, k);
         }},
        {"alpha_vol_short", [](const StockRecord& r, Kind k) {
             return vol_alpha(r, k, true);
         }},
        {"alpha_vol_long", [](const StockRecord& r, Kind k) {
             return vol_alpha(r, k, false);
         }},
    };

    // One baseline-shuffle seed per row, drawn in fixed row order.
    Rng master(report.config.seed);
    for (const Measure& measure : measures) {
        for (std::size_t p = 0; p < 3; ++p) {
            const std::uint64_t row_seed = master.next_u64();
            AlphaXcorrRow row;
            row.measure = measure.name + "_" + std::string(kPairNames[p]);
            std::vector<double> a;
            std::vector<double> b;
            for (const StockRecord& rec : report.stocks) {
                const auto va = measure.get(rec, kPairKinds[p][0]);
                const auto vb = measure.get(rec, kPairKinds[p][1]);
                if (va && vb) {
                    a.push_back(*va);
                    b.push_back(*vb);
                }
            }
            row.n = a.size();
            if (row.n >= 2 * report.config.subsets) {
                try {
                    row.summary =
                        cohort_alpha_xcorr(a, b, report.config.subsets,
                                           row_seed, row.measure);
                } catch (const std::exception& e) {
                    row.error = e.what();
                }
            } else {
                char buf[96];
                std::snprintf(buf, sizeof buf,
                              "only %zu stocks with both measures, need %zu",
                              row.n, 2 * report.config.subsets);
                row.error = buf;
            }
            report.table2.push_back(std::move(row));
        }
    }
}

void build_yearly(CohortReport& report) {
    std::map<int, std::array<std::vector<double>, 3>> by_year;
    for (const StockRecord& rec : report.stocks) {
        for (std::size_t p = 0; p < 3; ++p) {
            if (!rec.yearly[p]) continue;
            const YearlyXcorr& yx = *rec.yearly[p];
            for (std::size_t i = 0; i < yx.years.size(); ++i) {
                by_year[yx.years[i]][p].push_back(yx.values[i]);
            }
        }
    }
    for (const auto& [year, per_pair] : by_year) {
        YearlyAggregate agg;
        agg.year = year;
        for (std::size_t p = 0; p < 3; ++p) {
            agg.n_stocks[p] = per_pair[p].size();
            agg.mean[p] = mean_of(per_pair[p]);
            agg.stddev[p] = stddev_of(per_pair[p], agg.mean[p]);
        }
        report.yearly.push_back(agg);
    }
}

// The bookkeeping invariant: each kind's recorded family fits must equal
// three per stock whose tail stage ran. A mismatch is reported, not dropped.
void reconcile(CohortReport& report) {
    for (std::size_t k = 0; k < 3; ++k) {
        const std::size_t expect = report.good_fit.stocks_with_tail[k] * 3;
        std::size_t got = 0;
        for (std::size_t f = 0; f < 3; ++f) got += report.good_fit.records[k][f];
        if (got != expect) {
            char buf[128];
            std::snprintf(buf, sizeof buf,
                          "%s: expected %zu tail records, found %zu",
                          std::string(to_string(static_cast<Kind>(k))).c_str(),
                          expect, got);
            report.errors.push_back({"<cohort>", "reconcile", buf});
        }
    }
}

}  // namespace

void validate_config(const PipelineConfig& config) {
    require(!config.inputs.empty(), "config: no inputs given");
    require(config.tail_fraction > 0.0 && config.tail_fraction < 1.0,
            "config: tail fraction must be in (0, 1)");
    require(config.significance > 0.0 && config.significance < 1.0,
            "config: significance must be in (0, 1)");
    if (config.significance != 0.01) {
        require(config.cv_coefficient.has_value(),
                "config: cv coefficient required off the 1% level");
    }
    if (config.cv_coefficient) {
        require(*config.cv_coefficient > 0.0,
                "config: cv coefficient must be positive");
    }
    require(config.dfa_order >= 1, "config: dfa order must be >= 1");
    require(config.dfa_points >= 4, "config: dfa points must be >= 4");
    require(config.max_lag >= 1, "config: max lag must be >= 1");
    require(config.subsets >= 1, "config: subsets must be >= 1");
    require(config.bins >= 1, "config: bins must be >= 1");
    require(config.hist_bin_width > 0.0,
            "config: histogram bin width must be positive");
    require(config.jobs >= 1, "config: jobs must be >= 1");
    if (config.from && config.to) {
        require(!(*config.to < *config.from),
                "config: date range is inverted");
    }
    for (const std::string& path : config.inputs) {
        std::ifstream probe(path);
        require(bool(probe), "config: cannot read input: " + path);
    }
}

LoadedCohort load_cohort(const PipelineConfig& config) {
    LoadedCohort out;
    std::map<std::string, PriceSeries> merged;
    for (const std::string& path : config.inputs) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error("cannot open input: " + path);
        ParseResult parsed = parse_price_csv(in);
        for (const RowIssue& issue : parsed.issues) {
            out.parse_issues.push_back(path + ":" +
                                       std::to_string(issue.line) + ": " +
                                       issue.ticker + ": " + issue.message);
        }
        for (PriceSeries& series : parsed.series) {
            const std::string ticker = series.ticker;
            if (!merged.emplace(ticker, std::move(series)).second) {
                throw FormatError("ticker " + ticker +
                                  " appears in more than one input file");
            }
        }
    }
    out.n_parsed = merged.size();
    if (merged.empty()) {
        throw ArgumentError("inputs contain no usable price rows");
    }

    const Date lo = config.from.value_or(Date{1, 1, 1});
    const Date hi = config.to.value_or(Date{9999, 12, 31});
    for (auto& [ticker, series] : merged) {
        PriceSeries adjusted = apply_split_adjustment(series);
        PriceSeries kept = (config.from || config.to)
                               ? filter_date_range(adjusted, lo, hi)
                               : std::move(adjusted);
        if (kept.bars.empty()) {
            out.errors.push_back(
                {ticker, "filter", "no bars in the configured date range"});
            continue;
        }
        validate(kept);
        out.series.emplace(ticker, std::move(kept));
    }
    if (out.series.empty()) {
        throw ArgumentError("date filter " + lo.str() + ".." + hi.str() +
                            " leaves an empty cohort");
    }
    return out;
}

Histogram histogram_pdf(const std::vector<double>& values, double bin_width) {
    if (values.empty()) throw ArgumentError("histogram_pdf: empty sample");
    if (!(bin_width > 0.0)) {
        throw ArgumentError("histogram_pdf: bin width must be positive");
    }

    Histogram hist;
    hist.bin_width = bin_width;
    hist.n = values.size();
    hist.mean = mean_of(values);
    hist.stddev = stddev_of(values, hist.mean);

    const auto [lo_it, hi_it] = std::minmax_element(values.begin(),
                                                    values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    const double n = static_cast<double>(values.size());

    if (lo == hi) {
        hist.bin_lo = {lo};
        hist.bin_hi = {hi};
        hist.counts = {values.size()};
        hist.heights = {1.0 / bin_width};
        return hist;
    }

    const auto bins =
        static_cast<std::size_t>(std::floor((hi - lo) / bin_width)) + 1;
    hist.counts.assign(bins, 0);
    for (double v : values) {
        auto idx = static_cast<std::size_t>((v - lo) / bin_width);
        if (idx >= bins) idx = bins - 1;
        ++hist.counts[idx];
    }
    for (std::size_t i = 0; i < bins; ++i) {
        hist.bin_lo.push_back(lo + static_cast<double>(i) * bin_width);
        hist.bin_hi.push_back(lo + static_cast<double>(i + 1) * bin_width);
        hist.heights.push_back(
            (static_cast<double>(hist.counts[i]) / n) / bin_width);
    }
    return hist;
}

GoodFitTable good_fit_table(const std::vector<StockRecord>& stocks) {
    GoodFitTable table;
    for (const StockRecord& rec : stocks) {
        for (std::size_t k = 0; k < 3; ++k) {
            if (!rec.tails[k]) continue;
            ++table.stocks_with_tail[k];
            const FamilyComparison& fc = rec.tails[k]->families;
            constexpr auto kPowerLaw =
                static_cast<std::size_t>(TailFamily::power_law);
            const bool pl_accepted =
                fc.fits[kPowerLaw] && fc.fits[kPowerLaw]->accepted;
            for (std::size_t f = 0; f < 3; ++f) {
                if (fc.fits[f] || !fc.errors[f].empty()) ++table.records[k][f];
                if (fc.fits[f] && fc.fits[f]->accepted) {
                    ++table.accepted[k][f];
                    if (pl_accepted) ++table.accepted_also_power_law[k][f];
                }
            }
        }
    }
    return table;
}

CohortReport run_pipeline(const PipelineConfig& config) {
    validate_config(config);

    CohortReport report;
    report.version = std::string(version);
    report.config = config;

    LoadedCohort cohort = load_cohort(config);
    report.n_stocks_input = cohort.n_parsed;
    report.parse_issues = std::move(cohort.parse_issues);
    report.errors = std::move(cohort.errors);

    std::vector<const PriceSeries*> order;
    order.reserve(cohort.series.size());
    for (const auto& [ticker, series] : cohort.series) {
        order.push_back(&series);
    }

    // Stock-level fan-out; results land in index slots so the reduce below
    // is byte-deterministic whatever the thread interleaving.
    std::vector<StockOutcome> outcomes(order.size());
    const auto work = [&](std::size_t i) {
        outcomes[i] = analyze_one(*order[i], config);
    };
    if (config.jobs <= 1 || order.size() <= 1) {
        for (std::size_t i = 0; i < order.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        const std::size_t n_threads =
            std::min<std::size_t>(config.jobs, order.size());
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i;
                     (i = next.fetch_add(1)) < order.size();) {
                    work(i);
                }
            });
        }
        for (std::thread& t : pool) t.join();
    }

    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        StockOutcome& outcome = outcomes[i];
        for (StageError& err : outcome.errors) {
            report.errors.push_back(std::move(err));
        }
        if (!outcome.record) continue;
        if (config.dump_returns_dir || config.dump_dfa_dir) {
            dump_stock_files(*order[i], *outcome.record, config);
        }
        report.stocks.push_back(std::move(*outcome.record));
    }
    report.n_stocks_analyzed = report.stocks.size();

    report.good_fit = good_fit_table(report.stocks);
    reconcile(report);
    build_alpha_hists(report);
    build_zeta_tendencies(report);
    build_xcorr_dists(report);
    build_table2(report);
    build_yearly(report);
    return report;
}

}  // namespace sesstat
