// Command line front end. Subcommands cover ingestion checks, synthetic data
// generation, the full analysis pipeline, focused per-stage views, and CSV
// regeneration from a stored report. Exit code 0 means zero config/IO errors;
// per-stock stage failures are reported in the output but do not fail the run.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sesstat/common.hpp"
#include "sesstat/pipeline.hpp"
#include "sesstat/report.hpp"
#include "sesstat/synth.hpp"

namespace fs = std::filesystem;
using namespace sesstat;

namespace {

struct PipelineOpts {
    std::vector<std::string> inputs;
    std::string from;
    std::string to;
    double tail_fraction = 0.10;
    double significance = 0.01;
    std::optional<double> cv_coefficient;
    bool scan_xmin = false;
    std::size_t dfa_order = 1;
    std::size_t dfa_points = 30;
    int max_lag = 20;
    std::size_t subsets = 10;
    std::size_t bins = 8;
    double hist_bin_width = 0.02;
    std::uint64_t seed = 42;
    std::string out_dir;
    bool exclude_gaps = false;
    std::string dump_returns;
    std::string dump_dfa;
    unsigned jobs = 1;
};

void add_input_options(CLI::App* sub, PipelineOpts& opts) {
    sub->add_option("-i,--input", opts.inputs, "price CSV file (repeatable)")
        ->required();
    sub->add_option("--from", opts.from, "first date kept, YYYY-MM-DD");
    sub->add_option("--to", opts.to, "last date kept, YYYY-MM-DD");
    sub->add_flag("--exclude-gaps", opts.exclude_gaps,
                  "drop returns that span missing trading days");
}

void add_analysis_options(CLI::App* sub, PipelineOpts& opts) {
    sub->add_option("--tail-fraction", opts.tail_fraction,
                    "upper quantile used as the tail sample");
    sub->add_option("--significance", opts.significance,
                    "acceptance level for the tail distribution test");
    sub->add_option("--cv-coefficient", opts.cv_coefficient,
                    "critical value coefficient c in c/sqrt(n); required "
                    "for significance levels other than 0.01");
    sub->add_flag("--scan-xmin", opts.scan_xmin,
                  "pick the tail start by scanning instead of the quantile");
    sub->add_option("--dfa-order", opts.dfa_order,
                    "detrending polynomial order");
    sub->add_option("--dfa-points", opts.dfa_points,
                    "number of log-spaced window sizes");
    sub->add_option("--max-lag", opts.max_lag, "correlogram lag range");
    sub->add_option("--subsets", opts.subsets,
                    "contiguous subsets for exponent cross-correlations");
    sub->add_option("--bins", opts.bins, "bin count for tendency curves");
    sub->add_option("--hist-bin-width", opts.hist_bin_width,
                    "bin width for exponent histograms");
    sub->add_option("--seed", opts.seed, "seed for shuffled baselines");
    sub->add_option("-j,--jobs", opts.jobs, "worker threads for the per-stock "
                                            "fan-out; output is identical for "
                                            "any value");
}

PipelineConfig to_config(const PipelineOpts& opts) {
    PipelineConfig cfg;
    cfg.inputs = opts.inputs;
    if (!opts.from.empty()) cfg.from = Date::parse(opts.from);
    if (!opts.to.empty()) cfg.to = Date::parse(opts.to);
    cfg.tail_fraction = opts.tail_fraction;
    cfg.significance = opts.significance;
    cfg.cv_coefficient = opts.cv_coefficient;
    cfg.scan_xmin = opts.scan_xmin;
    cfg.dfa_order = opts.dfa_order;
    cfg.dfa_points = opts.dfa_points;
    cfg.max_lag = opts.max_lag;
    cfg.subsets = opts.subsets;
    cfg.bins = opts.bins;
    cfg.hist_bin_width = opts.hist_bin_width;
    cfg.seed = opts.seed;
    cfg.out_dir = opts.out_dir;
    cfg.exclude_gaps = opts.exclude_gaps;
    if (!opts.dump_returns.empty()) cfg.dump_returns_dir = opts.dump_returns;
    if (!opts.dump_dfa.empty()) cfg.dump_dfa_dir = opts.dump_dfa;
    cfg.jobs = opts.jobs;
    return cfg;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot read " + path);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

void print_run_summary(const CohortReport& report) {
    std::printf("stocks: %zu parsed, %zu analyzed\n", report.n_stocks_input,
                report.n_stocks_analyzed);
    if (!report.parse_issues.empty()) {
        std::printf("skipped rows: %zu\n", report.parse_issues.size());
    }
    for (const StageError& err : report.errors) {
        std::printf("error [%s] %s: %s\n", err.ticker.c_str(),
                    err.stage.c_str(), err.message.c_str());
    }
}

int cmd_analyze(const PipelineOpts& opts) {
    const PipelineConfig cfg = to_config(opts);
    const CohortReport report = run_pipeline(cfg);
    emit_report(report, cfg.out_dir);
    print_run_summary(report);
    std::printf("wrote %s\n", cfg.out_dir.c_str());
    return 0;
}

int cmd_ingest(const PipelineOpts& opts, const std::string& out_path) {
    const PipelineConfig cfg = to_config(opts);
    validate_config(cfg);
    const LoadedCohort loaded = load_cohort(cfg);
    for (const auto& [ticker, series] : loaded.series) {
        std::printf("%-10s %6zu bars  %s .. %s\n", ticker.c_str(),
                    series.bars.size(), series.bars.front().date.str().c_str(),
                    series.bars.back().date.str().c_str());
    }
    for (const std::string& issue : loaded.parse_issues) {
        std::printf("skipped %s\n", issue.c_str());
    }
    for (const StageError& err : loaded.errors) {
        std::printf("error [%s] %s: %s\n", err.ticker.c_str(),
                    err.stage.c_str(), err.message.c_str());
    }
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw Error("cannot write " + out_path);
        out << "ticker,date,open,close,split_factor\n";
        char buf[160];
        for (const auto& [ticker, series] : loaded.series) {
            for (const PriceBar& bar : series.bars) {
                std::snprintf(buf, sizeof buf, "%s,%s,%.12g,%.12g,%.12g\n",
                              ticker.c_str(), bar.date.str().c_str(), bar.open,
                              bar.close, bar.split_factor);
                out << buf;
            }
        }
        if (!out) throw Error("short write: " + out_path);
        std::printf("wrote %s\n", out_path.c_str());
    }
    return 0;
}

void write_sample_csv(const std::string& path,
                      const std::vector<double>& values) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << "value\n";
    char buf[48];
    for (double v : values) {
        std::snprintf(buf, sizeof buf, "%.12g\n", v);
        out << buf;
    }
    if (!out) throw Error("short write: " + path);
}

void write_pair_csv(const std::string& path,
                    const std::pair<std::vector<double>,
                                    std::vector<double>>& pair) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << "x,y\n";
    char buf[96];
    for (std::size_t i = 0; i < pair.first.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", pair.first[i],
                      pair.second[i]);
        out << buf;
    }
    if (!out) throw Error("short write: " + path);
}

void write_price_csv(const std::string& path,
                     const std::vector<PriceSeries>& series) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << "ticker,date,open,close,split_factor\n";
    char buf[160];
    for (const PriceSeries& s : series) {
        for (const PriceBar& bar : s.bars) {
            std::snprintf(buf, sizeof buf, "%s,%s,%.12g,%.12g,%.12g\n",
                          s.ticker.c_str(), bar.date.str().c_str(), bar.open,
                          bar.close, bar.split_factor);
            out << buf;
        }
    }
    if (!out) throw Error("short write: " + path);
}

void write_gen_sidecar(const std::string& out_path, const GeneratorSpec& spec) {
    nlohmann::ordered_json doc;
    doc["kind"] = std::string(to_string(spec.kind));
    doc["seed"] = spec.seed;
    doc["n"] = spec.n;
    doc["zeta"] = spec.zeta;
    doc["x_min"] = spec.x_min;
    doc["x_star"] = spec.x_star;
    doc["alpha_target"] = spec.alpha_target;
    doc["rho"] = spec.rho;
    doc["ohlc"] = {
        {"n_days", spec.ohlc.n_days},
        {"price0", spec.ohlc.price0},
        {"vol_daytime", spec.ohlc.vol_daytime},
        {"vol_overnight", spec.ohlc.vol_overnight},
        {"rho_nd", spec.ohlc.rho_nd},
        {"heavy_tail_zeta", spec.ohlc.heavy_tail_zeta
                                ? nlohmann::ordered_json(*spec.ohlc.heavy_tail_zeta)
                                : nlohmann::ordered_json(nullptr)},
        {"start_date", spec.ohlc.start_date.str()},
        {"ticker", spec.ohlc.ticker},
    };
    doc["cohort"] = {
        {"n_stocks", spec.cohort.n_stocks},
        {"min_days", spec.cohort.min_days},
        {"max_days", spec.cohort.max_days},
    };
    const std::string path = out_path + ".meta.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << doc.dump(2) << "\n";
    if (!out) throw Error("short write: " + path);
}

int cmd_synth(const GeneratorSpec& spec, const std::string& out_path) {
    const GenOutput result = run_generator(spec);
    if (const fs::path parent = fs::path(out_path).parent_path();
        !parent.empty()) {
        fs::create_directories(parent);
    }
    switch (spec.kind) {
        case GenKind::pareto:
        case GenKind::exponential:
        case GenKind::cutoff:
        case GenKind::long_memory:
            write_sample_csv(out_path, result.samples);
            break;
        case GenKind::correlated_pair:
            write_pair_csv(out_path, result.sample_pair);
            break;
        case GenKind::ohlc_stock:
        case GenKind::cohort:
            write_price_csv(out_path, result.series);
            break;
    }
    write_gen_sidecar(out_path, spec);
    std::printf("wrote %s (+ .meta.json)\n", out_path.c_str());
    return 0;
}

const char* family_names[3] = {"power_law", "exponential",
                               "power_law_cutoff"};
const char* kind_names[3] = {"total", "overnight", "daytime"};

int cmd_tails(const PipelineOpts& opts) {
    CohortReport report = run_pipeline(to_config(opts));
    std::printf("%-10s %-9s %-16s %10s %8s %8s %3s\n", "ticker", "kind",
                "family", "param", "ks_d", "cv", "ok");
    for (const StockRecord& rec : report.stocks) {
        for (std::size_t k = 0; k < 3; ++k) {
            if (!rec.tails[k]) continue;
            const FamilyComparison& families = rec.tails[k]->families;
            for (std::size_t f = 0; f < 3; ++f) {
                if (!families.fits[f]) continue;
                const TailFit& fit = *families.fits[f];
                const double param =
                    f == 1 ? fit.x_star.value_or(0.0) : fit.zeta.value_or(0.0);
                std::printf("%-10s %-9s %-16s %10.4f %8.4f %8.4f %3s\n",
                            rec.ticker.c_str(), kind_names[k],
                            family_names[f], param, fit.ks_d, fit.cv,
                            fit.accepted ? "yes" : "no");
            }
        }
    }
    print_run_summary(report);
    return 0;
}

int cmd_dfa(const PipelineOpts& opts) {
    CohortReport report = run_pipeline(to_config(opts));
    std::printf("%-10s %-12s %-9s %8s %8s %8s %10s\n", "ticker", "series",
                "kind", "single", "short", "long", "crossover");
    for (const StockRecord& rec : report.stocks) {
        if (!rec.dfa) continue;
        const auto print_kind = [&](const char* label, const KindDfa& kd,
                                    std::size_t k) {
            if (!kd.exponents || !kd.exponents->single) return;
            const DfaExponents& e = *kd.exponents;
            std::printf("%-10s %-12s %-9s %8.4f ", rec.ticker.c_str(), label,
                        kind_names[k], e.single->alpha);
            if (e.short_scale && e.long_scale && e.crossover_scale) {
                std::printf("%8.4f %8.4f %10.1f", e.short_scale->alpha,
                            e.long_scale->alpha, *e.crossover_scale);
            } else {
                std::printf("%8s %8s %10s", "-", "-", "-");
            }
            std::printf("%s\n", e.fell_back ? "  (single regime)" : "");
        };
        for (std::size_t k = 0; k < 3; ++k) {
            print_kind("returns", rec.dfa->returns[k], k);
            print_kind("volatility", rec.dfa->volatilities[k], k);
        }
    }
    print_run_summary(report);
    return 0;
}

int cmd_xcorr(const PipelineOpts& opts) {
    CohortReport report = run_pipeline(to_config(opts));
    std::printf("%-10s %-20s %9s %11s %6s %8s\n", "ticker", "pair", "c_zero",
                "noise_sig", "peak", "signif");
    for (const StockRecord& rec : report.stocks) {
        if (!rec.xcorr) continue;
        const LagCorrelogram* grams[3] = {&rec.xcorr->total_overnight,
                                          &rec.xcorr->total_daytime,
                                          &rec.xcorr->overnight_daytime};
        for (std::size_t p = 0; p < 3; ++p) {
            const LagCorrelogram& gram = *grams[p];
            std::printf("%-10s %-20s %9.4f %11.5f %6d %8s\n",
                        rec.ticker.c_str(), std::string(kPairNames[p]).c_str(),
                        gram.c_zero, gram.noise_sigma, gram.argmax_lag(),
                        gram.noise_sigma > 0.0 && significant(gram) ? "yes"
                                                                    : "no");
        }
    }
    for (const XcorrDist& dist : report.xcorr_dists) {
        std::printf("cohort %-20s mean %8.4f  std %8.4f  n %zu  significant "
                    "%zu\n",
                    dist.pair.c_str(), dist.mean, dist.stddev,
                    dist.values.size(), dist.n_significant);
    }
    print_run_summary(report);
    return 0;
}

int cmd_report(const std::string& json_path, const std::string& out_dir) {
    const std::vector<std::string> written =
        emit_csv_views_from_json(read_file(json_path), out_dir);
    std::printf("wrote %zu csv files to %s\n", written.size(),
                out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Session-level stock return statistics"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "",
                   "key=value config file; options for a subcommand go in a "
                   "[subcommand] section");

    PipelineOpts opts;
    std::string ingest_out;
    std::string report_json;
    std::string report_out;
    GeneratorSpec gen;
    std::string gen_kind = "cohort";
    std::string gen_out;
    std::string gen_start;
    std::optional<double> gen_heavy_tail;

    CLI::App* analyze = app.add_subcommand(
        "analyze", "run the full pipeline and write the report");
    add_input_options(analyze, opts);
    add_analysis_options(analyze, opts);
    analyze->add_option("-o,--out", opts.out_dir, "report output directory")
        ->required();
    analyze->add_option("--dump-returns", opts.dump_returns,
                        "also write per-stock session return CSVs here");
    analyze->add_option("--dump-dfa", opts.dump_dfa,
                        "also write per-stock fluctuation curve CSVs here");

    CLI::App* ingest = app.add_subcommand(
        "ingest", "parse and validate price CSVs, summarize per ticker");
    add_input_options(ingest, opts);
    ingest->add_option("-o,--out", ingest_out,
                       "write the merged, adjusted bars to this CSV");

    CLI::App* synth =
        app.add_subcommand("synth", "generate synthetic samples or cohorts");
    synth
        ->add_option("--kind", gen_kind,
                     "pareto|exponential|cutoff|long_memory|correlated_pair|"
                     "ohlc_stock|cohort")
        ->required();
    synth->add_option("--seed", gen.seed, "generator seed");
    synth->add_option("-n,--samples", gen.n, "sample count");
    synth->add_option("--zeta", gen.zeta, "tail exponent");
    synth->add_option("--x-min", gen.x_min, "tail start");
    synth->add_option("--x-star", gen.x_star, "cutoff scale");
    synth->add_option("--alpha", gen.alpha_target,
                      "long-memory fluctuation exponent");
    synth->add_option("--rho", gen.rho, "pair correlation");
    synth->add_option("--days", gen.ohlc.n_days, "bars per stock");
    synth->add_option("--price0", gen.ohlc.price0, "starting price");
    synth->add_option("--vol-daytime", gen.ohlc.vol_daytime,
                      "daytime volatility");
    synth->add_option("--vol-overnight", gen.ohlc.vol_overnight,
                      "overnight volatility");
    synth->add_option("--rho-nd", gen.ohlc.rho_nd,
                      "overnight/daytime correlation");
    synth->add_option("--heavy-tail-zeta", gen_heavy_tail,
                      "fatten volatility tails to this exponent");
    synth->add_option("--start", gen_start, "first bar date, YYYY-MM-DD");
    synth->add_option("--ticker", gen.ohlc.ticker, "ticker or cohort prefix");
    synth->add_option("--stocks", gen.cohort.n_stocks, "cohort size");
    synth->add_option("--min-days", gen.cohort.min_days,
                      "minimum bars per cohort stock");
    synth->add_option("--max-days", gen.cohort.max_days,
                      "maximum bars per cohort stock");
    synth->add_option("-o,--out", gen_out, "output CSV path")->required();

    CLI::App* tails = app.add_subcommand(
        "tails", "run the pipeline and print per-stock tail fits");
    add_input_options(tails, opts);
    add_analysis_options(tails, opts);

    CLI::App* dfa = app.add_subcommand(
        "dfa", "run the pipeline and print fluctuation exponents");
    add_input_options(dfa, opts);
    add_analysis_options(dfa, opts);

    CLI::App* xcorr = app.add_subcommand(
        "xcorr", "run the pipeline and print session cross-correlations");
    add_input_options(xcorr, opts);
    add_analysis_options(xcorr, opts);

    CLI::App* report = app.add_subcommand(
        "report", "regenerate the CSV views from an existing report.json");
    report->add_option("--json", report_json, "path to report.json")
        ->required();
    report->add_option("-o,--out", report_out, "CSV output directory")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (analyze->parsed()) return cmd_analyze(opts);
        if (ingest->parsed()) return cmd_ingest(opts, ingest_out);
        if (synth->parsed()) {
            gen.kind = gen_kind_from_string(gen_kind);
            gen.ohlc.heavy_tail_zeta = gen_heavy_tail;
            if (!gen_start.empty()) {
                gen.ohlc.start_date = Date::parse(gen_start);
            }
            gen.cohort.base = gen.ohlc;
            return cmd_synth(gen, gen_out);
        }
        if (tails->parsed()) return cmd_tails(opts);
        if (dfa->parsed()) return cmd_dfa(opts);
        if (xcorr->parsed()) return cmd_xcorr(opts);
        if (report->parsed()) return cmd_report(report_json, report_out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
