#include "sesstat/report.hpp"

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace sesstat {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string num12(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

ordered_json json_or_null(const std::optional<double>& v) {
    if (!v) return nullptr;
    return *v;
}

ordered_json json_or_null(const std::optional<std::string>& v) {
    if (!v) return nullptr;
    return *v;
}

ordered_json config_json(const PipelineConfig& config) {
    ordered_json j;
    j["inputs"] = config.inputs;
    j["from"] = config.from ? ordered_json(config.from->str()) : nullptr;
    j["to"] = config.to ? ordered_json(config.to->str()) : nullptr;
    j["tail_fraction"] = config.tail_fraction;
    j["significance"] = config.significance;
    j["cv_coefficient"] = json_or_null(config.cv_coefficient);
    j["scan_xmin"] = config.scan_xmin;
    j["dfa_order"] = config.dfa_order;
    j["dfa_points"] = config.dfa_points;
    j["max_lag"] = config.max_lag;
    j["subsets"] = config.subsets;
    j["bins"] = config.bins;
    j["hist_bin_width"] = config.hist_bin_width;
    j["seed"] = config.seed;
    j["out_dir"] = config.out_dir;
    j["exclude_gaps"] = config.exclude_gaps;
    j["dump_returns_dir"] = json_or_null(config.dump_returns_dir);
    j["dump_dfa_dir"] = json_or_null(config.dump_dfa_dir);
    j["jobs"] = config.jobs;
    return j;
}

ordered_json fit_json(const TailFit& fit) {
    ordered_json j;
    j["family"] = std::string(to_string(fit.family));
    j["zeta"] = json_or_null(fit.zeta);
    j["x_star"] = json_or_null(fit.x_star);
    j["x_min"] = fit.x_min;
    j["n_tail"] = fit.n_tail;
    j["ks_d"] = fit.ks_d;
    j["cv"] = fit.cv;
    j["accepted"] = fit.accepted;
    j["log_likelihood"] = fit.log_likelihood;
    return j;
}

ordered_json alpha_fit_json(const AlphaFit& fit) {
    ordered_json j;
    j["alpha"] = fit.alpha;
    j["rms_residual"] = fit.rms_residual;
    j["l_lo"] = fit.l_lo;
    j["l_hi"] = fit.l_hi;
    j["n_points"] = fit.n_points;
    return j;
}

ordered_json kind_dfa_json(const KindDfa& kd) {
    ordered_json j;
    j["error"] = kd.error;
    if (!kd.exponents) {
        j["exponents"] = nullptr;
        return j;
    }
    ordered_json e;
    const DfaExponents& ex = *kd.exponents;
    e["single"] = ex.single ? alpha_fit_json(*ex.single) : ordered_json(nullptr);
    e["short_scale"] =
        ex.short_scale ? alpha_fit_json(*ex.short_scale) : ordered_json(nullptr);
    e["long_scale"] =
        ex.long_scale ? alpha_fit_json(*ex.long_scale) : ordered_json(nullptr);
    e["crossover_scale"] = json_or_null(ex.crossover_scale);
    e["fell_back"] = ex.fell_back;
    j["exponents"] = std::move(e);
    return j;
}

ordered_json correlogram_json(const LagCorrelogram& cg) {
    ordered_json j;
    j["lags"] = cg.lags;
    j["values"] = cg.values;
    j["c_zero"] = cg.c_zero;
    j["noise_sigma"] = cg.noise_sigma;
    j["n_overlap"] = cg.n_overlap;
    j["argmax_lag"] = cg.argmax_lag();
    if (cg.noise_sigma > 0.0) {
        j["significance_ratio"] = significance_ratio(cg);
        j["significant"] = significant(cg);
    } else {
        j["significance_ratio"] = nullptr;
        j["significant"] = nullptr;
    }
    return j;
}

ordered_json histogram_json(const Histogram& hist) {
    ordered_json j;
    j["n"] = hist.n;
    j["bin_width"] = hist.bin_width;
    j["mean"] = hist.mean;
    j["stddev"] = hist.stddev;
    ordered_json bins = ordered_json::array();
    for (std::size_t i = 0; i < hist.counts.size(); ++i) {
        ordered_json bin;
        bin["lo"] = hist.bin_lo[i];
        bin["hi"] = hist.bin_hi[i];
        bin["count"] = hist.counts[i];
        bin["height"] = hist.heights[i];
        bins.push_back(std::move(bin));
    }
    j["bins"] = std::move(bins);
    return j;
}

ordered_json stock_json(const StockRecord& rec) {
    ordered_json j;
    j["ticker"] = rec.ticker;
    j["n_bars"] = rec.n_bars;
    j["n_returns"] = rec.n_returns;
    j["n_gap_entries"] = rec.n_gap_entries;

    ordered_json tails;
    for (std::size_t k = 0; k < 3; ++k) {
        const std::string key(to_string(static_cast<Kind>(k)));
        if (!rec.tails[k]) {
            tails[key] = nullptr;
            continue;
        }
        const TailStage& stage = *rec.tails[k];
        ordered_json t;
        t["x_min"] = stage.x_min;
        t["n_tail"] = stage.n_tail;
        ordered_json families;
        for (std::size_t f = 0; f < 3; ++f) {
            const std::string fam(to_string(static_cast<TailFamily>(f)));
            ordered_json entry;
            entry["fit"] = stage.families.fits[f]
                               ? fit_json(*stage.families.fits[f])
                               : ordered_json(nullptr);
            entry["error"] = stage.families.errors[f];
            families[fam] = std::move(entry);
        }
        t["families"] = std::move(families);
        t["best"] = stage.families.best
                        ? ordered_json(std::string(
                              to_string(*stage.families.best)))
                        : ordered_json(nullptr);
        tails[key] = std::move(t);
    }
    j["tails"] = std::move(tails);

    if (rec.dfa) {
        ordered_json d;
        ordered_json returns;
        ordered_json volatilities;
        for (std::size_t k = 0; k < 3; ++k) {
            const std::string key(to_string(static_cast<Kind>(k)));
            returns[key] = kind_dfa_json(rec.dfa->returns[k]);
            volatilities[key] = kind_dfa_json(rec.dfa->volatilities[k]);
        }
        d["returns"] = std::move(returns);
        d["volatilities"] = std::move(volatilities);
        j["dfa"] = std::move(d);
    } else {
        j["dfa"] = nullptr;
    }

    if (rec.xcorr) {
        ordered_json x;
        x[std::string(kPairNames[0])] =
            correlogram_json(rec.xcorr->total_overnight);
        x[std::string(kPairNames[1])] =
            correlogram_json(rec.xcorr->total_daytime);
        x[std::string(kPairNames[2])] =
            correlogram_json(rec.xcorr->overnight_daytime);
        j["xcorr"] = std::move(x);
    } else {
        j["xcorr"] = nullptr;
    }

    ordered_json yearly;
    for (std::size_t p = 0; p < 3; ++p) {
        const std::string key(kPairNames[p]);
        if (!rec.yearly[p]) {
            yearly[key] = nullptr;
            continue;
        }
        const YearlyXcorr& yx = *rec.yearly[p];
        ordered_json y;
        y["years"] = yx.years;
        y["values"] = yx.values;
        y["counts"] = yx.counts;
        y["omitted_years"] = yx.omitted_years;
        y["global_c"] = yx.global_c;
        yearly[key] = std::move(y);
    }
    j["yearly"] = std::move(yearly);
    return j;
}

ordered_json cohort_summary_json(const CohortSummary& summary) {
    ordered_json j;
    j["subsets"] = summary.subset_count;
    j["mean"] = summary.mean;
    j["stddev"] = summary.stddev;
    j["shuffled_baseline"] = json_or_null(summary.shuffled_baseline);
    j["seed"] = summary.seed;
    j["subset_values"] = summary.subset_values;
    return j;
}

ordered_json report_json_doc(const CohortReport& report,
                             const std::string& timestamp) {
    static const std::array<std::string, 3> kKindNames = {"total", "overnight",
                                                          "daytime"};
    static const std::array<std::string, 3> kFamilyNames = {
        "power_law", "exponential", "power_law_cutoff"};

    ordered_json doc;
    ordered_json meta;
    meta["version"] = report.version;
    meta["timestamp"] = timestamp;
    meta["seed"] = report.config.seed;
    meta["ks_verdict"] =
        "fixed asymptotic critical value; anticonservative when parameters "
        "are estimated from the sample";
    meta["config"] = config_json(report.config);
    meta["n_stocks_input"] = report.n_stocks_input;
    meta["n_stocks_analyzed"] = report.n_stocks_analyzed;
    ordered_json errors = ordered_json::array();
    for (const StageError& err : report.errors) {
        ordered_json e;
        e["ticker"] = err.ticker;
        e["stage"] = err.stage;
        e["message"] = err.message;
        errors.push_back(std::move(e));
    }
    meta["errors"] = std::move(errors);
    meta["parse_issues"] = report.parse_issues;
    doc["meta"] = std::move(meta);

    ordered_json stocks = ordered_json::array();
    for (const StockRecord& rec : report.stocks) {
        stocks.push_back(stock_json(rec));
    }
    doc["stocks"] = std::move(stocks);

    ordered_json cohort;
    {
        ordered_json gf;
        gf["kinds"] = kKindNames;
        gf["families"] = kFamilyNames;
        gf["stocks_with_tail"] = report.good_fit.stocks_with_tail;
        gf["records"] = report.good_fit.records;
        gf["accepted"] = report.good_fit.accepted;
        gf["accepted_also_power_law"] =
            report.good_fit.accepted_also_power_law;
        cohort["good_fit"] = std::move(gf);
    }
    {
        ordered_json hists = ordered_json::array();
        for (const AlphaHistogram& ah : report.alpha_hists) {
            ordered_json h;
            h["name"] = ah.name;
            h["n"] = ah.values.size();
            h["hist"] = histogram_json(ah.hist);
            h["values"] = ah.values;
            hists.push_back(std::move(h));
        }
        cohort["alpha_hist"] = std::move(hists);
    }
    {
        ordered_json zetas = ordered_json::array();
        for (const ZetaTendency& zt : report.zeta_tendencies) {
            ordered_json z;
            z["pair"] = zt.pair;
            z["n"] = zt.x.size();
            ordered_json bins = ordered_json::array();
            if (zt.binned) {
                for (const BinStat& bin : zt.binned->bins) {
                    ordered_json b;
                    b["lo"] = bin.lo;
                    b["hi"] = bin.hi;
                    b["mean"] = bin.mean;
                    b["stddev"] = bin.stddev;
                    b["count"] = bin.count;
                    b["merged"] = bin.merged;
                    bins.push_back(std::move(b));
                }
            }
            z["bins"] = std::move(bins);
            z["x"] = zt.x;
            z["y"] = zt.y;
            zetas.push_back(std::move(z));
        }
        cohort["zeta"] = std::move(zetas);
    }
    {
        ordered_json dists = ordered_json::array();
        for (const XcorrDist& xd : report.xcorr_dists) {
            ordered_json d;
            d["pair"] = xd.pair;
            d["n"] = xd.values.size();
            d["mean"] = xd.mean;
            d["stddev"] = xd.stddev;
            d["n_significant"] = xd.n_significant;
            d["hist"] = histogram_json(xd.hist);
            d["values"] = xd.values;
            dists.push_back(std::move(d));
        }
        cohort["xcorr_dist"] = std::move(dists);
    }
    {
        ordered_json rows = ordered_json::array();
        for (const AlphaXcorrRow& row : report.table2) {
            ordered_json r;
            r["measure"] = row.measure;
            r["n"] = row.n;
            r["error"] = row.error;
            r["summary"] = row.summary ? cohort_summary_json(*row.summary)
                                       : ordered_json(nullptr);
            rows.push_back(std::move(r));
        }
        cohort["table2"] = std::move(rows);
    }
    {
        ordered_json years = ordered_json::array();
        for (const YearlyAggregate& agg : report.yearly) {
            ordered_json y;
            y["year"] = agg.year;
            ordered_json pairs;
            for (std::size_t p = 0; p < 3; ++p) {
                ordered_json entry;
                entry["mean"] = agg.mean[p];
                entry["stddev"] = agg.stddev[p];
                entry["n_stocks"] = agg.n_stocks[p];
                pairs[std::string(kPairNames[p])] = std::move(entry);
            }
            y["pairs"] = std::move(pairs);
            years.push_back(std::move(y));
        }
        cohort["yearly"] = std::move(years);
    }
    doc["cohort"] = std::move(cohort);
    return doc;
}

void write_file(const fs::path& path, const std::string& content,
                std::vector<std::string>& written) {
    written.push_back(path.string());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    out.flush();
    if (!out) throw Error("short write: " + path.string());
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

// CSV cell for a JSON value that may be null (empty cell) or numeric.
std::string csv_cell(const ordered_json& v) {
    if (v.is_null()) return "";
    if (v.is_number_float()) return num12(v.get<double>());
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
    return csv_escape(v.get<std::string>());
}

const ordered_json& at(const ordered_json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw FormatError(std::string("report json: missing key: ") + key);
    }
    return *it;
}

std::string table1_csv(const ordered_json& cohort) {
    const ordered_json& gf = at(cohort, "good_fit");
    const auto& kinds = at(gf, "kinds");
    const auto& families = at(gf, "families");
    std::string out = "kind,family,records,accepted,accepted_also_power_law\n";
    for (std::size_t k = 0; k < kinds.size(); ++k) {
        for (std::size_t f = 0; f < families.size(); ++f) {
            out += csv_cell(kinds[k]) + ',' + csv_cell(families[f]) + ',' +
                   csv_cell(at(gf, "records")[k][f]) + ',' +
                   csv_cell(at(gf, "accepted")[k][f]) + ',' +
                   csv_cell(at(gf, "accepted_also_power_law")[k][f]) + '\n';
        }
    }
    return out;
}

std::string table2_csv(const ordered_json& cohort) {
    std::string out =
        "measure,n_stocks,subsets,mean,stddev,shuffled_baseline,seed,error\n";
    for (const ordered_json& row : at(cohort, "table2")) {
        const ordered_json& summary = at(row, "summary");
        out += csv_cell(at(row, "measure")) + ',' + csv_cell(at(row, "n")) +
               ',';
        if (summary.is_null()) {
            out += ",,,,,";
        } else {
            out += csv_cell(at(summary, "subsets")) + ',' +
                   csv_cell(at(summary, "mean")) + ',' +
                   csv_cell(at(summary, "stddev")) + ',' +
                   csv_cell(at(summary, "shuffled_baseline")) + ',' +
                   csv_cell(at(summary, "seed")) + ',';
        }
        out += csv_cell(at(row, "error")) + '\n';
    }
    return out;
}

std::string hist_csv(const ordered_json& hist) {
    std::string out = "bin_lo,bin_hi,count,height\n";
    for (const ordered_json& bin : at(hist, "bins")) {
        out += csv_cell(at(bin, "lo")) + ',' + csv_cell(at(bin, "hi")) + ',' +
               csv_cell(at(bin, "count")) + ',' + csv_cell(at(bin, "height")) +
               '\n';
    }
    return out;
}

std::string zeta_binned_csv(const ordered_json& cohort) {
    std::string out = "pair,bin_lo,bin_hi,mean,stddev,count,merged\n";
    for (const ordered_json& zt : at(cohort, "zeta")) {
        for (const ordered_json& bin : at(zt, "bins")) {
            out += csv_cell(at(zt, "pair")) + ',' + csv_cell(at(bin, "lo")) +
                   ',' + csv_cell(at(bin, "hi")) + ',' +
                   csv_cell(at(bin, "mean")) + ',' +
                   csv_cell(at(bin, "stddev")) + ',' +
                   csv_cell(at(bin, "count")) + ',' +
                   csv_cell(at(bin, "merged")) + '\n';
        }
    }
    return out;
}

std::string xcorr_dist_csv(const ordered_json& cohort) {
    std::string out = "pair,bin_lo,bin_hi,count,height\n";
    for (const ordered_json& xd : at(cohort, "xcorr_dist")) {
        for (const ordered_json& bin : at(at(xd, "hist"), "bins")) {
            out += csv_cell(at(xd, "pair")) + ',' + csv_cell(at(bin, "lo")) +
                   ',' + csv_cell(at(bin, "hi")) + ',' +
                   csv_cell(at(bin, "count")) + ',' +
                   csv_cell(at(bin, "height")) + '\n';
        }
    }
    return out;
}

std::string yearly_csv(const ordered_json& cohort) {
    std::string out = "year,pair,mean,stddev,n_stocks\n";
    for (const ordered_json& y : at(cohort, "yearly")) {
        const ordered_json& pairs = at(y, "pairs");
        for (const auto& pair_name : kPairNames) {
            const ordered_json& entry = at(pairs, std::string(pair_name).c_str());
            const bool empty = at(entry, "n_stocks").get<std::uint64_t>() == 0;
            out += csv_cell(at(y, "year")) + ',' + std::string(pair_name) +
                   ',' + (empty ? "" : csv_cell(at(entry, "mean"))) + ',' +
                   (empty ? "" : csv_cell(at(entry, "stddev"))) + ',' +
                   csv_cell(at(entry, "n_stocks")) + '\n';
        }
    }
    return out;
}

std::vector<std::string> write_csv_views(const ordered_json& doc,
                                         const fs::path& dir) {
    const ordered_json& cohort = at(doc, "cohort");
    std::vector<std::string> written;
    try {
        write_file(dir / "table1.csv", table1_csv(cohort), written);
        write_file(dir / "table2.csv", table2_csv(cohort), written);
        for (const ordered_json& ah : at(cohort, "alpha_hist")) {
            const std::string name = at(ah, "name").get<std::string>();
            write_file(dir / ("alpha_hist_" + name + ".csv"),
                       hist_csv(at(ah, "hist")), written);
        }
        write_file(dir / "zeta_binned.csv", zeta_binned_csv(cohort), written);
        write_file(dir / "xcorr_dist.csv", xcorr_dist_csv(cohort), written);
        write_file(dir / "yearly_xcorr.csv", yearly_csv(cohort), written);
    } catch (...) {
        for (const std::string& path : written) {
            std::error_code ec;
            fs::remove(path, ec);
        }
        throw;
    }
    return written;
}

}  // namespace

std::string report_timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[40];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string render_report_json(const CohortReport& report,
                               const std::string& timestamp) {
    return report_json_doc(report, timestamp).dump(2) + "\n";
}

void emit_report(const CohortReport& report, const std::string& dir) {
    fs::create_directories(dir);
    std::vector<std::string> written;
    try {
        const std::string json_text =
            render_report_json(report, report_timestamp_utc());
        write_file(fs::path(dir) / "report.json", json_text, written);
        const ordered_json doc = ordered_json::parse(json_text);
        std::vector<std::string> csvs = write_csv_views(doc, dir);
        written.insert(written.end(), csvs.begin(), csvs.end());
    } catch (...) {
        for (const std::string& path : written) {
            std::error_code ec;
            fs::remove(path, ec);
        }
        throw;
    }
}

std::vector<std::string> emit_csv_views_from_json(const std::string& json_text,
                                                  const std::string& dir) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw FormatError(std::string("report json: ") + e.what());
    }
    fs::create_directories(dir);
    return write_csv_views(doc, dir);
}

}  // namespace sesstat
