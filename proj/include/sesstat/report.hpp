#pragma once

#include <string>
#include <vector>

#include "sesstat/pipeline.hpp"

namespace sesstat {

// Current wall clock as RFC 3339 UTC ("2024-01-31T09:30:00Z").
std::string report_timestamp_utc();

// The canonical JSON document. Deterministic for a fixed timestamp: key
// order is fixed and doubles use shortest round-trip formatting, so two
// runs over identical inputs and config differ only in the timestamp line.
std::string render_report_json(const CohortReport& report,
                               const std::string& timestamp);

// Writes report.json plus the derived CSV views (table1, table2,
// alpha_hist_*, zeta_binned, xcorr_dist, yearly_xcorr) into dir, creating
// it if needed. On any write failure every file written by this call is
// removed before the error propagates.
void emit_report(const CohortReport& report, const std::string& dir);

// Regenerates the CSV views from an existing report.json text (the CSV
// writers read the JSON, never the in-memory report, so both paths agree).
// Returns the paths written.
std::vector<std::string> emit_csv_views_from_json(const std::string& json_text,
                                                  const std::string& dir);

}  // namespace sesstat
