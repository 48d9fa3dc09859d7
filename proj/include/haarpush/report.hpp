#pragma once

#include <string>
#include <vector>

#include "haarpush/verify.hpp"

namespace haarpush {

/// A whole run: schema-versioned so downstream golden files can pin formats.
struct RunReport {
  int schema_version = 1;
  std::string run_id;  // fresh per run; excluded from determinism comparisons
  uint64_t seed = 0;
  std::vector<VerificationReport> reports;

  bool all_pass() const;
};

/// Random hex identifier for one run.
std::string fresh_run_id();

std::string report_json(const RunReport& run);
std::string report_markdown(const RunReport& run);  // one table row per report
std::string report_csv(const RunReport& run);       // one data row per report

/// Render in the named format: "json", "md" or "csv".
std::string render_report(const RunReport& run, const std::string& format);

/// Inverse of report_json; throws Error on malformed input or an
/// unsupported schema_version.
RunReport parse_report_json(const std::string& text);

}  // namespace haarpush
