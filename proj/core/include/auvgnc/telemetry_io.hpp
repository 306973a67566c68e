#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "auvgnc/bound_monitor.hpp"
#include "auvgnc/l1_analysis.hpp"
#include "auvgnc/simulation.hpp"

namespace auvgnc {

/// Header row plus one row per sample. Numbers use the shortest
/// representation that parses back to the same double.
void write_csv(const RunLog& log, std::ostream& out);
void write_csv(const RunLog& log, const std::filesystem::path& file);

/// Inverse of write_csv. Columns are matched by name; unknown or missing
/// columns throw kIoError.
RunLog read_csv(std::istream& in);
RunLog read_csv(const std::filesystem::path& file);

/// {"schema_version", "columns": [...], "rows": [[...], ...]}
std::string log_to_json(const RunLog& log);

std::string metrics_to_json(const Metrics& metrics, const std::string& scenario);
std::string bound_report_to_json(const BoundReport& report);
std::string sweep_to_json(const SweepResult& sweep, const std::string& scenario);
std::string stability_report_to_json(const StabilityReport& report);
std::string path_report_to_json(const PathBoundsReport& report, const PathBounds& bounds);

void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace auvgnc
