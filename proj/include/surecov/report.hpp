#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "surecov/sim.hpp"

namespace surecov {

enum class ReportFormat { json, csv };

ReportFormat parse_report_format(const std::string& text);

/// Fully resolved configuration, enough to rerun bit-identically. The thread
/// count is left out because it never changes results.
nlohmann::json config_to_json(const ExperimentConfig& config);

/// Report as JSON. Wall time is included only when `include_timing` is set,
/// so that reruns produce byte-identical output by default.
nlohmann::json report_to_json(const ExperimentReport& report, bool include_timing = false);

/// Flat CSV tables (one block per section, each preceded by a `# section`
/// line) for plotting.
void write_report_csv(std::ostream& out, const ExperimentReport& report, bool include_timing = false);

std::string serialize_report(const ExperimentReport& report, ReportFormat format,
                             bool include_timing = false);

}  // namespace surecov
