#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "vri/config.hpp"

namespace vri {

struct AnalysisOutcome {
  nlohmann::json report;
  std::size_t soft_failures = 0;  // flagged (outlier/insufficient) points
};

// ingest -> volatility -> intervals -> scaling -> dfa (optional) ->
// factors, fanned out per symbol over a bounded worker pool. The report
// is deterministic for identical config + data + seed, independent of
// the worker count.
AnalysisOutcome run_pipeline(const Config& cfg);

// Canonical report bytes (what analyze writes).
std::string serialize_report(const nlohmann::json& report);

// Strict schema check; unknown fields or a wrong schema_version throw.
void validate_report(const nlohmann::json& report);

// Plot-ready CSV for one of the six figure kinds.
void emit_figure_table(const nlohmann::json& report, int fig,
                       std::ostream& out);

}  // namespace vri
