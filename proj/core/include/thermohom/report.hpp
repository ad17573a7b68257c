#pragma once

// End-to-end pipeline, the JSON report and report-to-report verification.

#include "thermohom/config.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace thermohom {

inline constexpr const char* kReportSchema = "thermohom.report/1";

struct PipelineTimings {
  double mesh = 0.0;
  double solve = 0.0;
  double homogenize = 0.0;
};

struct PipelineResult {
  Mesh mesh;
  CellSolutions solutions;
  HomogenizedParameters parameters;
  AveragingChecks checks;
  PipelineTimings seconds;
};

/// mesh -> phi -> P -> first pass -> psi -> R -> homogenize -> checks.
PipelineResult run_pipeline(const RunConfig& config);

/// With `deterministic` set, wall-clock timings are left out so that equal
/// inputs give byte-identical reports.
nlohmann::json make_report(const RunConfig& config, const PipelineResult& result, bool deterministic);

/// Report stub for a failed run. `kind` is config, geometry, solver or
/// internal.
nlohmann::json error_report(const std::string& kind, const std::string& message);

/// Matrices of a report's parameters block as labelled CSV sections.
void write_matrices_csv(std::ostream& os, const nlohmann::json& report);

struct DiffEntry {
  std::string name;  // e.g. "C[0][1]"
  double value = 0.0;
  double reference = 0.0;
  double error = 0.0;      // relative, or absolute over the floor scale
  double tolerance = 0.0;
  bool floored = false;    // reference below the floor, compared absolutely
  bool pass = true;
};

struct VerifyResult {
  bool pass = true;
  std::vector<DiffEntry> entries;  // worst first, by error / tolerance
};

/// Entrywise comparison of the parameters blocks. Entries whose reference
/// magnitude is below 1e-3 of the tensor scale are compared absolutely
/// against that floor. The tensor scale is the largest reference entry, or
/// for G, D and gamma the dimensional scale |C| eps L, |C| (eps L)^2 and
/// |beta| eps L when larger, so that round-off sized tensors compare as
/// zero. Throws LayoutError when the two reports do not have the same
/// tensors and shapes.
VerifyResult verify_reports(const nlohmann::json& report, const nlohmann::json& reference,
                            const ToleranceMap& tolerances = {});

/// Diff table with the `limit` worst entries.
void print_verify(std::ostream& os, const VerifyResult& result, std::size_t limit = 10);

}  // namespace thermohom
