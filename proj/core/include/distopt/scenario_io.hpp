#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "distopt/optimizer.hpp"
#include "distopt/scenario.hpp"
#include "distopt/welfare.hpp"

namespace distopt {

inline constexpr std::string_view kToolVersion = "0.1.0";

// Settings for the curvature and tipping commands, resolved from the file
// with defaults filled in.
struct CurvatureSettings {
  int district = 0;
  CurvatureOptions options;
  double grid = 0.02;
  double interval_fraction = 0.1;
};

struct SweepSpec {
  SweepAxisKind axis = SweepAxisKind::pi_mD;
  std::vector<double> values;
};

// A parsed scenario file: the resolved scenario plus everything the commands
// need around it. Loading validates eagerly; error messages carry the file
// path and the JSON section that failed.
struct ScenarioDoc {
  std::string name;
  std::string description;
  std::string source_path;
  nlohmann::json document;  // the raw parsed file, kept for control twins
  nlohmann::json metadata;  // free-form, echoed into run reports

  Scenario scenario;
  std::optional<DistrictingPlan> plan;
  std::vector<GroupVals> power_rows;  // Table-1 style power triples

  ObjectiveSpec objective;
  OptimizerConfig optimizer;
  std::optional<SweepSpec> sweep;
  CurvatureSettings curvature;

  // Merge patch producing the paired control scenario (e.g. a gentle-slope
  // twin of a steep one); empty when the file defines none.
  nlohmann::json control;
  bool has_control = false;

  std::string output_prefix;
};

ScenarioDoc load_scenario(const std::string& path);
ScenarioDoc load_scenario_json(const nlohmann::json& doc, const std::string& path_label);

// The document with its control patch applied (RFC 7386 merge) and reloaded.
ScenarioDoc control_twin(const ScenarioDoc& doc);

// Standalone plan file: a JSON array of [mD, nD, R] share rows.
DistrictingPlan load_plan_file(const std::string& path);

// Shortest round-trip decimal for CSV cells; JSON numbers round-trip via the
// serializer itself.
std::string format_double(double x);

void write_text_file(const std::string& path, const std::string& content);

// Run header shared by all reports: tool version, scenario identity, seed,
// and a timestamp only when SOURCE_DATE_EPOCH pins one (outputs must be
// byte-identical across runs otherwise).
nlohmann::json run_metadata(const ScenarioDoc& doc, std::uint64_t seed);

nlohmann::json plan_to_json(const DistrictingPlan& plan);
nlohmann::json opt_result_to_json(const OptResult& result);
nlohmann::json curvature_entry_to_json(const CurvatureEntry& entry);
nlohmann::json tipping_scan_to_json(const TippingScan& scan);
nlohmann::json allocation_report_to_json(const AllocationReport& report);

}  // namespace distopt
