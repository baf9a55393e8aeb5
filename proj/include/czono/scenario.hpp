#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "czono/estimator.hpp"
#include "czono/model.hpp"
#include "czono/sets.hpp"

namespace czono {

struct MethodSpec {
  std::string label;
  EstimatorConfig config;
};

// A complete estimation experiment: plant, bounds, truth seed, and the
// methods to run against the shared ground-truth trajectory.
struct Scenario {
  std::string name;
  SystemModel plant;
  ConstrainedZonotope x0_set;
  Zonotope w_noise;  // zero-dimensional when the plant has no disturbance
  Zonotope v_noise;
  Eigen::VectorXd true_x0;
  Eigen::VectorXd input;  // constant input applied at every step
  int horizon = 0;
  std::uint64_t seed = 0;
  bool initial_update = false;
  std::vector<MethodSpec> methods;
};

// Strict scenario parser: unknown keys anywhere are SchemaMismatch, all
// dimensions are cross-checked against the plant, method labels must be
// unique. The schema is documented in docs/scenario-schema.md.
Scenario scenario_from_json(const nlohmann::json& j);

// Reads and parses a scenario file. Malformed JSON raises SchemaMismatch
// with the byte offset of the parse failure.
Scenario load_scenario(const std::string& path);

struct MethodRun {
  std::string label;
  EstimatorConfig config;
  std::vector<StepRecord> steps;  // k = 0 .. horizon
  std::vector<bool> contained;    // truth membership per step
  int violations = 0;
  int empty_updates = 0;
};

struct RunRecord {
  std::string scenario_name;
  std::uint64_t seed = 0;
  int horizon = 0;
  TruthTrajectory truth;
  std::vector<MethodRun> methods;
};

// Simulates the seeded truth once, then runs every configured method against
// it, one worker task per method. Method order in the result matches the
// scenario.
RunRecord run_scenario(const Scenario& s);

// One JSON object per step: set, hull, radius, flags, and the true state the
// run was checked against.
std::string method_run_to_jsonl(const RunRecord& record, const MethodRun& run);

// Step summary table: k, radius, interval-hull volume, containment flag.
std::string method_run_to_csv(const MethodRun& run);

// Re-checks a serialized run line by line with a fresh membership test of
// the recorded true state in the recorded set. Returns the violating step
// indices. SchemaMismatch on empty or malformed records.
std::vector<int> verify_jsonl(const std::string& content);

// Reads the per-step radii (and the method label) back out of a serialized
// run, for cross-run comparisons.
struct RadiusSeries {
  std::string label;
  std::vector<double> radii;
};
RadiusSeries radii_from_jsonl(const std::string& content);

// Pairwise mean radius-ratio matrix over equal-length series.
std::string arr_matrix_csv(const std::vector<RadiusSeries>& series);
std::string arr_matrix_text(const std::vector<RadiusSeries>& series);
// Plot-ready long table: one row per step, one column per series.
std::string radius_table_csv(const std::vector<RadiusSeries>& series);

}  // namespace czono
