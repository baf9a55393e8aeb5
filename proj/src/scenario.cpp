#include "czono/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <future>
#include <initializer_list>
#include <set>
#include <sstream>
#include <utility>

#include "czono/errors.hpp"
#include "czono/serialize.hpp"

namespace czono {
namespace {

using nlohmann::json;

void expect_keys(const json& j, const std::string& what,
                 std::initializer_list<const char*> required,
                 std::initializer_list<const char*> optional) {
  if (!j.is_object()) throw SchemaMismatch(what + " must be an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : required) known = known || item.key() == k;
    for (const char* k : optional) known = known || item.key() == k;
    if (!known) throw SchemaMismatch("unknown key '" + item.key() + "' in " + what);
  }
  for (const char* k : required) {
    if (!j.contains(k)) throw SchemaMismatch(what + " is missing key '" + k + "'");
  }
}

std::string string_field(const json& j, const char* key, const std::string& what) {
  if (!j.at(key).is_string()) throw SchemaMismatch(what + "." + key + " must be a string");
  return j.at(key).get<std::string>();
}

bool bool_field(const json& j, const char* key, const std::string& what) {
  if (!j.at(key).is_boolean()) throw SchemaMismatch(what + "." + key + " must be a boolean");
  return j.at(key).get<bool>();
}

int int_field(const json& j, const char* key, const std::string& what) {
  if (!j.at(key).is_number_integer()) {
    throw SchemaMismatch(what + "." + key + " must be an integer");
  }
  return j.at(key).get<int>();
}

std::vector<std::string> string_list(const json& j, const std::string& what) {
  if (!j.is_array()) throw SchemaMismatch(what + " must be an array of strings");
  std::vector<std::string> out;
  for (const json& item : j) {
    if (!item.is_string()) throw SchemaMismatch(what + " must contain only strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

Eigen::VectorXd number_vector(const json& j, const std::string& what) {
  if (!j.is_array()) throw SchemaMismatch(what + " must be an array of numbers");
  Eigen::VectorXd out(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const json& item : j) {
    if (!item.is_number()) throw SchemaMismatch(what + " must contain only numbers");
    out[i++] = item.get<double>();
  }
  return out;
}

Box parse_box(const json& j, const std::string& what) {
  if (!j.is_array()) throw SchemaMismatch(what + ".box must be an array of [lo, hi] pairs");
  Box out;
  for (const json& pair : j) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
      throw SchemaMismatch(what + ".box entries must be [lo, hi] number pairs");
    }
    const double lo = pair[0].get<double>();
    const double hi = pair[1].get<double>();
    if (lo > hi) throw SchemaMismatch(what + ".box has an empty interval");
    out.push_back(Interval(lo, hi));
  }
  return out;
}

ConstrainedZonotope parse_set(const json& j, const std::string& what) {
  if (j.is_object() && j.contains("box")) {
    expect_keys(j, what, {"box"}, {});
    return ConstrainedZonotope::from_box(parse_box(j.at("box"), what));
  }
  return cz_from_json(j);
}

Zonotope parse_noise(const json& j, const std::string& what) {
  if (j.is_object() && j.contains("box")) {
    expect_keys(j, what, {"box"}, {});
    return Zonotope::from_box(parse_box(j.at("box"), what));
  }
  const ConstrainedZonotope z = cz_from_json(j);
  if (z.num_constraints() > 0) {
    throw SchemaMismatch(what + " must be constraint-free so the truth rollout can sample it");
  }
  return Zonotope(z.G, z.c);
}

SystemModel parse_plant(const json& j) {
  expect_keys(j, "plant", {"states", "dynamics"},
              {"inputs", "process_noise", "measurement_noise", "measurement"});
  const auto list_or_empty = [&j](const char* key, const std::string& what) {
    return j.contains(key) ? string_list(j.at(key), what) : std::vector<std::string>();
  };
  return SystemModel::from_text(string_list(j.at("states"), "plant.states"),
                                list_or_empty("inputs", "plant.inputs"),
                                list_or_empty("process_noise", "plant.process_noise"),
                                list_or_empty("measurement_noise", "plant.measurement_noise"),
                                string_list(j.at("dynamics"), "plant.dynamics"),
                                list_or_empty("measurement", "plant.measurement"));
}

ApproxHeuristic parse_heuristic(const std::string& name, const std::string& what) {
  if (name == "hull_center") return ApproxHeuristic::HullCenter;
  if (name == "closest_point") return ApproxHeuristic::ClosestPoint;
  if (name == "weighted_diam") return ApproxHeuristic::WeightedDiamLp;
  if (name == "recenter") return ApproxHeuristic::Recenter;
  throw SchemaMismatch(what + ".heuristic '" + name + "' is not recognized");
}

std::vector<MethodSpec> parse_methods(const json& j) {
  if (!j.is_array() || j.empty()) {
    throw SchemaMismatch("methods must be a nonempty array");
  }
  std::vector<MethodSpec> out;
  std::set<std::string> labels;
  int index = 0;
  for (const json& mj : j) {
    const std::string what = "methods[" + std::to_string(index++) + "]";
    expect_keys(mj, what, {"method"},
                {"label", "heuristic", "max_generators", "max_constraints", "divisions",
                 "reduction"});
    MethodSpec spec;
    const std::string name = string_field(mj, "method", what);
    const auto method = method_from_name(name);
    if (!method) throw SchemaMismatch(what + ".method '" + name + "' is not recognized");
    spec.config.method = *method;
    if (mj.contains("heuristic")) {
      spec.config.heuristic = parse_heuristic(string_field(mj, "heuristic", what), what);
    }
    if (mj.contains("max_generators")) {
      spec.config.max_generators = int_field(mj, "max_generators", what);
    }
    if (mj.contains("max_constraints")) {
      spec.config.max_constraints = int_field(mj, "max_constraints", what);
    }
    if (mj.contains("divisions")) spec.config.divisions = int_field(mj, "divisions", what);
    if (mj.contains("reduction")) {
      const std::string r = string_field(mj, "reduction", what);
      if (r == "A") {
        spec.config.reduction = GenReduction::MethodA;
      } else if (r == "B") {
        spec.config.reduction = GenReduction::MethodB;
      } else {
        throw SchemaMismatch(what + ".reduction must be \"A\" or \"B\"");
      }
    }
    if (mj.contains("label")) {
      spec.label = string_field(mj, "label", what);
    } else if (spec.config.method == EstimationMethod::CZIB) {
      spec.label = "CZIB-" + std::to_string(spec.config.divisions);
    } else {
      spec.label = method_name(spec.config.method);
    }
    if (!labels.insert(spec.label).second) {
      throw SchemaMismatch("duplicate method label '" + spec.label + "'");
    }
    out.push_back(std::move(spec));
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json parse_step_line(const std::string& line, int lineno) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw SchemaMismatch("run record line " + std::to_string(lineno) + ": " + e.what());
  }
  expect_keys(j, "step record",
              {"contained", "empty_update", "hull", "k", "method", "radius", "set", "truth"},
              {});
  return j;
}

void check_series(const std::vector<RadiusSeries>& series) {
  if (series.empty()) throw DomainError("no radius series given");
  for (const RadiusSeries& s : series) {
    if (s.radii.size() != series.front().radii.size()) {
      throw LengthMismatch("radius series differ in length");
    }
  }
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  expect_keys(j, "scenario",
              {"name", "plant", "x0_set", "w_set", "v_set", "true_x0", "horizon", "seed",
               "methods"},
              {"input", "initial_update"});

  const int horizon = int_field(j, "horizon", "scenario");
  if (horizon < 0) throw SchemaMismatch("horizon must be nonnegative");
  if (!j.at("seed").is_number_unsigned()) {
    throw SchemaMismatch("scenario.seed must be a nonnegative integer");
  }
  Scenario s{string_field(j, "name", "scenario"),
             parse_plant(j.at("plant")),
             parse_set(j.at("x0_set"), "x0_set"),
             parse_noise(j.at("w_set"), "w_set"),
             parse_noise(j.at("v_set"), "v_set"),
             number_vector(j.at("true_x0"), "true_x0"),
             j.contains("input") ? number_vector(j.at("input"), "input") : Eigen::VectorXd(),
             horizon,
             j.at("seed").get<std::uint64_t>(),
             j.contains("initial_update") && bool_field(j, "initial_update", "scenario"),
             parse_methods(j.at("methods"))};

  if (s.x0_set.dim() != s.plant.n_x()) throw SchemaMismatch("x0_set does not match the plant");
  if (s.w_noise.dim() != s.plant.n_w()) throw SchemaMismatch("w_set does not match the plant");
  if (s.v_noise.dim() != s.plant.n_v()) throw SchemaMismatch("v_set does not match the plant");
  if (s.true_x0.size() != s.plant.n_x()) throw SchemaMismatch("true_x0 does not match the plant");
  if (s.input.size() != s.plant.n_u()) throw SchemaMismatch("input does not match the plant");
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open scenario file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaMismatch(path + ": malformed JSON at byte " + std::to_string(e.byte) + ": " +
                         e.what());
  }
  return scenario_from_json(j);
}

RunRecord run_scenario(const Scenario& s) {
  RunRecord record;
  record.scenario_name = s.name;
  record.seed = s.seed;
  record.horizon = s.horizon;
  record.truth =
      simulate_truth(s.plant, s.true_x0, s.input, s.horizon, s.w_noise, s.v_noise, s.seed);

  const ConstrainedZonotope w_cz = ConstrainedZonotope::from_zonotope(s.w_noise);
  const ConstrainedZonotope v_cz = ConstrainedZonotope::from_zonotope(s.v_noise);

  const auto run_one = [&s, &record, &w_cz, &v_cz](const MethodSpec& spec) {
    MethodRun run;
    run.label = spec.label;
    run.config = spec.config;

    std::optional<Eigen::VectorXd> y0;
    if (s.initial_update && s.plant.has_measurement()) y0 = record.truth.outputs[0];
    EstimatorState state = initial_state(spec.config, s.plant, s.x0_set, s.input, y0, v_cz);
    for (int k = 1; k <= s.horizon; ++k) {
      state = estimator_step(spec.config, state, s.plant, s.input,
                             record.truth.outputs[static_cast<std::size_t>(k)], w_cz, v_cz);
    }

    run.steps = std::move(state.history);
    for (std::size_t k = 0; k < run.steps.size(); ++k) {
      const bool inside = contains_point(run.steps[k].set, record.truth.states[k]);
      run.contained.push_back(inside);
      if (!inside) ++run.violations;
      if (run.steps[k].empty_update) ++run.empty_updates;
    }
    return run;
  };

  std::vector<std::future<MethodRun>> workers;
  workers.reserve(s.methods.size());
  for (const MethodSpec& spec : s.methods) {
    workers.push_back(std::async(std::launch::async, run_one, spec));
  }
  for (auto& worker : workers) record.methods.push_back(worker.get());
  return record;
}

std::string method_run_to_jsonl(const RunRecord& record, const MethodRun& run) {
  std::string out;
  for (std::size_t k = 0; k < run.steps.size(); ++k) {
    const StepRecord& step = run.steps[k];
    json line;
    line["k"] = step.k;
    line["method"] = run.label;
    line["set"] = cz_to_json(step.set);
    json hull = json::array();
    for (const Interval& axis : step.hull) hull.push_back(json::array({axis.lo(), axis.hi()}));
    line["hull"] = std::move(hull);
    line["radius"] = step.radius;
    line["contained"] = static_cast<bool>(run.contained[k]);
    line["empty_update"] = step.empty_update;
    json truth = json::array();
    for (Eigen::Index i = 0; i < record.truth.states[k].size(); ++i) {
      truth.push_back(record.truth.states[k][i]);
    }
    line["truth"] = std::move(truth);
    out += line.dump();
    out += '\n';
  }
  return out;
}

std::string method_run_to_csv(const MethodRun& run) {
  std::string out = "k,radius,volume,contained\n";
  for (std::size_t k = 0; k < run.steps.size(); ++k) {
    const StepRecord& step = run.steps[k];
    double volume = 1.0;
    for (const Interval& axis : step.hull) volume *= axis.diam();
    out += std::to_string(step.k);
    out += ',';
    out += format_double(step.radius);
    out += ',';
    out += format_double(volume);
    out += ',';
    out += run.contained[k] ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::vector<int> verify_jsonl(const std::string& content) {
  std::vector<int> violations;
  std::istringstream in(content);
  std::string line;
  int lineno = 0;
  int records = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const json j = parse_step_line(line, lineno);
    ++records;
    const ConstrainedZonotope set = cz_from_json(j.at("set"));
    const Eigen::VectorXd truth = number_vector(j.at("truth"), "step record truth");
    if (truth.size() != set.dim()) {
      throw SchemaMismatch("run record line " + std::to_string(lineno) +
                           ": truth dimension does not match the set");
    }
    if (!contains_point(set, truth)) {
      violations.push_back(j.at("k").get<int>());
    }
  }
  if (records == 0) throw SchemaMismatch("empty run record");
  return violations;
}

RadiusSeries radii_from_jsonl(const std::string& content) {
  RadiusSeries series;
  std::istringstream in(content);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const json j = parse_step_line(line, lineno);
    if (!j.at("radius").is_number()) {
      throw SchemaMismatch("run record line " + std::to_string(lineno) +
                           ": radius must be a number");
    }
    if (series.radii.empty()) series.label = j.at("method").get<std::string>();
    series.radii.push_back(j.at("radius").get<double>());
  }
  if (series.radii.empty()) throw SchemaMismatch("empty run record");
  return series;
}

std::string arr_matrix_csv(const std::vector<RadiusSeries>& series) {
  check_series(series);
  std::string out = "method";
  for (const RadiusSeries& s : series) {
    out += ',';
    out += s.label;
  }
  out += '\n';
  for (const RadiusSeries& row : series) {
    out += row.label;
    for (const RadiusSeries& col : series) {
      out += ',';
      out += format_double(arr(row.radii, col.radii));
    }
    out += '\n';
  }
  return out;
}

std::string arr_matrix_text(const std::vector<RadiusSeries>& series) {
  check_series(series);
  std::size_t width = 8;
  for (const RadiusSeries& s : series) width = std::max(width, s.label.size() + 2);

  std::ostringstream out;
  out << "mean radius ratio (row / column)\n";
  out << std::string(width, ' ');
  for (const RadiusSeries& s : series) {
    out << std::string(width - s.label.size(), ' ') << s.label;
  }
  out << '\n';
  char buf[32];
  for (const RadiusSeries& row : series) {
    out << row.label << std::string(width - row.label.size(), ' ');
    for (const RadiusSeries& col : series) {
      std::snprintf(buf, sizeof(buf), "%*.4f", static_cast<int>(width), arr(row.radii, col.radii));
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

std::string radius_table_csv(const std::vector<RadiusSeries>& series) {
  check_series(series);
  std::string out = "k";
  for (const RadiusSeries& s : series) {
    out += ',';
    out += s.label;
  }
  out += '\n';
  for (std::size_t k = 0; k < series.front().radii.size(); ++k) {
    out += std::to_string(k);
    for (const RadiusSeries& s : series) {
      out += ',';
      out += format_double(s.radii[k]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace czono
