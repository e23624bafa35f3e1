#include "distopt/scenario_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <utility>

namespace distopt {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError(where + ": " + what);
}

// Reruns a core parser/validator with the file section prepended to its
// message, so load errors always say which part of which file is wrong.
template <typename F>
auto in_section(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ValidationError& e) {
    fail(where, e.what());
  }
}

const json& member(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where + "." + key, "missing required field");
  return *it;
}

const json* opt_member(const json& j, const std::string& key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

std::uint64_t as_uint64(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected a nonnegative integer");
  if (!j.is_number_unsigned() && j.get<std::int64_t>() < 0) {
    fail(where, "expected a nonnegative integer");
  }
  return j.get<std::uint64_t>();
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

// Group triple, either {"mD": x, "nD": y, "R": z} or [mD, nD, R].
GroupVals parse_group_vals(const json& j, const std::string& where) {
  if (j.is_array()) {
    if (j.size() != kGroupCount) fail(where, "expected 3 entries (mD, nD, R)");
    return GroupVals{as_number(j[0], where + "[0]"), as_number(j[1], where + "[1]"),
                     as_number(j[2], where + "[2]")};
  }
  GroupVals out{0.0, 0.0, 0.0};
  for (Group g : kGroups) {
    std::string key(group_name(g));
    out[g] = as_number(member(j, key, where), where + "." + key);
  }
  return out;
}

PerMatchup<GroupVals> parse_per_matchup(const json& j, const std::string& where) {
  PerMatchup<GroupVals> out{};
  for (Matchup m : kMatchups) {
    std::string key(matchup_name(m));
    out[m] = parse_group_vals(member(j, key, where), where + "." + key);
  }
  return out;
}

AffinityDistribution parse_affinity(const json& j, const std::string& where) {
  std::string family = as_string(member(j, "family", where), where + ".family");
  if (family == "logistic" || family == "normal") {
    double location = 0.0;
    double scale = 1.0;
    if (const json* v = opt_member(j, "location")) location = as_number(*v, where + ".location");
    if (const json* v = opt_member(j, "scale")) scale = as_number(*v, where + ".scale");
    return in_section(where, [&] {
      return family == "logistic" ? AffinityDistribution::logistic(location, scale)
                                  : AffinityDistribution::normal(location, scale);
    });
  }
  if (family == "tabulated") {
    const json& kj = member(j, "knots", where);
    if (!kj.is_array()) fail(where + ".knots", "expected an array of [x, F] pairs");
    std::vector<std::pair<double, double>> knots;
    for (std::size_t i = 0; i < kj.size(); ++i) {
      std::string kw = where + ".knots[" + std::to_string(i) + "]";
      const json& row = kj[i];
      if (!row.is_array() || row.size() != 2) fail(kw, "expected an [x, F] pair");
      knots.emplace_back(as_number(row[0], kw), as_number(row[1], kw));
    }
    return in_section(where, [&] { return AffinityDistribution::tabulated(std::move(knots)); });
  }
  fail(where + ".family",
       "unknown affinity family '" + family + "' (expected logistic, normal, or tabulated)");
}

Primitives parse_primitives(const json& j, const std::string& where) {
  Primitives p;
  p.epsilon = as_number(member(j, "epsilon", where), where + ".epsilon");
  const json& groups = member(j, "groups", where);
  for (Group g : kGroups) {
    std::string gname(group_name(g));
    std::string base = where + ".groups." + gname;
    const json& gj = member(groups, gname, where + ".groups");
    GroupProfile& prof = p.profiles[index_of(g)];
    prof.epsilon = p.epsilon;
    if (const json* v = opt_member(gj, "kappa")) prof.kappa = as_number(*v, base + ".kappa");
    const json& aff = member(gj, "affinity", base);
    const json& mu = member(gj, "mu", base);
    for (Matchup m : kMatchups) {
      std::string mname(matchup_name(m));
      prof.affinity[m] =
          parse_affinity(member(aff, mname, base + ".affinity"), base + ".affinity." + mname);
      p.mu[m][g] = as_number(member(mu, mname, base + ".mu"), base + ".mu." + mname);
    }
  }
  return p;
}

// Plan rows are loaded without feasibility checks beyond sign and finiteness;
// row and column violations are reported by validate_plan as data, so a file
// can carry a deliberately broken plan for inspection.
DistrictingPlan parse_plan_rows(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a nonempty array of district rows");
  DistrictingPlan plan;
  for (std::size_t k = 0; k < j.size(); ++k) {
    std::string rw = where + "[" + std::to_string(k) + "]";
    GroupVals counts = parse_group_vals(j[k], rw);
    for (Group g : kGroups) {
      if (!std::isfinite(counts[g]) || counts[g] < 0.0) {
        fail(rw, "district populations must be finite and nonnegative");
      }
    }
    plan.rows.push_back(DistrictComposition{counts, 1.0});
  }
  return plan;
}

}  // namespace

ScenarioDoc load_scenario_json(const json& j, const std::string& path_label) {
  if (!j.is_object()) fail(path_label, "expected a JSON object at top level");

  ScenarioDoc doc;
  doc.document = j;
  doc.source_path = path_label;
  doc.name = as_string(member(j, "name", path_label), path_label + ".name");
  if (const json* v = opt_member(j, "description")) {
    doc.description = as_string(*v, path_label + ".description");
  }
  if (const json* v = opt_member(j, "metadata")) {
    doc.metadata = *v;
  } else {
    doc.metadata = json::object();
  }

  Scenario s;
  {
    std::string where = path_label + ".demographics";
    const json& d = member(j, "demographics", path_label);
    s.demographics.shares = parse_group_vals(member(d, "shares", where), where + ".shares");
    s.demographics.districts = as_int(member(d, "districts", where), where + ".districts");
  }
  if (const json* v = opt_member(j, "primary_rule")) {
    std::string where = path_label + ".primary_rule";
    std::string text = as_string(*v, where);
    s.rule = in_section(where, [&] { return parse_primary_rule(text); });
  }
  if (const json* v = opt_member(j, "matchup_mode")) {
    std::string where = path_label + ".matchup_mode";
    std::string text = as_string(*v, where);
    s.mode = in_section(where, [&] { return parse_matchup_mode(text); });
  }
  if (const json* v = opt_member(j, "weights")) {
    std::string where = path_label + ".weights";
    if (const json* b = opt_member(*v, "beta")) s.weights.beta = as_number(*b, where + ".beta");
  }

  std::string mode =
      as_string(member(j, "mode", path_label), path_label + ".mode");
  const json* rf = opt_member(j, "reduced_form");
  const json* prim = opt_member(j, "primitives");
  if (mode == "reduced_form") {
    if (!rf) fail(path_label + ".reduced_form", "missing required field");
    std::string where = path_label + ".reduced_form";
    s.pi = parse_per_matchup(member(*rf, "pi", where), where + ".pi");
    s.phi = parse_per_matchup(member(*rf, "phi", where), where + ".phi");
    if (const json* v = opt_member(*rf, "epsilon")) s.epsilon = as_number(*v, where + ".epsilon");
    if (const json* v = opt_member(*rf, "kappa_mD")) {
      s.kappa_mD = as_number(*v, where + ".kappa_mD");
    }
    if (prim) {
      s.primitives = parse_primitives(*prim, path_label + ".primitives");
      if (!s.epsilon) s.epsilon = s.primitives->epsilon;
      if (!s.kappa_mD) s.kappa_mD = s.primitives->profiles[index_of(Group::mD)].kappa;
    }
  } else if (mode == "primitives") {
    if (!prim) fail(path_label + ".primitives", "missing required field");
    std::string where = path_label + ".primitives";
    s.primitives = parse_primitives(*prim, where);
    auto derived = in_section(where, [&] { return derive_reduced_form(*s.primitives); });
    s.pi = derived.pi;
    s.phi = derived.phi;
    s.epsilon = s.primitives->epsilon;
    s.kappa_mD = s.primitives->profiles[index_of(Group::mD)].kappa;
    if (rf) {
      // A reduced_form section alongside primitives is taken as a claim about
      // what the primitives imply; scenario validation cross-checks it.
      std::string rw = path_label + ".reduced_form";
      s.pi = parse_per_matchup(member(*rf, "pi", rw), rw + ".pi");
      s.phi = parse_per_matchup(member(*rf, "phi", rw), rw + ".phi");
      if (const json* v = opt_member(*rf, "epsilon")) {
        if (std::abs(as_number(*v, rw + ".epsilon") - s.primitives->epsilon) > 1e-12) {
          fail(rw + ".epsilon", "disagrees with primitives.epsilon");
        }
      }
    }
  } else {
    fail(path_label + ".mode",
         "unknown mode '" + mode + "' (expected reduced_form or primitives)");
  }

  in_section(path_label + ": scenario", [&] {
    s.validate();
    return 0;
  });
  doc.scenario = std::move(s);

  if (const json* v = opt_member(j, "plan")) {
    std::string where = path_label + ".plan";
    DistrictingPlan plan = parse_plan_rows(*v, where);
    if (plan.size() != doc.scenario.demographics.districts) {
      fail(where, "plan has " + std::to_string(plan.size()) + " rows but demographics declare " +
                      std::to_string(doc.scenario.demographics.districts) + " districts");
    }
    doc.plan = std::move(plan);
  }

  if (const json* v = opt_member(j, "power_rows")) {
    std::string where = path_label + ".power_rows";
    if (!v->is_array() || v->empty()) fail(where, "expected a nonempty array of power triples");
    for (std::size_t i = 0; i < v->size(); ++i) {
      std::string rw = where + "[" + std::to_string(i) + "]";
      GroupVals row = parse_group_vals((*v)[i], rw);
      for (Group g : kGroups) {
        if (!std::isfinite(row[g]) || row[g] <= 0.0) {
          fail(rw, "powers must be finite and > 0");
        }
      }
      doc.power_rows.push_back(row);
    }
  }

  if (const json* v = opt_member(j, "optimizer")) {
    std::string where = path_label + ".optimizer";
    if (const json* x = opt_member(*v, "restarts")) {
      doc.optimizer.restarts = as_int(*x, where + ".restarts");
      if (doc.optimizer.restarts < 1) fail(where + ".restarts", "must be >= 1");
    }
    if (const json* x = opt_member(*v, "seed")) {
      doc.optimizer.seed = as_uint64(*x, where + ".seed");
    }
    if (const json* x = opt_member(*v, "step_init")) {
      doc.optimizer.step_init = as_number(*x, where + ".step_init");
    }
    if (const json* x = opt_member(*v, "step_floor")) {
      doc.optimizer.step_floor = as_number(*x, where + ".step_floor");
    }
    if (const json* x = opt_member(*v, "threads")) {
      doc.optimizer.threads = as_int(*x, where + ".threads");
    }
    if (const json* x = opt_member(*v, "objective")) {
      std::string text = as_string(*x, where + ".objective");
      doc.objective.kind =
          in_section(where + ".objective", [&] { return parse_objective_kind(text); });
    }
    if (const json* x = opt_member(*v, "power_matchup")) {
      std::string text = as_string(*x, where + ".power_matchup");
      doc.objective.power_matchup =
          in_section(where + ".power_matchup", [&] { return parse_matchup(text); });
    }
  }

  if (const json* v = opt_member(j, "sweep")) {
    std::string where = path_label + ".sweep";
    SweepSpec spec;
    std::string text = as_string(member(*v, "axis", where), where + ".axis");
    spec.axis = in_section(where + ".axis", [&] { return parse_sweep_axis(text); });
    const json& vals = member(*v, "values", where);
    if (!vals.is_array() || vals.empty()) fail(where + ".values", "expected a nonempty array");
    for (std::size_t i = 0; i < vals.size(); ++i) {
      spec.values.push_back(as_number(vals[i], where + ".values[" + std::to_string(i) + "]"));
    }
    doc.sweep = std::move(spec);
  }

  if (const json* v = opt_member(j, "curvature")) {
    std::string where = path_label + ".curvature";
    if (const json* x = opt_member(*v, "district")) {
      doc.curvature.district = as_int(*x, where + ".district");
    }
    if (const json* x = opt_member(*v, "reservoir")) {
      doc.curvature.options.reservoir = as_int(*x, where + ".reservoir");
    }
    if (const json* x = opt_member(*v, "h")) {
      doc.curvature.options.h = as_number(*x, where + ".h");
      if (!(doc.curvature.options.h > 0.0)) fail(where + ".h", "must be > 0");
    }
    if (const json* x = opt_member(*v, "grid")) {
      doc.curvature.grid = as_number(*x, where + ".grid");
      if (!(doc.curvature.grid > 0.0)) fail(where + ".grid", "must be > 0");
    }
    if (const json* x = opt_member(*v, "interval_fraction")) {
      doc.curvature.interval_fraction = as_number(*x, where + ".interval_fraction");
    }
    if (const json* x = opt_member(*v, "thresholds")) {
      FeedbackThresholds& th = doc.curvature.options.thresholds;
      if (const json* y = opt_member(*x, "psi_slope")) {
        th.psi_slope = as_number(*y, where + ".thresholds.psi_slope");
      }
      if (const json* y = opt_member(*x, "mu_slope")) {
        th.mu_slope = as_number(*y, where + ".thresholds.mu_slope");
      }
      if (const json* y = opt_member(*x, "density_elasticity")) {
        th.density_elasticity = as_number(*y, where + ".thresholds.density_elasticity");
      }
    }
  }

  if (const json* v = opt_member(j, "control")) {
    if (!v->is_object()) fail(path_label + ".control", "expected a merge-patch object");
    doc.control = *v;
    doc.has_control = true;
  }

  doc.output_prefix = doc.name;
  if (const json* v = opt_member(j, "output")) {
    std::string where = path_label + ".output";
    if (const json* x = opt_member(*v, "prefix")) {
      doc.output_prefix = as_string(*x, where + ".prefix");
    }
  }

  return doc;
}

ScenarioDoc load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open scenario file");
  json j;
  try {
    j = json::parse(in, nullptr, /*allow_exceptions=*/true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": invalid JSON: " + e.what());
  }
  return load_scenario_json(j, path);
}

ScenarioDoc control_twin(const ScenarioDoc& doc) {
  if (!doc.has_control) {
    throw ValidationError(doc.source_path + ": control: scenario defines no control patch");
  }
  json patched = doc.document;
  patched.erase("control");
  patched.merge_patch(doc.control);
  ScenarioDoc twin = load_scenario_json(patched, doc.source_path + "#control");
  if (twin.name == doc.name) {
    bool prefix_followed_name = twin.output_prefix == twin.name;
    twin.name += "_control";
    if (prefix_followed_name) twin.output_prefix = twin.name;
  }
  return twin;
}

DistrictingPlan load_plan_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open plan file");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": invalid JSON: " + e.what());
  }
  return parse_plan_rows(j, path);
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError(path + ": cannot open for writing");
  out << content;
  out.flush();
  if (!out) throw ValidationError(path + ": write failed");
}

nlohmann::json run_metadata(const ScenarioDoc& doc, std::uint64_t seed) {
  json meta{
      {"tool", "distopt"},
      {"version", std::string(kToolVersion)},
      {"scenario", doc.name},
      {"source", doc.source_path},
      {"seed", seed},
  };
  if (!doc.description.empty()) meta["description"] = doc.description;
  if (doc.metadata.is_object() && !doc.metadata.empty()) {
    meta["scenario_metadata"] = doc.metadata;
  }
  // Reports carry a timestamp only when the environment pins one; otherwise
  // repeated runs must be byte-identical.
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    long long epoch = std::strtoll(env, &end, 10);
    if (end != env && end && *end == '\0') {
      std::time_t t = static_cast<std::time_t>(epoch);
      std::tm tm{};
      if (gmtime_r(&t, &tm)) {
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        meta["timestamp"] = buf;
      }
    }
  }
  return meta;
}

nlohmann::json plan_to_json(const DistrictingPlan& plan) {
  json rows = json::array();
  for (const auto& d : plan.rows) {
    rows.push_back(json::array(
        {d.counts[Group::mD], d.counts[Group::nD], d.counts[Group::R]}));
  }
  return json{{"rows", rows}, {"concentration_range", concentration_range(plan)}};
}

nlohmann::json opt_result_to_json(const OptResult& result) {
  json alternates = json::array();
  for (const auto& alt : result.alternates) {
    alternates.push_back(json{{"objective", alt.objective},
                              {"restart", alt.restart},
                              {"plan", plan_to_json(alt.plan)}});
  }
  return json{
      {"objective", result.objective},
      {"objective_kind", std::string(objective_kind_name(result.objective_kind))},
      {"restarts_used", result.restarts_used},
      {"best_restart", result.best_restart},
      {"best_history", result.best_history},
      {"plan", plan_to_json(result.plan)},
      {"alternates", alternates},
  };
}

nlohmann::json curvature_entry_to_json(const CurvatureEntry& entry) {
  return json{
      {"district", entry.district},
      {"reservoir", entry.reservoir},
      {"s", entry.s},
      {"h", entry.h},
      {"welfare", entry.welfare},
      {"curvature", entry.curvature},
      {"benchmark", entry.benchmark},
      {"interaction", entry.interaction},
      {"selection_curvature", entry.selection_curvature},
      {"competition_curvature", entry.competition_curvature},
      {"classification", std::string(district_class_name(entry.classification))},
      {"feedback", std::string(feedback_kind_name(entry.feedback))},
      {"alignment", std::string(channel_alignment_name(entry.alignment))},
      {"monitors",
       json{{"psi_slope", entry.monitors.psi_slope},
            {"mu_slope", entry.monitors.mu_slope},
            {"density_elasticity", entry.monitors.density_elasticity}}},
  };
}

nlohmann::json tipping_scan_to_json(const TippingScan& scan) {
  json samples = json::array();
  for (const auto& p : scan.samples) {
    samples.push_back(json{
        {"district", p.district},
        {"s", p.s},
        {"psi_primary", p.psi_primary},
        {"welfare", p.welfare},
        {"curvature", p.curvature},
        {"benchmark", p.benchmark},
        {"interaction", p.interaction},
    });
  }
  json out{
      {"empty", scan.empty},
      {"has_crossing", scan.has_crossing},
      {"max_inside", scan.max_inside},
      {"max_outside", scan.max_outside},
      {"samples", samples},
  };
  if (scan.has_crossing) out["crossing"] = scan.crossing;
  if (!scan.empty) {
    out["interval"] = json{{"lower", scan.interval.lower},
                           {"upper", scan.interval.upper},
                           {"peak_ratio", scan.interval.peak_ratio}};
  }
  return out;
}

nlohmann::json allocation_report_to_json(const AllocationReport& report) {
  json evidence = json::array();
  for (const auto& e : report.evidence) evidence.push_back(curvature_entry_to_json(e));
  json sweep = json::array();
  for (const auto& p : report.sweep) {
    sweep.push_back(json{
        {"district", p.district},
        {"s", p.s},
        {"psi_primary", p.psi_primary},
        {"welfare", p.welfare},
        {"curvature", p.curvature},
        {"benchmark", p.benchmark},
        {"interaction", p.interaction},
    });
  }
  return json{
      {"regime", std::string(allocation_regime_name(report.regime))},
      {"benchmark_driven", report.benchmark_driven},
      {"feedback_driven", report.feedback_driven},
      {"evidence", evidence},
      {"sweep", sweep},
  };
}

}  // namespace distopt
