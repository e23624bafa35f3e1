#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <distopt/optimizer.hpp>
#include <distopt/platforms.hpp>
#include <distopt/scenario_io.hpp>
#include <distopt/surface.hpp>
#include <distopt/welfare.hpp>

#include "selftest.hpp"

namespace {

using distopt::format_double;
using nlohmann::json;

struct Flags {
  std::string scenario;
  std::string out = "out";
  std::uint64_t seed = 0;
  int restarts = 0;
  double grid_res = 0.0;
  bool json_out = false;

  bool seed_set = false;
  bool restarts_set = false;
  bool grid_set = false;
};

std::string out_path(const Flags& flags, const std::string& name) {
  return flags.out + "/" + name;
}

distopt::ScenarioDoc load_doc(const Flags& flags) {
  if (flags.scenario.empty()) {
    throw distopt::ValidationError("--scenario is required for this command");
  }
  distopt::ScenarioDoc doc = distopt::load_scenario(flags.scenario);
  if (flags.seed_set) doc.optimizer.seed = flags.seed;
  if (flags.restarts_set) {
    if (flags.restarts < 1) {
      throw distopt::ValidationError("--restarts must be at least 1");
    }
    doc.optimizer.restarts = flags.restarts;
  }
  if (flags.grid_set) {
    if (!(flags.grid_res > 0.0)) {
      throw distopt::ValidationError("--grid-res must be positive");
    }
    doc.curvature.grid = flags.grid_res;
  }
  return doc;
}

distopt::DistrictingPlan doc_plan(const distopt::ScenarioDoc& doc) {
  if (doc.plan) return *doc.plan;
  return distopt::uniform_plan(doc.scenario.demographics);
}

json plan_violations_json(const std::vector<distopt::PlanViolation>& violations) {
  json arr = json::array();
  for (const auto& v : violations) arr.push_back(v.message);
  return arr;
}

// ---------------------------------------------------------------- platforms

int run_platforms(const Flags& flags) {
  distopt::ScenarioDoc doc = load_doc(flags);
  const distopt::Scenario& s = doc.scenario;
  distopt::DistrictingPlan plan = doc_plan(doc);
  auto violations = distopt::validate_plan(plan, s.demographics);

  std::ostringstream csv;
  csv << "district,matchup,group,population,per_capita,total\n";
  json districts = json::array();
  for (int k = 0; k < plan.size(); ++k) {
    json matchups = json::object();
    for (distopt::Matchup m : distopt::kMatchups) {
      distopt::GroupPowerVector pw{s.pi[m], m};
      auto elec = distopt::Electorate::for_matchup(m, s.rule);
      distopt::PlatformAllocation alloc =
          distopt::equilibrium_platforms(pw, plan.rows[k], elec);
      json rows = json::object();
      for (distopt::Group g : distopt::kGroups) {
        csv << k << ',' << distopt::matchup_name(m) << ',' << distopt::group_name(g) << ','
            << format_double(plan.rows[k].counts[g]) << ','
            << format_double(alloc.per_capita[g]) << ',' << format_double(alloc.totals[g])
            << '\n';
        rows[std::string(distopt::group_name(g))] =
            json{{"per_capita", alloc.per_capita[g]}, {"total", alloc.totals[g]}};
      }
      matchups[std::string(distopt::matchup_name(m))] = rows;
    }
    districts.push_back(json{{"district", k},
                             {"composition",
                              json::array({plan.rows[k].counts[distopt::Group::mD],
                                           plan.rows[k].counts[distopt::Group::nD],
                                           plan.rows[k].counts[distopt::Group::R]})},
                             {"platforms", matchups}});
  }

  json report{
      {"run", distopt::run_metadata(doc, doc.optimizer.seed)},
      {"plan", distopt::plan_to_json(plan)},
      {"plan_violations", plan_violations_json(violations)},
      {"districts", districts},
  };
  distopt::write_text_file(out_path(flags, doc.output_prefix + "_platforms.csv"), csv.str());
  distopt::write_text_file(out_path(flags, doc.output_prefix + "_platforms.json"),
                           report.dump(2) + "\n");

  if (flags.json_out) {
    std::cout << report.dump(2) << '\n';
    return 0;
  }
  for (const auto& v : violations) std::cout << "plan violation: " << v.message << '\n';
  for (int k = 0; k < plan.size(); ++k) {
    const auto& row = plan.rows[k].counts;
    std::cout << "district " << k << "  (mD " << format_double(row[distopt::Group::mD])
              << ", nD " << format_double(row[distopt::Group::nD]) << ", R "
              << format_double(row[distopt::Group::R]) << ")\n";
    for (distopt::Matchup m : distopt::kMatchups) {
      distopt::GroupPowerVector pw{s.pi[m], m};
      auto elec = distopt::Electorate::for_matchup(m, s.rule);
      auto alloc = distopt::equilibrium_platforms(pw, plan.rows[k], elec);
      std::cout << "  " << distopt::matchup_name(m) << ": b=(";
      for (distopt::Group g : distopt::kGroups) {
        std::cout << (g == distopt::Group::mD ? "" : ", ") << format_double(alloc.per_capita[g]);
      }
      std::cout << ")  T=(";
      for (distopt::Group g : distopt::kGroups) {
        std::cout << (g == distopt::Group::mD ? "" : ", ") << format_double(alloc.totals[g]);
      }
      std::cout << ")\n";
    }
  }
  std::cout << "wrote " << out_path(flags, doc.output_prefix + "_platforms.{csv,json}") << '\n';
  return 0;
}

// ----------------------------------------------------------------- optimize

distopt::Scenario with_powers(const distopt::Scenario& base, distopt::Matchup m,
                              const distopt::GroupVals& powers) {
  distopt::Scenario s = base;
  s.primitives.reset();  // rewritten powers no longer come from the micro model
  s.pi[m] = powers;
  s.validate();
  return s;
}

int run_optimize(const Flags& flags) {
  distopt::ScenarioDoc doc = load_doc(flags);
  const distopt::Scenario& s = doc.scenario;
  const int K = s.demographics.districts;

  std::ostringstream csv;
  csv << "pi_mD,pi_nD,pi_R,total,average,concentration_range";
  for (int k = 0; k < K; ++k) {
    csv << ",d" << k << "_mD,d" << k << "_nD,d" << k << "_R";
  }
  csv << '\n';

  std::vector<distopt::GroupVals> rows = doc.power_rows;
  if (rows.empty()) rows.push_back(s.pi[doc.objective.power_matchup]);

  json results = json::array();
  for (const distopt::GroupVals& powers : rows) {
    distopt::Scenario run = with_powers(s, doc.objective.power_matchup, powers);
    distopt::OptResult best = distopt::optimize(run, doc.objective, doc.optimizer);
    double range = distopt::concentration_range(best.plan);

    csv << format_double(powers[distopt::Group::mD]) << ','
        << format_double(powers[distopt::Group::nD]) << ','
        << format_double(powers[distopt::Group::R]) << ',' << format_double(best.objective)
        << ',' << format_double(best.objective / K) << ',' << format_double(range);
    for (const auto& d : best.plan.rows) {
      for (distopt::Group g : distopt::kGroups) csv << ',' << format_double(d.counts[g]);
    }
    csv << '\n';

    results.push_back(json{{"powers",
                            json::array({powers[distopt::Group::mD],
                                         powers[distopt::Group::nD],
                                         powers[distopt::Group::R]})},
                           {"result", distopt::opt_result_to_json(best)}});
    if (!flags.json_out) {
      std::cout << "pi=(" << format_double(powers[distopt::Group::mD]) << ", "
                << format_double(powers[distopt::Group::nD]) << ", "
                << format_double(powers[distopt::Group::R])
                << ")  total=" << format_double(best.objective)
                << "  average=" << format_double(best.objective / K)
                << "  range=" << format_double(range) << '\n';
    }
  }

  json report{
      {"run", distopt::run_metadata(doc, doc.optimizer.seed)},
      {"objective", std::string(distopt::objective_kind_name(doc.objective.kind))},
      {"rows", results},
  };
  distopt::write_text_file(out_path(flags, doc.output_prefix + "_optimize.csv"), csv.str());
  distopt::write_text_file(out_path(flags, doc.output_prefix + "_optimize.json"),
                           report.dump(2) + "\n");
  if (flags.json_out) {
    std::cout << report.dump(2) << '\n';
  } else {
    std::cout << "wrote " << out_path(flags, doc.output_prefix + "_optimize.{csv,json}")
              << '\n';
  }
  return 0;
}

// -------------------------------------------------------------------- sweep

int run_sweep(const Flags& flags) {
  distopt::ScenarioDoc doc = load_doc(flags);
  if (!doc.sweep) {
    throw distopt::ValidationError(doc.source_path +
                                   ": sweep: scenario defines no sweep section");
  }
  auto rows = distopt::sweep(doc.scenario, doc.sweep->axis, doc.sweep->values, doc.objective,
                             doc.optimizer);

  std::ostringstream csv;
  csv << "value,status,objective,concentration_range,error\n";
  json jrows = json::array();
  for (const auto& row : rows) {
    csv << format_double(row.value) << ',' << (row.ok ? "ok" : "error") << ','
        << (row.ok ? format_double(row.result.objective) : "") << ','
        << (row.ok ? format_double(row.concentration) : "") << ',' << row.error << '\n';
    json jr{{"value", row.value}, {"ok", row.ok}};
    if (row.ok) {
      jr["objective"] = row.result.objective;
      jr["concentration_range"] = row.concentration;
      jr["plan"] = distopt::plan_to_json(row.result.plan);
    } else {
      jr["error"] = row.error;
    }
    jrows.push_back(jr);
    if (!flags.json_out) {
      if (row.ok) {
        std::cout << distopt::sweep_axis_name(doc.sweep->axis) << '='
                  << format_double(row.value)
                  << "  objective=" << format_double(row.result.objective)
                  << "  range=" << format_double(row.concentration) << '\n';
      } else {
        std::cout << distopt::sweep_axis_name(doc.sweep->axis) << '='
                  << format_double(row.value) << "  error: " << row.error << '\n';
      }
    }
  }

  json report{
      {"run", distopt::run_metadata(doc, doc.optimizer.seed)},
      {"axis", std::string(distopt::sweep_axis_name(doc.sweep->axis))},
      {"rows", jrows},
  };
  distopt::write_text_file(out_path(flags, doc.output_prefix + "_sweep.csv"), csv.str());
  distopt::write_text_file(out_path(flags, doc.output_prefix + "_sweep.json"),
                           report.dump(2) + "\n");
  if (flags.json_out) {
    std::cout << report.dump(2) << '\n';
  } else {
    std::cout << "wrote " << out_path(flags, doc.output_prefix + "_sweep.{csv,json}") << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- curvature

void write_surface_samples(const Flags& flags, const distopt::ScenarioDoc& doc) {
  const distopt::GroupVals& powers = doc.scenario.pi[doc.objective.power_matchup];
  const double res = doc.curvature.grid;
  const int m = std::max(2, static_cast<int>(std::llround(1.0 / res)));

  std::ostringstream shares, curv;
  shares << "n_mD,n_nD,n_R,minority_share\n";
  curv << "n_mD,n_nD,n_R,path_curvature\n";
  for (int i = 1; i < m; ++i) {
    for (int jj = 1; jj < m - i; ++jj) {
      const double a = static_cast<double>(i) / m;
      const double b = static_cast<double>(jj) / m;
      const double c = 1.0 - a - b;
      distopt::DistrictComposition d{distopt::GroupVals{a, b, c}, 1.0};
      distopt::SurfacePoint pt{a, b / (1.0 - a), 1.0};
      shares << format_double(a) << ',' << format_double(b) << ',' << format_double(c) << ','
             << format_double(distopt::minority_share(powers, d)) << '\n';
      curv << format_double(a) << ',' << format_double(b) << ',' << format_double(c) << ','
           << format_double(distopt::path_curvature(powers, pt)) << '\n';
    }
  }
  distopt::write_text_file(out_path(flags, doc.output_prefix + "_share_surface.csv"),
                           shares.str());
  distopt::write_text_file(out_path(flags, doc.output_prefix + "_path_curvature.csv"),
                           curv.str());
}

int run_curvature_one(const Flags& flags, const distopt::ScenarioDoc& doc) {
  const distopt::Scenario& s = doc.scenario;
  distopt::DistrictingPlan plan = doc_plan(doc);
  const distopt::CurvatureSettings& cfg = doc.curvature;
  if (cfg.district < 0 || cfg.district >= plan.size()) {
    throw distopt::ValidationError(doc.source_path +
                                   ": curvature.district: index out of range for the plan");
  }

  auto entries = distopt::curvature_report(s, plan, cfg.options);
  distopt::TippingScan scan = distopt::tipping_region(s, plan, cfg.district, cfg.grid,
                                                      cfg.options, cfg.interval_fraction);
  distopt::AllocationReport alloc = distopt::allocation_report(s, plan, cfg.options, cfg.grid);

  std::ostringstream csv;
  csv << "s,welfare,curvature,benchmark,interaction,psi_primary\n";
  for (const auto& p : scan.samples) {
    csv << format_double(p.s) << ',' << format_double(p.welfare) << ','
        << format_double(p.curvature) << ',' << format_double(p.benchmark) << ','
        << format_double(p.interaction) << ',' << format_double(p.psi_primary) << '\n';
  }

  json jentries = json::array();
  for (const auto& e : entries) jentries.push_back(distopt::curvature_entry_to_json(e));
  json report{
      {"run", distopt::run_metadata(doc, doc.optimizer.seed)},
      {"plan", distopt::plan_to_json(plan)},
      {"districts", jentries},
      {"tipping", distopt::tipping_scan_to_json(scan)},
      {"allocation", distopt::allocation_report_to_json(alloc)},
  };
  distopt::write_text_file(out_path(flags, doc.output_prefix + "_curvature.json"),
                           report.dump(2) + "\n");
  distopt::write_text_file(out_path(flags, doc.output_prefix + "_curvature_sweep.csv"),
                           csv.str());
  write_surface_samples(flags, doc);

  if (flags.json_out) {
    std::cout << report.dump(2) << '\n';
    return 0;
  }
  std::cout << doc.name << ": allocation regime "
            << distopt::allocation_regime_name(alloc.regime) << '\n';
  for (const auto& e : entries) {
    std::cout << "  district " << e.district << " s=" << format_double(e.s)
              << "  W_ss=" << format_double(e.curvature)
              << "  C=" << format_double(e.benchmark)
              << "  I=" << format_double(e.interaction) << "  ["
              << distopt::district_class_name(e.classification) << ", "
              << distopt::feedback_kind_name(e.feedback) << "]\n";
  }
  if (scan.empty) {
    std::cout << "  no feedback interval (interaction negligible"
              << (scan.has_crossing ? "" : " or primary never tips") << ")\n";
  } else {
    std::cout << "  feedback concentrates in s in [" << format_double(scan.interval.lower)
              << ", " << format_double(scan.interval.upper)
              << "]  peak/edge=" << format_double(scan.interval.peak_ratio) << '\n';
  }
  std::cout << "wrote " << out_path(flags, doc.output_prefix + "_curvature.{json,csv}")
            << " and surface samples\n";
  return 0;
}

int run_curvature(const Flags& flags) {
  distopt::ScenarioDoc doc = load_doc(flags);
  int rc = run_curvature_one(flags, doc);
  if (rc == 0 && doc.has_control) {
    distopt::ScenarioDoc control = distopt::control_twin(doc);
    control.optimizer = doc.optimizer;
    control.curvature = doc.curvature;
    rc = run_curvature_one(flags, control);
  }
  return rc;
}

// ----------------------------------------------------------------- selftest

int run_selftest(const Flags& flags, const std::string& only,
                 const std::string& fault_suite) {
  auto report = distopt::selftest::run(flags.seed, only, fault_suite);
  if (report.suites.empty()) {
    throw distopt::ValidationError("selftest: unknown suite '" + only + "'");
  }

  if (flags.json_out) {
    json jsuites = json::array();
    for (const auto& s : report.suites) {
      jsuites.push_back(json{{"name", s.name},
                             {"passed", s.passed},
                             {"checks", s.checks},
                             {"millis", s.millis},
                             {"failures", s.failures}});
    }
    std::cout << json{{"all_passed", report.all_passed}, {"suites", jsuites}}.dump(2) << '\n';
  } else {
    for (const auto& s : report.suites) {
      std::cout << (s.passed ? "[PASS] " : "[FAIL] ") << s.name << "  (" << s.checks
                << " checks, " << format_double(s.millis) << " ms)\n";
      for (const auto& f : s.failures) std::cout << "       " << f << '\n';
    }
  }
  if (!report.all_passed) {
    for (const auto& s : report.suites) {
      if (!s.passed) {
        std::cerr << "selftest suite '" << s.name << "' failed\n";
      }
    }
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributive platforms, election odds, and districting plans "
               "under two-stage electoral competition"};
  app.fallthrough();
  app.require_subcommand(1);

  Flags flags;
  auto* opt_scenario = app.add_option("--scenario", flags.scenario, "scenario file to load");
  app.add_option("--out", flags.out, "output directory (default: out)");
  auto* opt_seed = app.add_option("--seed", flags.seed, "override the optimizer seed");
  auto* opt_restarts =
      app.add_option("--restarts", flags.restarts, "override the optimizer restart count");
  auto* opt_grid =
      app.add_option("--grid-res", flags.grid_res, "override the sampling grid resolution");
  app.add_flag("--json", flags.json_out, "print the JSON report to stdout");

  auto* cmd_platforms = app.add_subcommand(
      "platforms", "equilibrium transfers per district, group, and matchup");
  auto* cmd_optimize =
      app.add_subcommand("optimize", "search for the welfare-maximizing districting plan");
  auto* cmd_curvature = app.add_subcommand(
      "curvature", "welfare curvature decomposition, tipping scan, and share surface");
  auto* cmd_sweep =
      app.add_subcommand("sweep", "re-optimize along the scenario's parameter sweep");
  auto* cmd_selftest =
      app.add_subcommand("selftest", "run the built-in numerical consistency suites");
  std::string selftest_only, selftest_fault;
  cmd_selftest->add_option("--suite", selftest_only, "run a single suite by name");
  cmd_selftest
      ->add_option("--break-tolerances", selftest_fault,
                   "zero out one suite's tolerances to exercise the failure path")
      ->group("");  // hidden: debugging hook

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    flags.seed_set = opt_seed->count() > 0;
    flags.restarts_set = opt_restarts->count() > 0;
    flags.grid_set = opt_grid->count() > 0;
    (void)opt_scenario;

    if (*cmd_platforms) return run_platforms(flags);
    if (*cmd_optimize) return run_optimize(flags);
    if (*cmd_curvature) return run_curvature(flags);
    if (*cmd_sweep) return run_sweep(flags);
    if (*cmd_selftest) return run_selftest(flags, selftest_only, selftest_fault);
    return 1;
  } catch (const distopt::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const distopt::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return 2;
  }
}
