#include "distopt/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <thread>
#include <utility>

#include "distopt/selection.hpp"
#include "distopt/surface.hpp"
#include "distopt/welfare.hpp"

namespace distopt {

namespace {

double uniform01(std::mt19937_64& eng) {
  // 53-bit mantissa draw; avoids distribution objects whose streams differ
  // across standard libraries.
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

std::mt19937_64 restart_engine(std::uint64_t seed, int restart) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(restart)};
  return std::mt19937_64(seq);
}

DistrictingPlan to_plan(const std::vector<GroupVals>& counts) {
  DistrictingPlan plan;
  plan.rows.reserve(counts.size());
  for (const auto& c : counts) plan.rows.push_back(DistrictComposition{c, 1.0});
  return plan;
}

std::vector<GroupVals> from_plan(const DistrictingPlan& plan) {
  std::vector<GroupVals> counts;
  counts.reserve(plan.rows.size());
  for (const auto& r : plan.rows) counts.push_back(r.counts);
  return counts;
}

// Largest entrywise difference after sorting rows, so plans that differ only
// by district relabeling count as identical.
double plan_distance(const DistrictingPlan& a, const DistrictingPlan& b) {
  auto canonical = [](const DistrictingPlan& p) {
    auto rows = from_plan(p);
    std::sort(rows.begin(), rows.end(), [](const GroupVals& x, const GroupVals& y) {
      return std::lexicographical_compare(x.v.begin(), x.v.end(), y.v.begin(), y.v.end());
    });
    return rows;
  };
  const auto ra = canonical(a);
  const auto rb = canonical(b);
  if (ra.size() != rb.size()) return std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (std::size_t k = 0; k < ra.size(); ++k) {
    for (Group g : kGroups) d = std::max(d, std::abs(ra[k][g] - rb[k][g]));
  }
  return d;
}

struct RestartOutcome {
  DistrictingPlan plan;
  double objective = -std::numeric_limits<double>::infinity();
  std::exception_ptr failure;
};

// Greedy best-improvement hill climb over pairwise two-group transfers.
// A move shifts delta of group g from district l to district k and the same
// amount of group h back, so row sums and column sums never change.
void hill_climb(const Scenario& scn, const ObjectiveSpec& objective,
                std::vector<GroupVals>& x, double& value, double step_init,
                double step_floor) {
  const int K = static_cast<int>(x.size());
  constexpr double kMinGain = 1e-12;
  constexpr double kMinMove = 1e-15;
  int applied = 0;
  const int cap = 200000;

  double step = step_init;
  while (step >= step_floor && applied < cap) {
    bool improved_at_step = false;
    for (;;) {
      double best_gain = kMinGain;
      int bk = -1, bl = -1;
      Group bg = Group::mD, bh = Group::mD;
      double bdelta = 0.0;

      for (int k = 0; k < K; ++k) {
        for (int l = k + 1; l < K; ++l) {
          for (Group g : kGroups) {
            for (Group h : kGroups) {
              if (h == g) continue;
              // move delta of g from l to k, delta of h from k to l
              const double delta = std::min({step, x[l][g], x[k][h]});
              if (delta < kMinMove) continue;
              x[k][g] += delta;
              x[l][g] -= delta;
              x[k][h] -= delta;
              x[l][h] += delta;
              const double candidate = evaluate_objective(scn, to_plan(x), objective);
              x[k][g] -= delta;
              x[l][g] += delta;
              x[k][h] += delta;
              x[l][h] -= delta;
              const double gain = candidate - value;
              if (gain > best_gain) {
                best_gain = gain;
                bk = k;
                bl = l;
                bg = g;
                bh = h;
                bdelta = delta;
              }
            }
          }
        }
      }
      if (bk < 0) break;
      x[bk][bg] += bdelta;
      x[bl][bg] -= bdelta;
      x[bk][bh] -= bdelta;
      x[bl][bh] += bdelta;
      value += best_gain;
      improved_at_step = true;
      if (++applied >= cap) break;
    }
    if (!improved_at_step || applied >= cap) step *= 0.5;
  }
  value = evaluate_objective(scn, to_plan(x), objective);
}

RestartOutcome run_restart(const Scenario& scn, const ObjectiveSpec& objective,
                           const OptimizerConfig& cfg, int restart) {
  RestartOutcome out;
  try {
    auto eng = restart_engine(cfg.seed, restart);
    const int K = scn.demographics.districts;
    std::vector<GroupVals> seed(K);
    for (int k = 0; k < K; ++k) {
      for (Group g : kGroups) seed[k][g] = uniform01(eng);
    }
    DistrictingPlan start = project_to_feasible(seed, scn.demographics);
    auto x = from_plan(start);
    double value = evaluate_objective(scn, start, objective);
    hill_climb(scn, objective, x, value, cfg.step_init, cfg.step_floor);

    DistrictingPlan plan = to_plan(x);
    if (objective.kind == ObjectiveKind::linear_distributive) {
      DistrictingPlan polished =
          swap_improve(plan, scn.pi[objective.power_matchup], cfg.step_init);
      const double pv = evaluate_objective(scn, polished, objective);
      if (pv > value) {
        plan = std::move(polished);
        value = pv;
      }
    }
    out.plan = std::move(plan);
    out.objective = value;
  } catch (...) {
    out.failure = std::current_exception();
  }
  return out;
}

Scenario sweep_twin(const Scenario& base, SweepAxisKind axis, double value,
                    const ObjectiveSpec& objective) {
  switch (axis) {
    case SweepAxisKind::pi_mD: {
      Scenario twin = base;
      twin.primitives.reset();  // powers set by fiat supersede any primitives
      twin.pi[objective.power_matchup][Group::mD] = value;
      twin.validate();
      return twin;
    }
    case SweepAxisKind::beta: {
      Scenario twin = base;
      twin.weights.beta = value;
      twin.validate();
      return twin;
    }
    case SweepAxisKind::epsilon: {
      if (base.primitives) {
        Primitives prims = *base.primitives;
        prims.epsilon = value;
        for (auto& p : prims.profiles) p.epsilon = value;
        return Scenario::from_primitives(base.demographics, base.rule, base.mode,
                                         base.weights, std::move(prims));
      }
      Scenario twin = base;
      twin.epsilon = value;
      twin.validate();
      return twin;
    }
  }
  throw ValidationError("unknown sweep axis");
}

}  // namespace

ObjectiveKind parse_objective_kind(const std::string& text) {
  if (text == "linear_distributive") return ObjectiveKind::linear_distributive;
  if (text == "crra_distributive") return ObjectiveKind::crra_distributive;
  if (text == "selection") return ObjectiveKind::selection;
  if (text == "total") return ObjectiveKind::total;
  throw ValidationError("unknown objective '" + text +
                        "' (expected linear_distributive, crra_distributive, "
                        "selection, or total)");
}

std::string_view objective_kind_name(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::linear_distributive: return "linear_distributive";
    case ObjectiveKind::crra_distributive: return "crra_distributive";
    case ObjectiveKind::selection: return "selection";
    case ObjectiveKind::total: return "total";
  }
  return "?";
}

SweepAxisKind parse_sweep_axis(const std::string& text) {
  if (text == "pi_mD") return SweepAxisKind::pi_mD;
  if (text == "beta") return SweepAxisKind::beta;
  if (text == "epsilon") return SweepAxisKind::epsilon;
  throw ValidationError("unknown sweep axis '" + text +
                        "' (expected pi_mD, beta, or epsilon)");
}

std::string_view sweep_axis_name(SweepAxisKind k) {
  switch (k) {
    case SweepAxisKind::pi_mD: return "pi_mD";
    case SweepAxisKind::beta: return "beta";
    case SweepAxisKind::epsilon: return "epsilon";
  }
  return "?";
}

double evaluate_objective(const Scenario& scenario, const DistrictingPlan& plan,
                          const ObjectiveSpec& objective) {
  double value = 0.0;
  switch (objective.kind) {
    case ObjectiveKind::linear_distributive:
      value = competition_welfare(plan, scenario.pi[objective.power_matchup]).linear;
      break;
    case ObjectiveKind::crra_distributive: {
      const double eps = scenario.require_epsilon("the CRRA distributive objective");
      const double kappa = scenario.kappa_mD.value_or(1.0);
      value = competition_welfare(plan, scenario.pi[objective.power_matchup], kappa, eps).crra;
      break;
    }
    case ObjectiveKind::selection:
      value = selection_welfare(plan, scenario.supports(), scenario.rule, scenario.weights);
      break;
    case ObjectiveKind::total:
      value = total_welfare(scenario, plan);
      break;
  }
  if (!std::isfinite(value)) {
    throw NumericalError("objective evaluated to a non-finite value");
  }
  return value;
}

DistrictingPlan project_to_feasible(const std::vector<GroupVals>& seed,
                                    const StateDemographics& demo) {
  demo.validate();
  const int K = demo.districts;
  if (static_cast<int>(seed.size()) != K) {
    throw ValidationError("projection seed has " + std::to_string(seed.size()) +
                          " rows, expected " + std::to_string(K));
  }
  std::vector<GroupVals> x = seed;
  for (const auto& row : x) {
    for (Group g : kGroups) {
      if (!std::isfinite(row[g])) {
        throw ValidationError("projection seed entries must be finite");
      }
    }
  }

  GroupVals col_target;
  for (Group g : kGroups) col_target[g] = demo.shares[g] * K;

  constexpr int kMaxIters = 10000;
  double violation = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < kMaxIters; ++iter) {
    for (auto& row : x) {
      const double d = (1.0 - row.sum()) / 3.0;
      for (Group g : kGroups) row[g] += d;
    }
    for (Group g : kGroups) {
      double col = 0.0;
      for (const auto& row : x) col += row[g];
      const double d = (col_target[g] - col) / K;
      for (auto& row : x) row[g] += d;
    }
    for (auto& row : x) {
      for (Group g : kGroups) row[g] = std::max(row[g], 0.0);
    }

    violation = 0.0;
    for (const auto& row : x) violation = std::max(violation, std::abs(row.sum() - 1.0));
    for (Group g : kGroups) {
      double col = 0.0;
      for (const auto& row : x) col += row[g];
      violation = std::max(violation, std::abs(col - col_target[g]));
    }
    if (violation < 1e-12) break;
  }
  if (violation > 1e-9) {
    throw NumericalError(
        "projection onto the feasible plan set did not converge (residual " +
        std::to_string(violation) + "); the demographics may be unreachable "
        "from this seed");
  }
  return to_plan(x);
}

OptResult optimize(const Scenario& scenario, const ObjectiveSpec& objective,
                   const OptimizerConfig& config) {
  scenario.demographics.validate();
  if (config.restarts < 1) {
    throw ValidationError("optimizer needs at least one restart");
  }
  if (!(config.step_init > 0.0) || !(config.step_floor > 0.0) ||
      config.step_floor > config.step_init) {
    throw ValidationError("optimizer step schedule requires 0 < floor <= initial step");
  }

  std::vector<RestartOutcome> outcomes(config.restarts);
  int workers = config.threads > 0
                    ? config.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, config.restarts));

  std::atomic<int> next{0};
  auto drain = [&]() {
    for (int i = next.fetch_add(1); i < config.restarts; i = next.fetch_add(1)) {
      outcomes[i] = run_restart(scenario, objective, config, i);
    }
  };
  if (workers == 1) {
    drain();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(drain);
    for (auto& t : pool) t.join();
  }

  for (const auto& o : outcomes) {
    if (o.failure) std::rethrow_exception(o.failure);
  }

  // Deterministic reduction: max objective, ties to the lowest restart index.
  int best = 0;
  for (int i = 1; i < config.restarts; ++i) {
    if (outcomes[i].objective > outcomes[best].objective) best = i;
  }

  OptResult result;
  result.plan = outcomes[best].plan;
  result.objective = outcomes[best].objective;
  result.objective_kind = objective.kind;
  result.restarts_used = config.restarts;
  result.best_restart = best;
  result.best_history.reserve(config.restarts);
  double running = -std::numeric_limits<double>::infinity();
  for (const auto& o : outcomes) {
    running = std::max(running, o.objective);
    result.best_history.push_back(running);
  }

  for (int i = 0; i < config.restarts; ++i) {
    if (i == best) continue;
    if (std::abs(outcomes[i].objective - result.objective) > 1e-6) continue;
    if (plan_distance(outcomes[i].plan, result.plan) <= 0.05) continue;
    bool fresh = true;
    for (const auto& alt : result.alternates) {
      if (plan_distance(outcomes[i].plan, alt.plan) <= 0.05) {
        fresh = false;
        break;
      }
    }
    if (fresh && result.alternates.size() < 8) {
      result.alternates.push_back({outcomes[i].plan, outcomes[i].objective, i});
    }
  }
  return result;
}

OptResult grid_oracle(const Scenario& scenario, const ObjectiveSpec& objective,
                      double resolution) {
  scenario.demographics.validate();
  const int K = scenario.demographics.districts;
  if (K > 3) {
    throw ValidationError("grid_oracle handles at most 3 districts");
  }
  if (!(resolution >= 0.05 - 1e-12 && resolution <= 1.0)) {
    throw ValidationError("grid_oracle resolution must be in [0.05, 1]");
  }
  const int m = std::max(1, static_cast<int>(std::llround(1.0 / resolution)));

  std::vector<GroupVals> grid;
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; j + i <= m; ++j) {
      grid.emplace_back(static_cast<double>(i) / m, static_cast<double>(j) / m,
                        static_cast<double>(m - i - j) / m);
    }
  }

  GroupVals col_target;
  for (Group g : kGroups) col_target[g] = scenario.demographics.shares[g] * K;

  auto residual_of = [&](const GroupVals& used) -> std::pair<bool, GroupVals> {
    GroupVals res;
    for (Group g : kGroups) {
      res[g] = col_target[g] - used[g];
      if (res[g] < -1e-9) return {false, res};
      res[g] = std::max(res[g], 0.0);
    }
    return {true, res};
  };

  bool found = false;
  double best = -std::numeric_limits<double>::infinity();
  DistrictingPlan best_plan;

  auto consider = [&](const std::vector<GroupVals>& rows) {
    const DistrictingPlan plan = to_plan(rows);
    const double v = evaluate_objective(scenario, plan, objective);
    if (!found || v > best) {
      found = true;
      best = v;
      best_plan = plan;
    }
  };

  if (K == 1) {
    auto [ok, res] = residual_of(GroupVals{});
    if (ok) consider({res});
  } else if (K == 2) {
    for (const auto& r0 : grid) {
      auto [ok, res] = residual_of(r0);
      if (ok) consider({r0, res});
    }
  } else {
    for (const auto& r0 : grid) {
      for (const auto& r1 : grid) {
        GroupVals used;
        for (Group g : kGroups) used[g] = r0[g] + r1[g];
        auto [ok, res] = residual_of(used);
        if (ok) consider({r0, r1, res});
      }
    }
  }

  if (!found) {
    throw NumericalError(
        "grid_oracle found no feasible plan: every residual district went "
        "negative at this resolution");
  }

  OptResult result;
  result.plan = best_plan;
  result.objective = best;
  result.objective_kind = objective.kind;
  result.restarts_used = 0;
  result.best_restart = 0;
  result.best_history.push_back(best);
  return result;
}

std::vector<SweepRow> sweep(const Scenario& scenario, SweepAxisKind axis,
                            const std::vector<double>& values,
                            const ObjectiveSpec& objective,
                            const OptimizerConfig& config) {
  if (values.empty()) {
    throw ValidationError("sweep needs at least one parameter value");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw ValidationError("sweep values must be finite");
    }
    if (i > 0 && values[i] < values[i - 1]) {
      throw ValidationError("sweep values must be sorted ascending");
    }
  }

  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  for (double v : values) {
    SweepRow row;
    row.value = v;
    try {
      const Scenario twin = sweep_twin(scenario, axis, v, objective);
      row.result = optimize(twin, objective, config);
      row.concentration = concentration_range(row.result.plan);
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace distopt
