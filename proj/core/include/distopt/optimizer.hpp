#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "distopt/scenario.hpp"

namespace distopt {

// What the plan search maximizes: statewide minority transfers (linear or
// CRRA-weighted), the ideological selection payoff, or the full welfare sum.
enum class ObjectiveKind : int {
  linear_distributive = 0,
  crra_distributive = 1,
  selection = 2,
  total = 3,
};

ObjectiveKind parse_objective_kind(const std::string& text);
std::string_view objective_kind_name(ObjectiveKind k);

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::linear_distributive;
  // Power vector the distributive objectives read (selection/total use the
  // scenario's full matchup structure instead).
  Matchup power_matchup = Matchup::general_mD_R;
};

double evaluate_objective(const Scenario& scenario, const DistrictingPlan& plan,
                          const ObjectiveSpec& objective);

struct OptimizerConfig {
  int restarts = 64;
  std::uint64_t seed = 0;
  double step_init = 0.05;
  double step_floor = 1e-4;
  int threads = 0;  // 0 picks the hardware concurrency
};

// A near-optimal plan structurally distinct from the winner (within 1e-6 of
// its objective but more than 0.05 away entrywise), kept because optima here
// are often non-unique.
struct AlternatePlan {
  DistrictingPlan plan;
  double objective = 0.0;
  int restart = 0;
};

struct OptResult {
  DistrictingPlan plan;
  double objective = 0.0;
  ObjectiveKind objective_kind = ObjectiveKind::linear_distributive;
  int restarts_used = 0;
  int best_restart = 0;
  // Best objective seen after each restart, in restart order; nondecreasing.
  std::vector<double> best_history;
  std::vector<AlternatePlan> alternates;
};

// Multistart local search over feasible plans: random feasible starts,
// pairwise two-group transfer moves between district pairs with a geometric
// step schedule, and a nonminority swap polish for the linear objective.
// Restarts run in parallel; the reduction is deterministic (max objective,
// ties to the lowest restart index), so results depend only on the seed.
OptResult optimize(const Scenario& scenario, const ObjectiveSpec& objective,
                   const OptimizerConfig& config = {});

// Alternating projection of an arbitrary nonnegative K x 3 matrix onto the
// feasible plan polytope (row sums 1, column means equal to the state shares,
// nonnegative entries). Idempotent on feasible plans.
DistrictingPlan project_to_feasible(const std::vector<GroupVals>& seed,
                                    const StateDemographics& demo);

// Exhaustive grid search: the first K-1 districts enumerate the share grid,
// the last district is the residual and is kept only when nonnegative.
// Tractability guard: K <= 3 and resolution >= 0.05.
OptResult grid_oracle(const Scenario& scenario, const ObjectiveSpec& objective,
                      double resolution);

enum class SweepAxisKind : int { pi_mD = 0, beta = 1, epsilon = 2 };

SweepAxisKind parse_sweep_axis(const std::string& text);
std::string_view sweep_axis_name(SweepAxisKind k);

// One row of a parameter sweep. Failed rows carry the error text and leave
// the sweep running.
struct SweepRow {
  double value = 0.0;
  bool ok = false;
  std::string error;
  OptResult result;
  double concentration = 0.0;  // R of the winning plan: max minus min district minority count
};

// Re-optimizes per parameter value (same seed for every row). pi_mD rewrites
// the minority power of the objective's matchup; beta rewrites the office
// payoff weight; epsilon rewrites the CRRA curvature (re-deriving powers when
// the scenario carries primitives).
std::vector<SweepRow> sweep(const Scenario& scenario, SweepAxisKind axis,
                            const std::vector<double>& values,
                            const ObjectiveSpec& objective,
                            const OptimizerConfig& config = {});

}  // namespace distopt
