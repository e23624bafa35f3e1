#pragma once

#include <optional>
#include <string>

#include "distopt/common.hpp"
#include "distopt/district.hpp"
#include "distopt/profile.hpp"
#include "distopt/selection.hpp"

namespace distopt {

// How general-election matchups enter district welfare when a plan is
// perturbed.
//
//   frozen:               primary odds and candidate powers are pinned at
//                         their reference-plan values when a plan is
//                         perturbed, so only the mechanical composition
//                         effects remain.
//   expectation_weighted: the two possible general matchups are mixed with the
//                         primary odds; supports and powers per matchup stay
//                         at their scenario values.
//   smoothed:             each group's general-stage mean is the primary-odds
//                         blend of the two matchup means, and supports and
//                         powers are re-derived from primitives at that
//                         blended mean. Requires primitives.
enum class MatchupMode {
  frozen,
  expectation_weighted,
  smoothed,
};

MatchupMode parse_matchup_mode(const std::string& text);
const char* matchup_mode_name(MatchupMode mode);

// Micro-level inputs: one CRRA curvature shared across groups, a taste and a
// set of affinity distributions per group, and a candidate-pair mean for each
// group and matchup. Supports and powers are derived from these.
struct Primitives {
  double epsilon = 0.5;
  GroupProfiles profiles;
  PerMatchup<GroupVals> mu;
};

// A fully resolved competition environment: demographics, primary rule,
// matchup mode, office payoffs, and per-matchup supports and powers. Built
// either directly from reduced-form numbers or derived from primitives.
struct Scenario {
  StateDemographics demographics;
  PrimaryRule rule = PrimaryRule::closed;
  MatchupMode mode = MatchupMode::expectation_weighted;
  IdeologyWeights weights;

  PerMatchup<GroupVals> pi{};   // equilibrium power by matchup and group
  PerMatchup<GroupVals> phi{};  // candidate support by matchup and group

  // Needed only when consumption welfare is evaluated. Scenarios that stop at
  // win odds and seat counts may omit them.
  std::optional<double> epsilon;
  std::optional<double> kappa_mD;

  std::optional<Primitives> primitives;

  static Scenario from_reduced(StateDemographics demographics, PrimaryRule rule,
                               MatchupMode mode, IdeologyWeights weights,
                               PerMatchup<GroupVals> pi,
                               PerMatchup<GroupVals> phi,
                               std::optional<double> epsilon = std::nullopt,
                               std::optional<double> kappa_mD = std::nullopt);

  static Scenario from_primitives(StateDemographics demographics,
                                  PrimaryRule rule, MatchupMode mode,
                                  IdeologyWeights weights, Primitives prims);

  void validate() const;

  SupportLevels supports() const;

  bool has_consumption() const { return epsilon && kappa_mD; }

  // Accessors that fail loudly when a caller needs CRRA inputs the scenario
  // does not carry.
  double require_epsilon(const char* what) const;
  double require_kappa(const char* what) const;
};

// Supports and powers recomputed from primitives, for cross-checking any
// user-supplied reduced forms against the same micro model.
struct DerivedReducedForm {
  PerMatchup<GroupVals> pi;
  PerMatchup<GroupVals> phi;
};

DerivedReducedForm derive_reduced_form(const Primitives& prims);

}  // namespace distopt
