#include "distopt/scenario.hpp"

#include <algorithm>
#include <cmath>

namespace distopt {

MatchupMode parse_matchup_mode(const std::string& text) {
  if (text == "frozen") return MatchupMode::frozen;
  if (text == "expectation_weighted") return MatchupMode::expectation_weighted;
  if (text == "smoothed") return MatchupMode::smoothed;
  throw ValidationError("unknown matchup mode '" + text +
                        "' (expected frozen, expectation_weighted, or "
                        "smoothed)");
}

const char* matchup_mode_name(MatchupMode mode) {
  switch (mode) {
    case MatchupMode::frozen:
      return "frozen";
    case MatchupMode::expectation_weighted:
      return "expectation_weighted";
    case MatchupMode::smoothed:
      return "smoothed";
  }
  return "?";
}

DerivedReducedForm derive_reduced_form(const Primitives& prims) {
  GroupProfiles profiles = prims.profiles;
  for (auto& p : profiles) p.epsilon = prims.epsilon;
  validate_profiles(profiles);

  DerivedReducedForm out;
  for (Matchup m : kMatchups) {
    MatchupContext ctx{m, prims.mu[m], PrimaryRule::closed};
    out.pi[m] = group_power(profiles, ctx).power;
    for (Group g : kGroups) {
      const auto& dist = profiles[index_of(g)].affinity_for(m);
      out.phi[m][g] = dist.cdf(prims.mu[m][g]);
    }
  }
  return out;
}

Scenario Scenario::from_reduced(StateDemographics demographics,
                                PrimaryRule rule, MatchupMode mode,
                                IdeologyWeights weights,
                                PerMatchup<GroupVals> pi,
                                PerMatchup<GroupVals> phi,
                                std::optional<double> epsilon,
                                std::optional<double> kappa_mD) {
  Scenario s;
  s.demographics = demographics;
  s.rule = rule;
  s.mode = mode;
  s.weights = weights;
  s.pi = pi;
  s.phi = phi;
  s.epsilon = epsilon;
  s.kappa_mD = kappa_mD;
  s.validate();
  return s;
}

Scenario Scenario::from_primitives(StateDemographics demographics,
                                   PrimaryRule rule, MatchupMode mode,
                                   IdeologyWeights weights, Primitives prims) {
  Scenario s;
  s.demographics = demographics;
  s.rule = rule;
  s.mode = mode;
  s.weights = weights;
  auto derived = derive_reduced_form(prims);
  s.pi = derived.pi;
  s.phi = derived.phi;
  s.epsilon = prims.epsilon;
  s.kappa_mD = prims.profiles[index_of(Group::mD)].kappa;
  s.primitives = std::move(prims);
  s.validate();
  return s;
}

void Scenario::validate() const {
  demographics.validate();
  weights.validate();

  SupportLevels levels{phi};
  levels.validate();

  for (Matchup m : kMatchups) {
    for (Group g : kGroups) {
      double p = pi[m][g];
      if (!std::isfinite(p) || p <= 0.0) {
        throw ValidationError(std::string("power for group ") +
                              std::string(group_name(g)) + " in matchup " +
                              std::string(matchup_name(m)) + " must be finite and > 0");
      }
    }
  }

  if (epsilon) {
    if (!std::isfinite(*epsilon) || *epsilon <= 0.0) {
      throw ValidationError("scenario epsilon must be finite and > 0");
    }
    if (std::abs(*epsilon - 1.0) < 1e-9) {
      throw ValidationError(
          "epsilon == 1 is outside the model domain (transfer formulas "
          "divide by 1 - epsilon)");
    }
  }
  if (kappa_mD && (!std::isfinite(*kappa_mD) || *kappa_mD < 0.0)) {
    throw ValidationError("scenario kappa_mD must be finite and >= 0");
  }

  if (primitives) {
    GroupProfiles profiles = primitives->profiles;
    for (auto& p : profiles) p.epsilon = primitives->epsilon;
    validate_profiles(profiles);

    // The resolved reduced forms must match what the primitives imply; a
    // mismatch means the caller mixed inconsistent inputs.
    auto derived = derive_reduced_form(*primitives);
    for (Matchup m : kMatchups) {
      for (Group g : kGroups) {
        double dphi = std::abs(derived.phi[m][g] - phi[m][g]);
        double dpi = std::abs(derived.pi[m][g] - pi[m][g]) /
                     std::max(1.0, std::abs(derived.pi[m][g]));
        if (dphi > 1e-9 || dpi > 1e-9) {
          throw ValidationError(
              std::string("reduced-form values for group ") + std::string(group_name(g)) +
              " in matchup " + std::string(matchup_name(m)) +
              " disagree with the scenario primitives");
        }
      }
    }
  }

  if (mode == MatchupMode::smoothed) {
    if (!primitives) {
      throw ValidationError(
          "smoothed matchup mode needs primitives (supports and powers are "
          "re-derived at blended candidate means)");
    }
    for (Group g : kGroups) {
      const auto& prof = primitives->profiles[index_of(g)];
      const auto& d2 = prof.affinity_for(Matchup::general_mD_R);
      const auto& d3 = prof.affinity_for(Matchup::general_nD_R);
      if (!(d2 == d3)) {
        throw ValidationError(
            std::string("smoothed matchup mode needs one general-election "
                        "affinity distribution per group, but group ") +
            std::string(group_name(g)) + " has different distributions for the two "
            "matchups");
      }
    }
  }
}

SupportLevels Scenario::supports() const { return SupportLevels{phi}; }

double Scenario::require_epsilon(const char* what) const {
  if (!epsilon) {
    throw ValidationError(std::string(what) +
                          " needs the scenario to carry epsilon");
  }
  return *epsilon;
}

double Scenario::require_kappa(const char* what) const {
  if (!kappa_mD) {
    throw ValidationError(std::string(what) +
                          " needs the scenario to carry kappa_mD");
  }
  return *kappa_mD;
}

}  // namespace distopt
