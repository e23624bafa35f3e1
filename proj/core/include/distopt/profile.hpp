#pragma once

#include <optional>

#include "distopt/affinity.hpp"
#include "distopt/common.hpp"

namespace distopt {

// Behavioral primitives for one voter group: a weight on targeted spending,
// the shared consumption-curvature parameter, and one affinity distribution
// per matchup the group can vote in.
struct GroupProfile {
  double kappa = 1.0;    // taste for targeted transfers, > 0
  double epsilon = 0.5;  // CRRA curvature, > 0 and != 1, shared across groups
  PerMatchup<std::optional<AffinityDistribution>> affinity;

  const AffinityDistribution& affinity_for(Matchup m) const;
};

using GroupProfiles = std::array<GroupProfile, kGroupCount>;

// Validates kappa/epsilon domains; epsilon == 1 is rejected explicitly since
// the transfer formulas divide by (1 - epsilon).
void validate_profile(const GroupProfile& p);

// Validates every group and requires the CRRA curvature to be the same across
// groups, which the power formula assumes.
void validate_profiles(const GroupProfiles& profiles);

// Isoelastic utility of a per-capita transfer b: kappa * b^(1-eps) / (1-eps).
// b = 0 is only admissible when eps < 1 (utility 0); for eps > 1 it diverges.
double crra_utility(double kappa, double epsilon, double b);
double consumption_utility(const GroupProfile& p, double b);

// One head-to-head contest: which matchup, candidate 1's mean non-policy
// advantage per group, and the primary participation rule.
struct MatchupContext {
  Matchup key = Matchup::general_mD_R;
  GroupVals mu;  // mean affinity for candidate 1, by group
  PrimaryRule rule = PrimaryRule::closed;
};

// Per-group platform power pi_i = (kappa_i * phi_i(mu_i))^(1/eps) for one
// matchup: the marginal-vote yield of targeting group i, which is all the
// equilibrium platform depends on.
struct GroupPowerVector {
  GroupVals power;
  Matchup context = Matchup::general_mD_R;
};

GroupPowerVector group_power(const GroupProfiles& profiles, const MatchupContext& ctx);

}  // namespace distopt
