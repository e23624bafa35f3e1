#pragma once

#include "distopt/district.hpp"
#include "distopt/profile.hpp"

namespace distopt {

// A candidate's distributive promise in one district: per-capita transfers
// and total outlays by group, spending a fixed budget.
struct PlatformAllocation {
  GroupVals per_capita;  // b_i
  GroupVals totals;      // T_i = b_i * N_i
  double budget = 1.0;
};

// Equilibrium platform of either candidate in a matchup: per-capita transfers
// b_i = pi_i / sum_l pi_l N_l over the electorate, zero outside it. Both
// candidates play this same allocation, so only the marginal-vote power of
// each group matters, not the matchup means.
PlatformAllocation equilibrium_platforms(const GroupPowerVector& powers,
                                         const DistrictComposition& district,
                                         const Electorate& electorate,
                                         double budget = 1.0);

// Candidate 1's vote share in `ctx` when platforms p1, p2 are played: each
// group's support is Phi_i at the cutoff mu_i + u_i(b1_i) - u_i(b2_i),
// aggregated over the electorate.
double vote_share(const MatchupContext& ctx, const GroupProfiles& profiles,
                  const DistrictComposition& district, const PlatformAllocation& p1,
                  const PlatformAllocation& p2, const Electorate& electorate);

// Election outcome from a vote share; the contest technology is proportional,
// so the win probability is the share itself.
double win_probability(double share);

// Discrete best-response iteration on a transfer-share grid, used to check
// the closed-form equilibrium from the outside. Both candidates alternately
// best-respond over total-transfer splits with resolution `grid_step` until
// neither moves (or a 2-cycle within one grid cell appears).
PlatformAllocation best_response_oracle(const MatchupContext& ctx,
                                        const GroupProfiles& profiles,
                                        const DistrictComposition& district,
                                        const Electorate& electorate,
                                        double grid_step, int max_sweeps = 200);

}  // namespace distopt
