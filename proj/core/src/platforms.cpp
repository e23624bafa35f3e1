#include "distopt/platforms.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace distopt {

namespace {

double electorate_population(const DistrictComposition& district, const Electorate& e) {
  double n = 0.0;
  for (Group g : kGroups) {
    if (e.contains(g)) n += district.counts[g];
  }
  return n;
}

}  // namespace

PlatformAllocation equilibrium_platforms(const GroupPowerVector& powers,
                                         const DistrictComposition& district,
                                         const Electorate& electorate,
                                         double budget) {
  if (!(budget > 0.0) || !std::isfinite(budget)) {
    throw ValidationError("platform budget must be positive");
  }
  double weighted_power = 0.0;  // sum of pi_l * N_l over the electorate
  for (Group g : kGroups) {
    const double n = district.counts[g];
    if (!(n >= 0.0) || !std::isfinite(n)) {
      throw ValidationError("district count for " + std::string(group_name(g)) +
                            " must be finite and nonnegative");
    }
    if (!electorate.contains(g) || n == 0.0) continue;
    const double pi = powers.power[g];
    if (!(pi > 0.0) || !std::isfinite(pi)) {
      throw ValidationError("platform power for " + std::string(group_name(g)) +
                            " must be positive");
    }
    weighted_power += pi * n;
  }
  if (!(weighted_power > 0.0)) {
    throw ValidationError("electorate has no population; platforms are undefined");
  }

  PlatformAllocation out;
  out.budget = budget;
  for (Group g : kGroups) {
    const double n = district.counts[g];
    if (electorate.contains(g) && n > 0.0) {
      out.per_capita[g] = budget * powers.power[g] / weighted_power;
      out.totals[g] = out.per_capita[g] * n;
    }
  }
  return out;
}

double vote_share(const MatchupContext& ctx, const GroupProfiles& profiles,
                  const DistrictComposition& district, const PlatformAllocation& p1,
                  const PlatformAllocation& p2, const Electorate& electorate) {
  const double pop = electorate_population(district, electorate);
  if (!(pop > 0.0)) {
    throw ValidationError("electorate has no population; vote share is undefined");
  }
  double votes = 0.0;
  for (Group g : kGroups) {
    const double n = district.counts[g];
    if (!electorate.contains(g) || n == 0.0) continue;
    const GroupProfile& prof = profiles[index_of(g)];
    const double cutoff = ctx.mu[g] + crra_utility(prof.kappa, prof.epsilon, p1.per_capita[g]) -
                          crra_utility(prof.kappa, prof.epsilon, p2.per_capita[g]);
    votes += n * prof.affinity_for(ctx.key).cdf(cutoff);
  }
  return votes / pop;
}

double win_probability(double share) {
  if (!(share >= -1e-12 && share <= 1.0 + 1e-12)) {
    throw ValidationError("vote share must lie in [0, 1]");
  }
  // Proportional contest technology: winning probability equals vote share.
  return std::clamp(share, 0.0, 1.0);
}

namespace {

// Vote-share evaluation for the grid oracle that stays defined when a grid
// point gives some group a zero transfer under epsilon > 1. The exact model
// sends that group's support for the starved candidate to the CDF tail, so we
// take that limit instead of erroring out.
double oracle_share(const MatchupContext& ctx, const GroupProfiles& profiles,
                    const DistrictComposition& district, const Electorate& electorate,
                    const GroupVals& b1, const GroupVals& b2, double pop) {
  double votes = 0.0;
  for (Group g : kGroups) {
    const double n = district.counts[g];
    if (!electorate.contains(g) || n == 0.0) continue;
    const GroupProfile& prof = profiles[index_of(g)];
    const bool diverge1 = prof.epsilon > 1.0 && b1[g] == 0.0;
    const bool diverge2 = prof.epsilon > 1.0 && b2[g] == 0.0;
    double support;
    if (diverge1 && diverge2) {
      support = prof.affinity_for(ctx.key).cdf(ctx.mu[g]);
    } else if (diverge1) {
      support = 0.0;
    } else if (diverge2) {
      support = 1.0;
    } else {
      const double cutoff = ctx.mu[g] + crra_utility(prof.kappa, prof.epsilon, b1[g]) -
                            crra_utility(prof.kappa, prof.epsilon, b2[g]);
      support = prof.affinity_for(ctx.key).cdf(cutoff);
    }
    votes += n * support;
  }
  return votes / pop;
}

}  // namespace

PlatformAllocation best_response_oracle(const MatchupContext& ctx,
                                        const GroupProfiles& profiles,
                                        const DistrictComposition& district,
                                        const Electorate& electorate,
                                        double grid_step, int max_sweeps) {
  if (!(grid_step > 0.0 && grid_step <= 0.5)) {
    throw ValidationError("best-response grid step must lie in (0, 0.5]");
  }
  const double pop = electorate_population(district, electorate);
  if (!(pop > 0.0)) {
    throw ValidationError("electorate has no population; best response is undefined");
  }

  std::vector<Group> active;
  for (Group g : kGroups) {
    if (electorate.contains(g) && district.counts[g] > 0.0) active.push_back(g);
  }
  const int m = static_cast<int>(std::lround(1.0 / grid_step));
  const double budget = 1.0;

  // A candidate strategy is a split of the budget into total transfers on the
  // active groups, in units of budget/m.
  using Units = std::array<int, 3>;
  std::vector<Units> grid;
  if (active.size() == 1) {
    grid.push_back({m, 0, 0});
  } else if (active.size() == 2) {
    for (int i = 0; i <= m; ++i) grid.push_back({i, m - i, 0});
  } else {
    for (int i = 0; i <= m; ++i) {
      for (int j = 0; j + i <= m; ++j) grid.push_back({i, j, m - i - j});
    }
  }

  auto to_per_capita = [&](const Units& u) {
    GroupVals b;
    for (std::size_t a = 0; a < active.size(); ++a) {
      b[active[a]] = (budget * u[a] / m) / district.counts[active[a]];
    }
    return b;
  };

  auto best_response = [&](const Units& opponent) {
    const GroupVals b2 = to_per_capita(opponent);
    Units best = grid.front();
    double best_share = -1.0;
    for (const Units& u : grid) {
      const double s =
          oracle_share(ctx, profiles, district, electorate, to_per_capita(u), b2, pop);
      if (s > best_share) {  // strict: first-found argmax wins ties, deterministic
        best_share = s;
        best = u;
      }
    }
    return best;
  };

  auto max_unit_gap = [](const Units& a, const Units& b) {
    int d = 0;
    for (int i = 0; i < 3; ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
  };

  // Start from the most even split available on the grid.
  Units p2 = grid[grid.size() / 2];
  Units p1 = p2;
  Units prev1 = p1, prev2 = p2;
  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    p1 = best_response(p2);
    p2 = best_response(p1);
    if (p1 == p2) {
      converged = true;
      break;
    }
    if (p1 == prev1 && p2 == prev2) {
      // Stable 2-cycle. Accept it when the two platforms sit in adjacent grid
      // cells (the continuum fixed point lies between them); otherwise fail.
      if (max_unit_gap(p1, p2) <= 1) {
        converged = true;
        break;
      }
      throw NumericalError("best-response iteration settled into a wide 2-cycle; "
                           "no grid equilibrium found");
    }
    prev1 = p1;
    prev2 = p2;
  }
  if (!converged) {
    throw NumericalError("best-response iteration did not converge");
  }

  PlatformAllocation out;
  out.budget = budget;
  out.per_capita = to_per_capita(p1);
  for (Group g : kGroups) out.totals[g] = out.per_capita[g] * district.counts[g];
  return out;
}

}  // namespace distopt
