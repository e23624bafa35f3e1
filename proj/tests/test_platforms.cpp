#include <cmath>

#include <doctest.h>

#include <distopt/platforms.hpp>

using namespace distopt;

namespace {

GroupProfiles logistic_profiles() {
  GroupProfiles out;
  for (Group g : kGroups) {
    GroupProfile& p = out[index_of(g)];
    p.kappa = 1.0;
    p.epsilon = 0.5;
    for (Matchup m : kMatchups) p.affinity[m] = AffinityDistribution::logistic(0.0, 1.0);
  }
  return out;
}

}  // namespace

TEST_SUITE("platforms") {

TEST_CASE("equilibrium transfers are proportional to power") {
  GroupPowerVector pw{GroupVals{3.0, 2.0, 1.0}, Matchup::general_mD_R};
  DistrictComposition d = DistrictComposition::from_shares(0.2, 0.5, 0.3);

  auto full = equilibrium_platforms(pw, d, Electorate::full());
  // Denominator: 3*0.2 + 2*0.5 + 1*0.3 = 1.9.
  CHECK(full.per_capita[Group::mD] == doctest::Approx(3.0 / 1.9));
  CHECK(full.per_capita[Group::nD] == doctest::Approx(2.0 / 1.9));
  CHECK(full.per_capita[Group::R] == doctest::Approx(1.0 / 1.9));
  CHECK(full.totals.sum() == doctest::Approx(1.0));  // budget exhausted

  auto primary = equilibrium_platforms(pw, d, Electorate::democratic_primary());
  // Republicans are outside the primary electorate: no transfers to them.
  CHECK(primary.per_capita[Group::R] == 0.0);
  CHECK(primary.totals.sum() == doctest::Approx(1.0));
  CHECK(primary.per_capita[Group::mD] == doctest::Approx(3.0 / 1.6));

  // Scaling the budget scales every transfer.
  auto scaled = equilibrium_platforms(pw, d, Electorate::full(), 2.5);
  CHECK(scaled.per_capita[Group::nD] == doctest::Approx(2.5 * full.per_capita[Group::nD]));
}

TEST_CASE("equilibrium rejects bad inputs") {
  GroupPowerVector pw{GroupVals{1.0, 1.0, 0.0}, Matchup::general_mD_R};
  DistrictComposition d = DistrictComposition::from_shares(0.2, 0.5, 0.3);
  // Zero power inside the electorate is undefined (b would be 0 with eps > 1
  // diverging); the electorate must carry positive power everywhere.
  CHECK_THROWS_AS((void)equilibrium_platforms(pw, d, Electorate::full()), ValidationError);
  // But a powerless group outside the electorate is fine.
  CHECK_NOTHROW((void)equilibrium_platforms(pw, d, Electorate::democratic_primary()));

  GroupPowerVector ok{GroupVals{1.0, 1.0, 1.0}, Matchup::general_mD_R};
  CHECK_THROWS_AS((void)equilibrium_platforms(ok, d, Electorate::full(), 0.0),
                  ValidationError);
}

TEST_CASE("identical platforms split the electorate at the affinity means") {
  GroupProfiles profiles = logistic_profiles();
  MatchupContext ctx{Matchup::general_mD_R, GroupVals{0.4, 0.1, -0.6}, PrimaryRule::closed};
  DistrictComposition d = DistrictComposition::from_shares(0.25, 0.4, 0.35);
  PlatformAllocation p{GroupVals{0.3, 0.3, 0.3}, GroupVals{}, 1.0};

  double share = vote_share(ctx, profiles, d, p, p, Electorate::full());
  auto cdf = [&](Group g) {
    return profiles[index_of(g)].affinity_for(ctx.key).cdf(ctx.mu[g]);
  };
  double want = 0.25 * cdf(Group::mD) + 0.4 * cdf(Group::nD) + 0.35 * cdf(Group::R);
  CHECK(share == doctest::Approx(want));
  CHECK(win_probability(share) == doctest::Approx(share));
}

TEST_CASE("raising a transfer wins votes from that group") {
  GroupProfiles profiles = logistic_profiles();
  MatchupContext ctx{Matchup::general_mD_R, GroupVals{0.0, 0.0, 0.0}, PrimaryRule::closed};
  DistrictComposition d = DistrictComposition::from_shares(0.25, 0.4, 0.35);
  PlatformAllocation even{GroupVals{1.0, 1.0, 1.0}, GroupVals{}, 1.0};
  PlatformAllocation tilted{GroupVals{1.5, 1.0, 1.0}, GroupVals{}, 1.0};

  double base = vote_share(ctx, profiles, d, even, even, Electorate::full());
  double up = vote_share(ctx, profiles, d, tilted, even, Electorate::full());
  CHECK(up > base);
  // The same tilt on the other side loses exactly symmetrically.
  double down = vote_share(ctx, profiles, d, even, tilted, Electorate::full());
  CHECK(up - base == doctest::Approx(base - down));
}

TEST_CASE("best response oracle lands on the closed form") {
  GroupProfiles profiles = logistic_profiles();
  profiles[index_of(Group::mD)].kappa = 1.4;
  const double grid = 0.005;

  MatchupContext general{Matchup::general_mD_R, GroupVals{0.2, -0.1, -0.3},
                         PrimaryRule::closed};
  DistrictComposition d = DistrictComposition::from_shares(0.3, 0.35, 0.35);
  Electorate full = Electorate::full();
  auto eq = equilibrium_platforms(group_power(profiles, general), d, full);
  auto br = best_response_oracle(general, profiles, d, full, grid);
  for (Group g : kGroups) {
    CHECK(std::abs(eq.totals[g] - br.totals[g]) <= grid + 1e-9);
  }

  MatchupContext primary{Matchup::primary_mD_nD, GroupVals{0.5, -0.5, 0.0},
                         PrimaryRule::closed};
  Electorate dem = Electorate::for_matchup(primary.key, primary.rule);
  auto eq2 = equilibrium_platforms(group_power(profiles, primary), d, dem);
  auto br2 = best_response_oracle(primary, profiles, d, dem, grid);
  for (Group g : kGroups) {
    CHECK(std::abs(eq2.totals[g] - br2.totals[g]) <= grid + 1e-9);
  }

  CHECK_THROWS_AS((void)best_response_oracle(general, profiles, d, full, 0.7),
                  ValidationError);
}

}  // TEST_SUITE
