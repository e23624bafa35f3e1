#include <cmath>

#include <doctest.h>

#include <distopt/profile.hpp>

using namespace distopt;

namespace {

GroupProfiles basic_profiles(double epsilon = 0.5) {
  GroupProfiles out;
  for (Group g : kGroups) {
    GroupProfile& p = out[index_of(g)];
    p.kappa = 1.0;
    p.epsilon = epsilon;
    for (Matchup m : kMatchups) p.affinity[m] = AffinityDistribution::logistic(0.0, 1.0);
  }
  return out;
}

}  // namespace

TEST_SUITE("profile") {

TEST_CASE("crra utility closed form") {
  // eps = 0.5: u = kappa * 2 sqrt(b).
  CHECK(crra_utility(1.0, 0.5, 4.0) == doctest::Approx(4.0));
  CHECK(crra_utility(3.0, 0.5, 0.25) == doctest::Approx(3.0));
  // eps = 2: u = -kappa / b, negative but increasing in b.
  CHECK(crra_utility(1.0, 2.0, 0.5) == doctest::Approx(-2.0));
  CHECK(crra_utility(1.0, 2.0, 1.0) > crra_utility(1.0, 2.0, 0.5));
  // b = 0 is fine below eps = 1 and diverges above.
  CHECK(crra_utility(1.0, 0.5, 0.0) == 0.0);
  CHECK_THROWS_AS((void)crra_utility(1.0, 2.0, 0.0), NumericalError);
  CHECK_THROWS_AS((void)crra_utility(1.0, 0.5, -0.1), ValidationError);
}

TEST_CASE("profile validation") {
  GroupProfile p;
  p.kappa = 1.0;
  p.epsilon = 0.5;
  CHECK_NOTHROW(validate_profile(p));
  p.epsilon = 1.0;  // the formulas divide by 1 - epsilon
  CHECK_THROWS_AS(validate_profile(p), ValidationError);
  p.epsilon = -0.5;
  CHECK_THROWS_AS(validate_profile(p), ValidationError);
  p.epsilon = 0.5;
  p.kappa = 0.0;
  CHECK_THROWS_AS(validate_profile(p), ValidationError);

  GroupProfiles mixed = basic_profiles();
  mixed[1].epsilon = 0.7;  // groups must share the curvature
  CHECK_THROWS_AS(validate_profiles(mixed), ValidationError);
}

TEST_CASE("group power is the density-weighted taste to the 1/eps") {
  GroupProfiles profiles = basic_profiles(0.5);
  profiles[index_of(Group::mD)].kappa = 2.0;
  MatchupContext ctx{Matchup::general_mD_R,
                     GroupVals{0.3, -0.4, 0.0}, PrimaryRule::closed};
  GroupPowerVector pw = group_power(profiles, ctx);
  CHECK(pw.context == Matchup::general_mD_R);

  auto phi = [&](Group g) {
    return profiles[index_of(g)].affinity_for(ctx.key).pdf(ctx.mu[g]);
  };
  CHECK(pw.power[Group::mD] == doctest::Approx(std::pow(2.0 * phi(Group::mD), 2.0)));
  CHECK(pw.power[Group::nD] == doctest::Approx(std::pow(phi(Group::nD), 2.0)));
  CHECK(pw.power[Group::R] == doctest::Approx(std::pow(phi(Group::R), 2.0)));
}

TEST_CASE("group power rejects zero density") {
  GroupProfiles profiles = basic_profiles();
  // Tabulated density is zero outside its support.
  profiles[index_of(Group::R)].affinity[Matchup::general_mD_R] =
      AffinityDistribution::tabulated({{-1.0, 0.0}, {1.0, 1.0}});
  MatchupContext ctx{Matchup::general_mD_R, GroupVals{0.0, 0.0, 5.0}, PrimaryRule::closed};
  CHECK_THROWS_AS((void)group_power(profiles, ctx), NumericalError);
}

TEST_CASE("missing affinity for a matchup is reported") {
  GroupProfile p;
  p.affinity[Matchup::primary_mD_nD] = AffinityDistribution::logistic(0.0, 1.0);
  CHECK_NOTHROW((void)p.affinity_for(Matchup::primary_mD_nD));
  CHECK_THROWS_AS((void)p.affinity_for(Matchup::general_nD_R), ValidationError);
}

TEST_CASE("name parsing round-trips") {
  for (Group g : kGroups) CHECK(parse_group(group_name(g)) == g);
  for (Matchup m : kMatchups) CHECK(parse_matchup(matchup_name(m)) == m);
  CHECK(parse_primary_rule("closed") == PrimaryRule::closed);
  CHECK(parse_primary_rule("open") == PrimaryRule::open);
  CHECK_THROWS_AS((void)parse_group("xyz"), ValidationError);
  CHECK_THROWS_AS((void)parse_matchup("general"), ValidationError);
  CHECK_THROWS_AS((void)parse_primary_rule("jungle"), ValidationError);
}

}  // TEST_SUITE
