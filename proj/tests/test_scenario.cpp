#include <doctest.h>

#include <distopt/scenario.hpp>

using namespace distopt;

namespace {

PerMatchup<GroupVals> flat(double md, double nd, double r) {
  PerMatchup<GroupVals> out;
  for (Matchup m : kMatchups) out[m] = GroupVals{md, nd, r};
  return out;
}

Primitives demo_primitives() {
  Primitives prims;
  prims.epsilon = 0.5;
  for (Group g : kGroups) {
    GroupProfile& p = prims.profiles[index_of(g)];
    p.kappa = 1.0;
    p.epsilon = 0.5;
    auto general = AffinityDistribution::logistic(0.0, 1.0);
    p.affinity[Matchup::primary_mD_nD] = AffinityDistribution::logistic(0.0, 1.0);
    p.affinity[Matchup::general_mD_R] = general;
    p.affinity[Matchup::general_nD_R] = general;
  }
  prims.mu[Matchup::primary_mD_nD] = GroupVals{0.6, -0.6, 0.0};
  prims.mu[Matchup::general_mD_R] = GroupVals{0.4, 0.2, -0.5};
  prims.mu[Matchup::general_nD_R] = GroupVals{0.1, 0.3, -0.4};
  return prims;
}

StateDemographics demo() { return {GroupVals{0.25, 0.4, 0.35}, 3}; }

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("reduced form construction validates everything") {
  Scenario s = Scenario::from_reduced(demo(), PrimaryRule::closed,
                                      MatchupMode::expectation_weighted, {},
                                      flat(2.0, 3.0, 1.0), flat(0.6, 0.5, 0.4));
  CHECK(s.pi[Matchup::general_mD_R][Group::nD] == 3.0);
  CHECK(!s.has_consumption());
  CHECK_THROWS_AS((void)s.require_epsilon("x"), ValidationError);
  CHECK_THROWS_AS((void)s.require_kappa("x"), ValidationError);

  CHECK_THROWS_AS((void)Scenario::from_reduced(demo(), PrimaryRule::closed,
                                               MatchupMode::expectation_weighted, {},
                                               flat(0.0, 3.0, 1.0), flat(0.6, 0.5, 0.4)),
                  ValidationError);
  CHECK_THROWS_AS((void)Scenario::from_reduced(demo(), PrimaryRule::closed,
                                               MatchupMode::expectation_weighted, {},
                                               flat(2.0, 3.0, 1.0), flat(0.6, 0.5, 1.0)),
                  ValidationError);
  // epsilon = 1 sits on the removed singularity.
  CHECK_THROWS_AS((void)Scenario::from_reduced(demo(), PrimaryRule::closed,
                                               MatchupMode::expectation_weighted, {},
                                               flat(2.0, 3.0, 1.0), flat(0.6, 0.5, 0.4),
                                               1.0, 1.0),
                  ValidationError);
}

TEST_CASE("primitive construction derives supports and powers") {
  Scenario s = Scenario::from_primitives(demo(), PrimaryRule::closed,
                                         MatchupMode::expectation_weighted, {},
                                         demo_primitives());
  CHECK(s.has_consumption());
  CHECK(s.require_epsilon("t") == doctest::Approx(0.5));
  CHECK(s.require_kappa("t") == doctest::Approx(1.0));

  // phi = CDF at the matchup mean; pi = (kappa * pdf)^(1/eps) = pdf^2 here.
  auto logi = AffinityDistribution::logistic(0.0, 1.0);
  CHECK(s.phi[Matchup::primary_mD_nD][Group::mD] == doctest::Approx(logi.cdf(0.6)));
  double density = logi.pdf(0.4);
  CHECK(s.pi[Matchup::general_mD_R][Group::mD] == doctest::Approx(density * density));

  DerivedReducedForm derived = derive_reduced_form(*s.primitives);
  for (Matchup m : kMatchups) {
    for (Group g : kGroups) {
      CHECK(derived.pi[m][g] == doctest::Approx(s.pi[m][g]));
      CHECK(derived.phi[m][g] == doctest::Approx(s.phi[m][g]));
    }
  }
}

TEST_CASE("stale reduced forms are rejected against primitives") {
  Scenario s = Scenario::from_primitives(demo(), PrimaryRule::closed,
                                         MatchupMode::expectation_weighted, {},
                                         demo_primitives());
  s.pi[Matchup::general_mD_R][Group::mD] *= 1.5;  // now inconsistent
  CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("smoothed mode needs primitives with one general distribution") {
  CHECK_THROWS_AS((void)Scenario::from_reduced(demo(), PrimaryRule::closed,
                                               MatchupMode::smoothed, {},
                                               flat(2.0, 3.0, 1.0), flat(0.6, 0.5, 0.4)),
                  ValidationError);

  Primitives split = demo_primitives();
  split.profiles[index_of(Group::R)].affinity[Matchup::general_nD_R] =
      AffinityDistribution::logistic(0.0, 2.0);
  CHECK_THROWS_AS((void)Scenario::from_primitives(demo(), PrimaryRule::closed,
                                                  MatchupMode::smoothed, {},
                                                  std::move(split)),
                  ValidationError);

  CHECK_NOTHROW((void)Scenario::from_primitives(demo(), PrimaryRule::closed,
                                                MatchupMode::smoothed, {},
                                                demo_primitives()));
}

TEST_CASE("matchup mode names round-trip") {
  for (MatchupMode m : {MatchupMode::frozen, MatchupMode::expectation_weighted,
                        MatchupMode::smoothed}) {
    CHECK(parse_matchup_mode(matchup_mode_name(m)) == m);
  }
  CHECK_THROWS_AS((void)parse_matchup_mode("loose"), ValidationError);
}

}  // TEST_SUITE
