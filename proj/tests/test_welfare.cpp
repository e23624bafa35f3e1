#include <cmath>

#include <doctest.h>

#include <distopt/platforms.hpp>
#include <distopt/welfare.hpp>

using namespace distopt;

namespace {

PerMatchup<GroupVals> flat(double md, double nd, double r) {
  PerMatchup<GroupVals> out;
  for (Matchup m : kMatchups) out[m] = GroupVals{md, nd, r};
  return out;
}

StateDemographics demo2() { return {GroupVals{0.25, 0.4, 0.35}, 2}; }

Scenario reduced_scenario(MatchupMode mode = MatchupMode::expectation_weighted) {
  PerMatchup<GroupVals> phi;
  phi[Matchup::primary_mD_nD] = GroupVals{0.8, 0.4, 0.3};
  phi[Matchup::general_mD_R] = GroupVals{0.9, 0.6, 0.2};
  phi[Matchup::general_nD_R] = GroupVals{0.7, 0.75, 0.25};
  return Scenario::from_reduced(demo2(), PrimaryRule::closed, mode,
                                IdeologyWeights{0.5}, flat(2.0, 3.0, 1.0), phi, 0.5, 1.0);
}

Scenario smoothed_scenario(MatchupMode mode, double primary_scale = 1.0) {
  Primitives prims;
  prims.epsilon = 0.5;
  for (Group g : kGroups) {
    GroupProfile& p = prims.profiles[index_of(g)];
    p.kappa = 1.0;
    p.epsilon = 0.5;
    auto general = AffinityDistribution::logistic(0.0, 1.0);
    p.affinity[Matchup::primary_mD_nD] = AffinityDistribution::logistic(0.0, primary_scale);
    p.affinity[Matchup::general_mD_R] = general;
    p.affinity[Matchup::general_nD_R] = general;
  }
  prims.mu[Matchup::primary_mD_nD] = GroupVals{0.7, -0.8, 0.0};
  prims.mu[Matchup::general_mD_R] = GroupVals{0.4, 0.3, -0.6};
  prims.mu[Matchup::general_nD_R] = GroupVals{-0.1, 0.5, -0.4};
  return Scenario::from_primitives(demo2(), PrimaryRule::closed, mode,
                                   IdeologyWeights{0.5}, std::move(prims));
}

DistrictingPlan tilted_plan() {
  return DistrictingPlan{{DistrictComposition{GroupVals{0.35, 0.35, 0.30}, 1.0},
                          DistrictComposition{GroupVals{0.15, 0.45, 0.40}, 1.0}}};
}

// Both districts share one nonminority mix, so shifting minority share along
// the fixed-mix charts keeps the statewide columns exact.
DistrictingPlan equal_mix_plan() {
  const double t = 8.0 / 15.0;  // nD column mean comes out at 0.4
  return DistrictingPlan{
      {DistrictComposition{GroupVals{0.35, t * 0.65, (1.0 - t) * 0.65}, 1.0},
       DistrictComposition{GroupVals{0.15, t * 0.85, (1.0 - t) * 0.85}, 1.0}}};
}

}  // namespace

TEST_SUITE("welfare") {

TEST_CASE("welfare parts sum to the total") {
  for (MatchupMode mode : {MatchupMode::expectation_weighted, MatchupMode::frozen,
                           MatchupMode::smoothed}) {
    Scenario s = smoothed_scenario(mode);
    DistrictingPlan plan = tilted_plan();
    WelfareParts parts = welfare_parts(s, plan);
    CHECK(parts.total == doctest::Approx(parts.selection + parts.competition));
    CHECK(parts.total == doctest::Approx(total_welfare(s, plan)));
  }
}

TEST_CASE("total welfare matches a hand-built sum") {
  Scenario s = reduced_scenario();
  DistrictingPlan plan = tilted_plan();
  SupportLevels sup = s.supports();

  double want = 0.0;
  for (const auto& d : plan.rows) {
    StageWinProbs p = stage_win_probabilities(sup, d, s.rule);
    double ideology = p.win_mD + 0.5 * p.win_nD;

    // Consumption averages the two possible generals with the primary odds;
    // the primary-stage transfers are part of the same expectation.
    auto b_in = [&](Matchup m, const Electorate& e) {
      return equilibrium_platforms(GroupPowerVector{s.pi[m], m}, d, e)
          .per_capita[Group::mD];
    };
    double u2 = crra_utility(1.0, 0.5, b_in(Matchup::general_mD_R, Electorate::full()));
    double u3 = crra_utility(1.0, 0.5, b_in(Matchup::general_nD_R, Electorate::full()));
    double consumption = p.primary * u2 + (1.0 - p.primary) * u3;
    want += d.counts[Group::mD] * (ideology + consumption);
  }
  CHECK(total_welfare(s, plan) == doctest::Approx(want));
}

TEST_CASE("curvature entry is a second difference of statewide welfare") {
  Scenario s = reduced_scenario();
  DistrictingPlan plan = equal_mix_plan();
  CurvatureOptions opt;
  opt.h = 1e-3;
  CurvatureEntry e = welfare_curvature(s, plan, 0, opt);
  CHECK(e.district == 0);
  CHECK(e.reservoir == 1);
  CHECK(e.s == doctest::Approx(0.35));
  CHECK(e.welfare == doctest::Approx(total_welfare(s, plan)));
  CHECK(e.curvature == doctest::Approx(e.benchmark + e.interaction));

  // Rebuild the same central difference by hand: move minority share between
  // district 0 and district 1 at fixed nonminority mixes.
  auto shifted = [&](double ds) {
    DistrictingPlan p2 = plan;
    auto move = [&](int k, double delta) {
      auto& row = p2.rows[k];
      double s0 = row.counts[Group::mD];
      double rest = 1.0 - s0;
      double t = row.counts[Group::nD] / rest;
      double s1 = s0 + delta;
      row.counts = GroupVals{s1, t * (1.0 - s1), (1.0 - t) * (1.0 - s1)};
    };
    move(0, ds);
    move(1, -ds);
    return total_welfare(s, p2);
  };
  double fd = (shifted(opt.h) - 2 * shifted(0.0) + shifted(-opt.h)) / (opt.h * opt.h);
  CHECK(e.curvature == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("frozen matchups kill the interaction term") {
  Scenario s = smoothed_scenario(MatchupMode::frozen);
  DistrictingPlan plan = tilted_plan();
  for (int k = 0; k < plan.size(); ++k) {
    CurvatureEntry e = welfare_curvature(s, plan, k, {});
    CHECK(std::abs(e.interaction) < 1e-8);
    CHECK(e.feedback == FeedbackKind::negligible);
  }
}

TEST_CASE("analytic interaction matches the finite-difference residual") {
  Scenario s = smoothed_scenario(MatchupMode::smoothed);
  DistrictingPlan plan = tilted_plan();
  CurvatureEntry e = welfare_curvature(s, plan, 0, {});
  InteractionTerms terms = interaction_formula(s, plan, 0, {});
  CHECK(terms.reweighting == 0.0);  // consumption carries no stage weight here
  CHECK(terms.total == doctest::Approx(terms.reweighting + terms.pivotality));
  CHECK(terms.total == doctest::Approx(e.interaction).epsilon(1e-4));

  // Outside smoothed mode the split is undefined.
  Scenario ew = smoothed_scenario(MatchupMode::expectation_weighted);
  CHECK_THROWS_AS((void)interaction_formula(ew, plan, 0, {}), ValidationError);
}

TEST_CASE("feedback monitors and classification") {
  // A wide primary keeps the odds (and the blended means behind them) nearly
  // flat in the minority share, which is what the default thresholds call safe.
  Scenario gentle = smoothed_scenario(MatchupMode::smoothed, 6.0);
  DistrictingPlan plan = tilted_plan();
  FeedbackMonitors mon = feedback_monitors(gentle, plan, 0);
  CHECK(mon.psi_slope >= 0.0);
  CHECK(mon.mu_slope >= 0.0);
  CHECK(mon.density_elasticity >= 0.0);
  CHECK(classify_district(gentle, plan, 0) == DistrictClass::safe);

  // Reduced-form scenarios have no densities to inspect and no moving means.
  Scenario rf = reduced_scenario();
  FeedbackMonitors flat_mon = feedback_monitors(rf, plan, 0);
  CHECK(flat_mon.mu_slope == 0.0);
  CHECK(flat_mon.density_elasticity == 0.0);

  // An impossible threshold set flips the classification.
  FeedbackThresholds strict;
  strict.psi_slope = 0.0;
  strict.mu_slope = -1.0;
  strict.density_elasticity = -1.0;
  CHECK(classify_district(gentle, plan, 0, strict) == DistrictClass::tipping);
}

TEST_CASE("curvature report covers every district and honors the reservoir") {
  Scenario s = reduced_scenario();
  DistrictingPlan plan = tilted_plan();
  CurvatureOptions opt;
  opt.reservoir = 0;
  auto entries = curvature_report(s, plan, opt);
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].district == 0);
  CHECK(entries[0].reservoir == 1);  // fixed reservoir falls back on its own row
  CHECK(entries[1].district == 1);
  CHECK(entries[1].reservoir == 0);

  CHECK_THROWS_AS((void)welfare_curvature(s, plan, 0, opt), ValidationError);
  CurvatureOptions bad;
  bad.reservoir = 5;
  CHECK_THROWS_AS((void)welfare_curvature(s, plan, 0, bad), ValidationError);
}

TEST_CASE("tipping scan stays empty without primary movement") {
  // Equal primary supports: the primary sits at 1/2 for every composition, so
  // there is no crossing and no feedback to localize.
  PerMatchup<GroupVals> phi = flat(0.5, 0.5, 0.5);
  Scenario s = Scenario::from_reduced(demo2(), PrimaryRule::closed,
                                      MatchupMode::expectation_weighted,
                                      IdeologyWeights{0.5}, flat(2.0, 3.0, 1.0), phi,
                                      0.5, 1.0);
  TippingScan scan = tipping_region(s, tilted_plan(), 0, 0.02);
  CHECK(scan.empty);
  CHECK(!scan.has_crossing);
  CHECK(!scan.samples.empty());
}

TEST_CASE("tipping scan finds the crossing when the primary moves") {
  Scenario s = smoothed_scenario(MatchupMode::smoothed);
  TippingScan scan = tipping_region(s, tilted_plan(), 0, 0.01);
  CHECK(scan.has_crossing);
  // The crossing sits where mD and nD primary pulls balance. With supports
  // 0.668 / 0.310 (logistic at +-0.7/0.8) the Democratic electorate majority
  // flips inside the sweep.
  CHECK(scan.crossing > 0.0);
  CHECK(scan.crossing < 1.0);
  for (const auto& p : scan.samples) {
    CHECK(p.curvature == doctest::Approx(p.benchmark + p.interaction));
  }
}

TEST_CASE("allocation report classifies the global regime") {
  // Strictly dominant minority power with a flat primary: concentrating
  // minority voters is self-limiting everywhere.
  PerMatchup<GroupVals> phi = flat(0.5, 0.5, 0.5);
  Scenario s = Scenario::from_reduced(demo2(), PrimaryRule::closed,
                                      MatchupMode::expectation_weighted,
                                      IdeologyWeights{0.5}, flat(10.0, 5.0, 2.0), phi,
                                      0.5, 1.0);
  AllocationReport rep = allocation_report(s, tilted_plan(), {}, 0.05);
  CHECK(rep.regime == AllocationRegime::global_concave);
  CHECK(!rep.feedback_driven);
  REQUIRE(rep.evidence.size() == 2);
  CHECK(!rep.sweep.empty());

  PerMatchup<GroupVals> weak = flat(2.0, 5.0, 10.0);
  Scenario s2 = Scenario::from_reduced(demo2(), PrimaryRule::closed,
                                       MatchupMode::expectation_weighted,
                                       IdeologyWeights{0.5}, weak, phi, 0.5, 1.0);
  CHECK(allocation_report(s2, tilted_plan(), {}, 0.05).regime ==
        AllocationRegime::global_convex);
}

}  // TEST_SUITE
