#include <cmath>
#include <random>

#include <doctest.h>

#include <distopt/selection.hpp>
#include <distopt/surface.hpp>

using namespace distopt;

namespace {

SupportLevels ordered_supports() {
  SupportLevels sup;
  sup.phi[Matchup::primary_mD_nD] = GroupVals{0.8, 0.4, 0.3};
  sup.phi[Matchup::general_mD_R] = GroupVals{0.9, 0.6, 0.2};
  sup.phi[Matchup::general_nD_R] = GroupVals{0.7, 0.75, 0.25};
  return sup;
}

}  // namespace

TEST_SUITE("selection") {

TEST_CASE("stage win probabilities compose the two rounds") {
  SupportLevels sup = ordered_supports();
  auto d = DistrictComposition::from_shares(0.3, 0.4, 0.3);

  StageWinProbs closed = stage_win_probabilities(sup, d, PrimaryRule::closed);
  // Closed primary: only Democrats vote.
  const double dems = 0.7;
  const double psi1 = (0.3 * 0.8 + 0.4 * 0.4) / dems;
  const double psi2 = 0.3 * 0.9 + 0.4 * 0.6 + 0.3 * 0.2;
  const double psi3 = 0.3 * 0.7 + 0.4 * 0.75 + 0.3 * 0.25;
  CHECK(closed.primary == doctest::Approx(psi1));
  CHECK(closed.general_mD == doctest::Approx(psi2));
  CHECK(closed.general_nD == doctest::Approx(psi3));
  CHECK(closed.win_mD == doctest::Approx(psi1 * psi2));
  CHECK(closed.win_nD == doctest::Approx((1 - psi1) * psi3));
  CHECK(closed.win_mD + closed.win_nD + closed.win_R == doctest::Approx(1.0));
  CHECK(minority_win_prob(sup, d, PrimaryRule::closed) == doctest::Approx(psi1 * psi2));

  StageWinProbs open = stage_win_probabilities(sup, d, PrimaryRule::open);
  const double psi1o = 0.3 * 0.8 + 0.4 * 0.4 + 0.3 * 0.3;
  CHECK(open.primary == doctest::Approx(psi1o));

  // A district with no Democrats has no closed primary.
  auto allR = DistrictComposition::from_shares(0.0, 0.0, 1.0);
  CHECK_THROWS_AS((void)stage_win_probabilities(sup, allR, PrimaryRule::closed),
                  ValidationError);
}

TEST_CASE("support validation and ordering warnings") {
  SupportLevels sup = ordered_supports();
  CHECK_NOTHROW(sup.validate());
  CHECK(sup.ordering_warnings().empty());

  sup.phi[Matchup::general_mD_R][Group::mD] = 0.1;  // below nD: flagged, still legal
  CHECK(!sup.ordering_warnings().empty());
  CHECK_NOTHROW(sup.validate());

  sup.phi[Matchup::general_mD_R][Group::mD] = 1.0;  // boundary support is not
  CHECK_THROWS_AS(sup.validate(), ValidationError);
}

TEST_CASE("selection derivatives match finite differences") {
  std::mt19937_64 eng(17);
  std::uniform_real_distribution<double> usup(0.15, 0.85), ush(0.1, 0.7);
  const double h = 1e-6;
  for (int rep = 0; rep < 30; ++rep) {
    SupportLevels sup;
    for (Matchup m : kMatchups) {
      for (Group g : kGroups) sup.phi[m][g] = usup(eng);
    }
    double a = ush(eng), b = ush(eng);
    if (a + b > 0.9) continue;
    DistrictComposition d{GroupVals{a, b, 1.0 - a - b}, 1.0};
    PrimaryRule rule = rep % 2 ? PrimaryRule::open : PrimaryRule::closed;

    auto win = [&](double nm, double nn, double nr) {
      return minority_win_prob(sup, DistrictComposition{GroupVals{nm, nn, nr}, nm + nn + nr},
                               rule);
    };
    SelectionDerivatives sd = selection_derivatives(sup, d, rule);
    const double nr = 1.0 - a - b;
    CHECK(sd.wrt_count_mD.total ==
          doctest::Approx((win(a + h, b, nr) - win(a - h, b, nr)) / (2 * h)).epsilon(1e-5));
    CHECK(sd.wrt_count_nD.total ==
          doctest::Approx((win(a, b + h, nr) - win(a, b - h, nr)) / (2 * h)).epsilon(1e-5));
    CHECK(sd.substitution_nD_for_R.total ==
          doctest::Approx((win(a, b + h, nr - h) - win(a, b - h, nr + h)) / (2 * h))
              .epsilon(1e-5));
    // Each split is consistent.
    CHECK(sd.wrt_count_mD.total ==
          doctest::Approx(sd.wrt_count_mD.primary + sd.wrt_count_mD.general));
  }
}

TEST_CASE("win curvature sign is location free") {
  SupportLevels sup = ordered_supports();
  for (PrimaryRule rule : {PrimaryRule::closed, PrimaryRule::open}) {
    for (double t : {0.25, 0.5, 0.75}) {
      SelectionConvexity conv = selection_convexity(sup, t, rule);
      for (double s : {0.1, 0.45, 0.8}) {
        double curv = selection_win_curvature(sup, s, t, rule);
        if (conv.sign > 0) CHECK(curv > 0.0);
        if (conv.sign < 0) CHECK(curv < 0.0);
        if (conv.sign == 0) CHECK(curv == doctest::Approx(0.0));
      }
    }
  }
}

TEST_CASE("expected ideology weighs the two democratic winners") {
  SupportLevels sup = ordered_supports();
  auto d = DistrictComposition::from_shares(0.3, 0.4, 0.3);
  IdeologyWeights w{0.6};
  StageWinProbs p = stage_win_probabilities(sup, d, PrimaryRule::closed);
  CHECK(expected_ideology(sup, d, PrimaryRule::closed, w) ==
        doctest::Approx(p.win_mD + 0.6 * p.win_nD));
  CHECK_THROWS_AS((void)expected_ideology(sup, d, PrimaryRule::closed, IdeologyWeights{1.4}),
                  ValidationError);
}

TEST_CASE("beta threshold rule agrees with the exact curvature") {
  SupportLevels sup = ordered_supports();
  for (PrimaryRule rule : {PrimaryRule::closed, PrimaryRule::open}) {
    for (double a : {0.15, 0.35, 0.55}) {
      auto d = DistrictComposition::from_shares(a, 0.3, 0.7 - a);
      BetaThreshold bt = beta_threshold(sup, d, rule);
      for (double beta : {0.05, 0.3, 0.55, 0.8, 0.95}) {
        if (bt.regime != ThresholdRegime::degenerate &&
            std::abs(beta - bt.value) < 1e-6) {
          continue;
        }
        double curv = ideology_curvature(sup, d, rule, IdeologyWeights{beta});
        int want = curvature_sign_from_rule(bt, beta);
        if (std::abs(curv) > 1e-12) {
          CHECK(want == (curv > 0 ? 1 : -1));
        }
      }
    }
  }
}

TEST_CASE("ideology curvature matches a finite difference") {
  SupportLevels sup = ordered_supports();
  IdeologyWeights w{0.4};
  const double h = 1e-4, nn = 0.35;
  for (PrimaryRule rule : {PrimaryRule::closed, PrimaryRule::open}) {
    auto ideol = [&](double nm) {
      return expected_ideology(sup, DistrictComposition{GroupVals{nm, nn, 1.0 - nn - nm}, 1.0},
                               rule, w);
    };
    for (double nm : {0.12, 0.3, 0.5}) {
      auto d = DistrictComposition{GroupVals{nm, nn, 1.0 - nn - nm}, 1.0};
      CHECK(ideology_curvature(sup, d, rule, w) ==
            doctest::Approx((ideol(nm + h) - 2 * ideol(nm) + ideol(nm - h)) / (h * h))
                .epsilon(1e-5));
    }
  }
}

TEST_CASE("selection welfare sums the weighted district payoffs") {
  SupportLevels sup = ordered_supports();
  IdeologyWeights w{0.5};
  DistrictingPlan plan{{DistrictComposition::from_shares(0.5, 0.25, 0.25),
                        DistrictComposition::from_shares(0.0, 0.55, 0.45)}};
  // The minority-free district contributes nothing (and must not trip the
  // empty-primary check, since its weight is zero).
  double got = selection_welfare(plan, sup, PrimaryRule::closed, w);
  double want = 0.5 * expected_ideology(sup, plan.rows[0], PrimaryRule::closed, w);
  CHECK(got == doctest::Approx(want));
}

}  // TEST_SUITE
