#include <doctest.h>

#include <distopt/district.hpp>

using namespace distopt;

TEST_SUITE("district") {

TEST_CASE("composition constructors") {
  auto d = DistrictComposition::from_shares(0.25, 0.4, 0.35);
  CHECK(d.total == doctest::Approx(1.0));
  CHECK(d.share(Group::nD) == doctest::Approx(0.4));
  CHECK(d.democratic_minority_share() == doctest::Approx(0.25 / 0.65));

  auto c = DistrictComposition::from_counts(GroupVals{2.0, 3.0, 5.0});
  CHECK(c.total == doctest::Approx(10.0));
  CHECK(c.share(Group::R) == doctest::Approx(0.5));

  CHECK_THROWS_AS((void)DistrictComposition::from_shares(0.5, 0.6, -0.1), ValidationError);
  CHECK_THROWS_AS((void)DistrictComposition::from_shares(0.2, 0.2, 0.2), ValidationError);
  CHECK_THROWS_AS((void)DistrictComposition::from_counts(GroupVals{0, 0, 0}),
                  ValidationError);
}

TEST_CASE("demographics validation") {
  StateDemographics demo{GroupVals{0.25, 0.4, 0.35}, 3};
  CHECK_NOTHROW(demo.validate());
  CHECK_THROWS_AS((StateDemographics{GroupVals{0.5, 0.5, 0.5}, 3}.validate()),
                  ValidationError);
  CHECK_THROWS_AS((StateDemographics{GroupVals{0.25, 0.4, 0.35}, 0}.validate()),
                  ValidationError);
  CHECK_THROWS_AS((StateDemographics{GroupVals{-0.1, 0.55, 0.55}, 2}.validate()),
                  ValidationError);
}

TEST_CASE("plan validation catches each violation kind") {
  StateDemographics demo{GroupVals{0.25, 0.4, 0.35}, 2};
  DistrictingPlan good{{DistrictComposition{GroupVals{0.4, 0.3, 0.3}, 1.0},
                        DistrictComposition{GroupVals{0.1, 0.5, 0.4}, 1.0}}};
  CHECK(validate_plan(good, demo).empty());

  DistrictingPlan short_row = good;
  short_row.rows[0].counts[Group::R] = 0.2;  // row sums to 0.9
  auto v1 = validate_plan(short_row, demo);
  CHECK(!v1.empty());
  bool saw_row = false, saw_col = false;
  for (const auto& v : v1) {
    if (v.kind == PlanViolation::Kind::row_sum) saw_row = true;
    if (v.kind == PlanViolation::Kind::column_mean) saw_col = true;
  }
  CHECK(saw_row);
  CHECK(saw_col);  // losing R mass also breaks the statewide share

  DistrictingPlan negative = good;
  negative.rows[1].counts[Group::mD] = -0.05;
  negative.rows[1].counts[Group::R] = 0.55;
  auto v2 = validate_plan(negative, demo);
  bool saw_neg = false;
  for (const auto& v : v2) {
    if (v.kind == PlanViolation::Kind::negative_count) saw_neg = true;
  }
  CHECK(saw_neg);

  // Wrong district count short-circuits into a single violation.
  DistrictingPlan wrong_k{{good.rows[0]}};
  auto v3 = validate_plan(wrong_k, demo);
  REQUIRE(v3.size() == 1);
  CHECK(v3[0].message == "plan has 1 districts, expected 2");
}

TEST_CASE("uniform plan mirrors the state and is feasible") {
  StateDemographics demo{GroupVals{0.3, 0.33, 0.37}, 4};
  DistrictingPlan plan = uniform_plan(demo);
  REQUIRE(plan.size() == 4);
  CHECK(validate_plan(plan, demo).empty());
  for (const auto& d : plan.rows) {
    CHECK(d.counts[Group::mD] == doctest::Approx(0.3));
  }
  CHECK(concentration_range(plan) == doctest::Approx(0.0));
}

TEST_CASE("concentration range is the minority spread") {
  DistrictingPlan plan{{DistrictComposition{GroupVals{0.75, 0.15, 0.10}, 1.0},
                        DistrictComposition{GroupVals{0.0, 0.525, 0.475}, 1.0},
                        DistrictComposition{GroupVals{0.0, 0.525, 0.475}, 1.0}}};
  CHECK(concentration_range(plan) == doctest::Approx(0.75));
  CHECK_THROWS_AS((void)concentration_range(DistrictingPlan{}), ValidationError);
}

}  // TEST_SUITE
