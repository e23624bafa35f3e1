#pragma once

#include <vector>

#include "distopt/common.hpp"

namespace distopt {

// Group populations within one district. Districts are equal-population, so
// callers normally work with total = 1 and counts that are shares.
struct DistrictComposition {
  GroupVals counts;
  double total = 1.0;

  static DistrictComposition from_counts(const GroupVals& counts);
  static DistrictComposition from_shares(double mD, double nD, double R);

  double share(Group g) const { return counts[g] / total; }
  // Share of the Democratic-primary electorate that is minority (t in the
  // two-coordinate district parameterization). Requires some Democrat present.
  double democratic_minority_share() const;
};

// Statewide group shares and the number of equal-population districts.
struct StateDemographics {
  GroupVals shares;  // statewide population shares, sum to 1
  int districts = 1;

  void validate() const;
};

// An assignment of group populations to districts; row k is district k's
// composition. Feasible plans have every row summing to the district size and
// every column averaging the statewide share.
struct DistrictingPlan {
  std::vector<DistrictComposition> rows;

  int size() const { return static_cast<int>(rows.size()); }
};

struct PlanViolation {
  enum class Kind { negative_count, row_sum, column_mean } kind;
  int district = -1;          // -1 for column violations
  Group group = Group::mD;    // meaningful for negative_count/column_mean
  double value = 0.0;
  double expected = 0.0;
  std::string message;
};

// Checks nonnegativity, per-district population, and statewide share
// conservation against `demo`, with tolerance `tol`. Returns every violation
// found (empty means feasible).
std::vector<PlanViolation> validate_plan(const DistrictingPlan& plan,
                                         const StateDemographics& demo,
                                         double tol = 1e-9);

// Spread of minority concentration across districts:
// max_k share_mD(k) - min_k share_mD(k). Zero for uniform plans.
double concentration_range(const DistrictingPlan& plan);

// Uniform plan: every district mirrors the statewide shares.
DistrictingPlan uniform_plan(const StateDemographics& demo);

}  // namespace distopt
