#include "distopt/district.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace distopt {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

DistrictComposition DistrictComposition::from_counts(const GroupVals& counts) {
  for (Group g : kGroups) {
    if (!(counts[g] >= 0.0) || !std::isfinite(counts[g])) {
      throw ValidationError("district count for " + std::string(group_name(g)) +
                            " must be finite and nonnegative");
    }
  }
  DistrictComposition d;
  d.counts = counts;
  d.total = counts.sum();
  if (!(d.total > 0.0)) {
    throw ValidationError("district must have positive population");
  }
  return d;
}

DistrictComposition DistrictComposition::from_shares(double mD, double nD, double R) {
  DistrictComposition d = from_counts(GroupVals{mD, nD, R});
  if (std::abs(d.total - 1.0) > 1e-9) {
    throw ValidationError("district shares must sum to 1 (got " + fmt(d.total) + ")");
  }
  d.total = 1.0;
  return d;
}

double DistrictComposition::democratic_minority_share() const {
  const double dems = counts[Group::mD] + counts[Group::nD];
  if (!(dems > 0.0)) {
    throw ValidationError(
        "district has no Democratic voters; its primary electorate is empty");
  }
  return counts[Group::mD] / dems;
}

void StateDemographics::validate() const {
  for (Group g : kGroups) {
    if (!(shares[g] >= 0.0) || !std::isfinite(shares[g])) {
      throw ValidationError("statewide share for " + std::string(group_name(g)) +
                            " must be finite and nonnegative");
    }
  }
  if (std::abs(shares.sum() - 1.0) > 1e-9) {
    throw ValidationError("statewide shares must sum to 1 (got " + fmt(shares.sum()) + ")");
  }
  if (districts < 1) {
    throw ValidationError("state must have at least one district");
  }
}

std::vector<PlanViolation> validate_plan(const DistrictingPlan& plan,
                                         const StateDemographics& demo,
                                         double tol) {
  demo.validate();
  std::vector<PlanViolation> out;
  if (plan.size() != demo.districts) {
    PlanViolation v;
    v.kind = PlanViolation::Kind::row_sum;
    v.value = plan.size();
    v.expected = demo.districts;
    v.message = "plan has " + std::to_string(plan.size()) + " districts, expected " +
                std::to_string(demo.districts);
    out.push_back(std::move(v));
    return out;
  }

  GroupVals column_sums;
  for (int k = 0; k < plan.size(); ++k) {
    const DistrictComposition& d = plan.rows[k];
    double row = 0.0;
    for (Group g : kGroups) {
      const double c = d.counts[g];
      if (!(c >= -tol) || !std::isfinite(c)) {
        PlanViolation v;
        v.kind = PlanViolation::Kind::negative_count;
        v.district = k;
        v.group = g;
        v.value = c;
        v.message = "district " + std::to_string(k) + " has negative " +
                    std::string(group_name(g)) + " count " + fmt(c);
        out.push_back(std::move(v));
      }
      row += c;
      column_sums[g] += c;
    }
    if (std::abs(row - 1.0) > tol) {
      PlanViolation v;
      v.kind = PlanViolation::Kind::row_sum;
      v.district = k;
      v.value = row;
      v.expected = 1.0;
      v.message = "district " + std::to_string(k) + " population " + fmt(row) +
                  " differs from 1";
      out.push_back(std::move(v));
    }
  }
  const double K = demo.districts;
  for (Group g : kGroups) {
    const double mean = column_sums[g] / K;
    if (std::abs(mean - demo.shares[g]) > tol) {
      PlanViolation v;
      v.kind = PlanViolation::Kind::column_mean;
      v.group = g;
      v.value = mean;
      v.expected = demo.shares[g];
      v.message = "statewide " + std::string(group_name(g)) + " share " + fmt(mean) +
                  " differs from " + fmt(demo.shares[g]);
      out.push_back(std::move(v));
    }
  }
  return out;
}

double concentration_range(const DistrictingPlan& plan) {
  if (plan.rows.empty()) {
    throw ValidationError("concentration range of an empty plan is undefined");
  }
  double lo = plan.rows[0].share(Group::mD);
  double hi = lo;
  for (const auto& d : plan.rows) {
    lo = std::min(lo, d.share(Group::mD));
    hi = std::max(hi, d.share(Group::mD));
  }
  return hi - lo;
}

DistrictingPlan uniform_plan(const StateDemographics& demo) {
  demo.validate();
  DistrictingPlan plan;
  plan.rows.assign(demo.districts, DistrictComposition{demo.shares, 1.0});
  return plan;
}

}  // namespace distopt
