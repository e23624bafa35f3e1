#include "distopt/selection.hpp"

#include <cmath>

namespace distopt {

namespace {

struct Counts {
  double s, n, r, k;  // N_mD, N_nD, N_R, N_k
};

Counts counts_of(const DistrictComposition& d) {
  return {d.counts[Group::mD], d.counts[Group::nD], d.counts[Group::R], d.total};
}

// Population-weighted support for the first-named candidate over the full
// district.
double full_electorate_share(const GroupVals& phi, const Counts& c) {
  return (phi[Group::mD] * c.s + phi[Group::nD] * c.n + phi[Group::R] * c.r) / c.k;
}

double primary_share(const SupportLevels& sup, const Counts& c, PrimaryRule rule) {
  const GroupVals& phi = sup.phi[Matchup::primary_mD_nD];
  if (rule == PrimaryRule::open) return full_electorate_share(phi, c);
  const double dems = c.s + c.n;
  if (!(dems > 0.0)) {
    throw ValidationError("district has no Democratic voters; the closed primary "
                          "electorate is empty");
  }
  return (phi[Group::mD] * c.s + phi[Group::nD] * c.n) / dems;
}

}  // namespace

void SupportLevels::validate() const {
  for (Matchup m : kMatchups) {
    for (Group g : kGroups) {
      const double p = phi[m][g];
      if (!(p > 0.0 && p < 1.0)) {
        throw ValidationError("support level for " + std::string(group_name(g)) + " in " +
                              std::string(matchup_name(m)) +
                              " must lie strictly inside (0, 1)");
      }
    }
  }
}

std::vector<std::string> SupportLevels::ordering_warnings() const {
  std::vector<std::string> out;
  auto warn = [&](Matchup m, Group hi, Group lo) {
    if (!(phi[m][hi] > phi[m][lo])) {
      out.push_back(std::string(matchup_name(m)) + ": expected " +
                    std::string(group_name(hi)) + " support above " +
                    std::string(group_name(lo)));
    }
  };
  // Minority candidate on the ballot: mD most supportive, R least.
  warn(Matchup::primary_mD_nD, Group::mD, Group::nD);
  warn(Matchup::primary_mD_nD, Group::nD, Group::R);
  warn(Matchup::general_mD_R, Group::mD, Group::nD);
  warn(Matchup::general_mD_R, Group::nD, Group::R);
  // Democrat vs Republican: both Democratic groups above Republicans.
  warn(Matchup::general_nD_R, Group::mD, Group::R);
  warn(Matchup::general_nD_R, Group::nD, Group::R);
  return out;
}

void IdeologyWeights::validate() const {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw ValidationError("ideology weight beta must lie in [0, 1]");
  }
}

StageWinProbs stage_win_probabilities(const SupportLevels& support,
                                      const DistrictComposition& district,
                                      PrimaryRule rule) {
  support.validate();
  const Counts c = counts_of(district);
  if (!(c.k > 0.0)) {
    throw ValidationError("district has no population");
  }
  StageWinProbs p;
  p.primary = primary_share(support, c, rule);
  p.general_mD = full_electorate_share(support.phi[Matchup::general_mD_R], c);
  p.general_nD = full_electorate_share(support.phi[Matchup::general_nD_R], c);
  p.win_mD = p.primary * p.general_mD;
  p.win_nD = (1.0 - p.primary) * p.general_nD;
  p.win_R = 1.0 - p.win_mD - p.win_nD;
  return p;
}

double minority_win_prob(const SupportLevels& support, const DistrictComposition& district,
                         PrimaryRule rule) {
  const StageWinProbs p = stage_win_probabilities(support, district, rule);
  return p.win_mD;
}

SelectionDerivatives selection_derivatives(const SupportLevels& support,
                                           const DistrictComposition& district,
                                           PrimaryRule rule) {
  const StageWinProbs p = stage_win_probabilities(support, district, rule);
  const Counts c = counts_of(district);
  const GroupVals& f1 = support.phi[Matchup::primary_mD_nD];
  const GroupVals& f2 = support.phi[Matchup::general_mD_R];
  const double a = f1[Group::mD], b = f1[Group::nD], e = f1[Group::R];
  const double g_s = f2[Group::mD], g_n = f2[Group::nD], g_r = f2[Group::R];
  const double k2 = c.k * c.k;

  // General-stage responses to adding one voter (district grows with them).
  const double d_general_mD = ((g_s - g_n) * c.n + (g_s - g_r) * c.r) / k2;
  const double d_general_nD = ((g_n - g_s) * c.s + (g_n - g_r) * c.r) / k2;

  SelectionDerivatives out;
  if (rule == PrimaryRule::closed) {
    const double dems2 = (c.s + c.n) * (c.s + c.n);
    out.wrt_count_mD.primary = (a - b) * c.n / dems2 * p.general_mD;
    out.wrt_count_nD.primary = (b - a) * c.s / dems2 * p.general_mD;
    // Substituting nD for R leaves the primary electorate's mD count alone
    // but grows its nD count, so the primary term matches wrt_count_nD.
    out.substitution_nD_for_R.primary = out.wrt_count_nD.primary;
    out.substitution_nD_for_R.general = p.primary * (g_n - g_r) / c.k;
  } else {
    out.wrt_count_mD.primary =
        ((a - b) * c.n + (a - e) * c.r) / k2 * p.general_mD;
    out.wrt_count_nD.primary =
        ((b - a) * c.s + (b - e) * c.r) / k2 * p.general_mD;
    out.substitution_nD_for_R.primary = (b - e) / c.k * p.general_mD;
    out.substitution_nD_for_R.general = p.primary * (g_n - g_r) / c.k;
  }
  out.wrt_count_mD.general = p.primary * d_general_mD;
  out.wrt_count_nD.general = p.primary * d_general_nD;

  out.wrt_count_mD.total = out.wrt_count_mD.primary + out.wrt_count_mD.general;
  out.wrt_count_nD.total = out.wrt_count_nD.primary + out.wrt_count_nD.general;
  out.substitution_nD_for_R.total =
      out.substitution_nD_for_R.primary + out.substitution_nD_for_R.general;
  return out;
}

SelectionConvexity selection_convexity(const SupportLevels& support, double t,
                                       PrimaryRule rule) {
  support.validate();
  if (!(t >= 0.0 && t <= 1.0)) {
    throw ValidationError("nonminority mix t must lie in [0, 1]");
  }
  const GroupVals& f1 = support.phi[Matchup::primary_mD_nD];
  const GroupVals& f2 = support.phi[Matchup::general_mD_R];

  SelectionConvexity out;
  if (rule == PrimaryRule::closed) {
    // Sign of (Psi^1 Psi^2)'' = [2t(phi1_mD - phi1_nD)/D^3] * condition.
    out.condition_value = t * (f2[Group::mD] - f2[Group::nD]) - (1.0 - t) * f2[Group::R];
    const double prefactor = t * (f1[Group::mD] - f1[Group::nD]);
    const double signed_value = prefactor * out.condition_value;
    out.sign = signed_value > 0.0 ? 1 : (signed_value < 0.0 ? -1 : 0);
  } else {
    const double slope1 =
        f1[Group::mD] - (t * f1[Group::nD] + (1.0 - t) * f1[Group::R]);
    const double slope2 =
        f2[Group::mD] - (t * f2[Group::nD] + (1.0 - t) * f2[Group::R]);
    out.condition_value = slope1 * slope2;
    out.sign = out.condition_value > 0.0 ? 1 : (out.condition_value < 0.0 ? -1 : 0);
  }
  return out;
}

double selection_win_curvature(const SupportLevels& support, double s, double t,
                               PrimaryRule rule) {
  support.validate();
  if (!(s >= 0.0 && s <= 1.0) || !(t >= 0.0 && t <= 1.0)) {
    throw ValidationError("surface coordinates must lie in [0, 1]");
  }
  const GroupVals& f1 = support.phi[Matchup::primary_mD_nD];
  const GroupVals& f2 = support.phi[Matchup::general_mD_R];
  if (rule == PrimaryRule::open) {
    const double slope1 = f1[Group::mD] - (t * f1[Group::nD] + (1.0 - t) * f1[Group::R]);
    const double slope2 = f2[Group::mD] - (t * f2[Group::nD] + (1.0 - t) * f2[Group::R]);
    return 2.0 * slope1 * slope2;
  }
  const double d = t + (1.0 - t) * s;  // primary electorate share of the district
  if (!(d > 0.0)) {
    throw ValidationError("closed primary electorate is empty at s = 0, t = 0");
  }
  const double condition =
      t * (f2[Group::mD] - f2[Group::nD]) - (1.0 - t) * f2[Group::R];
  return 2.0 * t * (f1[Group::mD] - f1[Group::nD]) / (d * d * d) * condition;
}

double expected_ideology(const SupportLevels& support, const DistrictComposition& district,
                         PrimaryRule rule, const IdeologyWeights& weights) {
  weights.validate();
  const StageWinProbs p = stage_win_probabilities(support, district, rule);
  return p.win_mD + weights.beta * p.win_nD;
}

std::string_view threshold_regime_name(ThresholdRegime r) {
  switch (r) {
    case ThresholdRegime::closed_pos_denominator: return "closed_pos_denominator";
    case ThresholdRegime::closed_neg_denominator: return "closed_neg_denominator";
    case ThresholdRegime::open: return "open";
    case ThresholdRegime::degenerate: return "degenerate";
  }
  return "?";
}

BetaThreshold beta_threshold(const SupportLevels& support,
                             const DistrictComposition& district, PrimaryRule rule) {
  support.validate();
  const Counts c = counts_of(district);
  const GroupVals& f2 = support.phi[Matchup::general_mD_R];
  const GroupVals& f3 = support.phi[Matchup::general_nD_R];

  BetaThreshold out;
  if (rule == PrimaryRule::closed) {
    out.numerator = (f2[Group::mD] - f2[Group::nD]) * c.n - f2[Group::R] * c.k;
    out.denominator = (f3[Group::mD] - f3[Group::nD]) * c.n - f3[Group::R] * c.k;
    out.regime = out.denominator > 0.0 ? ThresholdRegime::closed_pos_denominator
                                       : ThresholdRegime::closed_neg_denominator;
  } else {
    out.numerator = f2[Group::mD] - f2[Group::R];
    out.denominator = f3[Group::mD] - f3[Group::R];
    out.regime = ThresholdRegime::open;
  }
  if (std::abs(out.denominator) < 1e-12 * std::max(1.0, std::abs(out.numerator))) {
    out.regime = ThresholdRegime::degenerate;
    out.value = 0.0;  // curvature sign is beta-free; threshold is meaningless
  } else {
    out.value = out.numerator / out.denominator;
  }
  return out;
}

int curvature_sign_from_rule(const BetaThreshold& threshold, double beta) {
  // Affine-in-beta curvature: numerator - beta * denominator decides the sign
  // (under the documented support ordering, which makes the prefactor
  // positive). The regime just restates which side of the threshold is which.
  double v;
  switch (threshold.regime) {
    case ThresholdRegime::degenerate:
      v = threshold.numerator;
      break;
    case ThresholdRegime::closed_pos_denominator:
    case ThresholdRegime::open:
      v = threshold.value - beta;  // convex below the threshold
      break;
    case ThresholdRegime::closed_neg_denominator:
      v = beta - threshold.value;  // convex above the threshold
      break;
    default:
      v = 0.0;
      break;
  }
  return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
}

double ideology_curvature(const SupportLevels& support, const DistrictComposition& district,
                          PrimaryRule rule, const IdeologyWeights& weights) {
  weights.validate();
  const BetaThreshold th = beta_threshold(support, district, rule);
  const Counts c = counts_of(district);
  const GroupVals& f1 = support.phi[Matchup::primary_mD_nD];
  const double affine = th.numerator - weights.beta * th.denominator;
  if (rule == PrimaryRule::closed) {
    const double dems = c.s + c.n;
    if (!(dems > 0.0)) {
      throw ValidationError("district has no Democratic voters; the closed primary "
                            "electorate is empty");
    }
    return 2.0 * (f1[Group::mD] - f1[Group::nD]) * c.n / (c.k * dems * dems * dems) *
           affine;
  }
  return 2.0 * (f1[Group::mD] - f1[Group::R]) * affine / (c.k * c.k);
}

double selection_welfare(const DistrictingPlan& plan, const SupportLevels& support,
                         PrimaryRule rule, const IdeologyWeights& weights) {
  double total = 0.0;
  for (const auto& d : plan.rows) {
    const double n = d.counts[Group::mD];
    if (!(n > 0.0)) continue;  // zero weight, and possibly no primary electorate
    total += n * expected_ideology(support, d, rule, weights);
  }
  return total;
}

}  // namespace distopt
