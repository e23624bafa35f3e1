#pragma once

#include <vector>

#include "distopt/district.hpp"
#include "distopt/profile.hpp"

namespace distopt {

// Baseline support probabilities Phi_i^e: the chance a group-i voter backs
// the first-named candidate in each stage, with transfers held equal.
// Stage 1 is the primary (support for the minority Democrat), stage 2 the
// minority Democrat vs Republican general, stage 3 the nonminority Democrat
// vs Republican general (support for the Democrat).
struct SupportLevels {
  PerMatchup<GroupVals> phi;

  double at(Matchup m, Group g) const { return phi[m][g]; }
  void validate() const;  // every entry strictly inside (0, 1)

  // Deviations from the documented support ordering (minority voters most
  // supportive of minority candidates, Republicans least, Democrats above
  // Republicans in generals). Violations are legal inputs, just flagged.
  std::vector<std::string> ordering_warnings() const;
};

// Ideological payoff weights for minority voters: a minority Democrat in
// office is worth 1, a nonminority Democrat beta, a Republican 0.
struct IdeologyWeights {
  double beta = 0.5;

  void validate() const;  // beta in [0, 1]
};

// Win probabilities through the two-stage election in one district.
struct StageWinProbs {
  double primary = 0.0;     // minority candidate wins the primary
  double general_mD = 0.0;  // minority Democrat beats the Republican
  double general_nD = 0.0;  // nonminority Democrat beats the Republican
  double win_mD = 0.0;      // primary * general_mD
  double win_nD = 0.0;      // (1 - primary) * general_nD
  double win_R = 0.0;       // remainder
};

StageWinProbs stage_win_probabilities(const SupportLevels& support,
                                      const DistrictComposition& district,
                                      PrimaryRule rule);

// Probability a minority candidate holds the seat: primary times general.
double minority_win_prob(const SupportLevels& support, const DistrictComposition& district,
                         PrimaryRule rule);

// A win-probability derivative split into its primary-stage and
// general-stage components.
struct DerivativeSplit {
  double primary = 0.0;
  double general = 0.0;
  double total = 0.0;
};

// Local composition effects on the minority candidate's win probability:
// adding minority voters, adding nonminority Democrats (district grows), and
// substituting nonminority Democrats for Republicans at fixed population.
struct SelectionDerivatives {
  DerivativeSplit wrt_count_mD;
  DerivativeSplit wrt_count_nD;
  DerivativeSplit substitution_nD_for_R;
};

SelectionDerivatives selection_derivatives(const SupportLevels& support,
                                           const DistrictComposition& district,
                                           PrimaryRule rule);

// Curvature of the minority win probability in the minority share s at fixed
// nonminority mix t. The sign is independent of s; `condition_value` is the
// factor whose sign decides it (t-scaled support contrast under closed
// primaries, the product of stage slopes under open ones).
struct SelectionConvexity {
  int sign = 0;  // +1 convex, -1 concave, 0 flat
  double condition_value = 0.0;
};

SelectionConvexity selection_convexity(const SupportLevels& support, double t,
                                       PrimaryRule rule);

// Exact d^2 Psi_mD / ds^2 at a surface point (for cross-checks).
double selection_win_curvature(const SupportLevels& support, double s, double t,
                               PrimaryRule rule);

// Expected ideological payoff to minority voters in one district:
// Psi_mD * 1 + Psi_nD * beta (a Republican winner pays 0).
double expected_ideology(const SupportLevels& support, const DistrictComposition& district,
                         PrimaryRule rule, const IdeologyWeights& weights);

// Where beta sits relative to the convex/concave boundary of the expected
// ideological payoff's curvature in N_mD (Republicans as residual).
enum class ThresholdRegime : int {
  closed_pos_denominator = 0,  // convex iff beta < value
  closed_neg_denominator = 1,  // convex iff beta > value
  open = 2,                    // convex iff beta < value
  degenerate = 3,              // curvature does not depend on beta
};

std::string_view threshold_regime_name(ThresholdRegime r);

struct BetaThreshold {
  double value = 0.0;
  ThresholdRegime regime = ThresholdRegime::open;
  double numerator = 0.0;
  double denominator = 0.0;
};

BetaThreshold beta_threshold(const SupportLevels& support,
                             const DistrictComposition& district, PrimaryRule rule);

// Curvature sign implied by the threshold regime at a given beta (+1 convex,
// -1 concave, 0 on the boundary or degenerate-with-zero-numerator).
int curvature_sign_from_rule(const BetaThreshold& threshold, double beta);

// Exact d^2 E[ideology] / dN_mD^2 with N_nD fixed and N_R residual.
double ideology_curvature(const SupportLevels& support, const DistrictComposition& district,
                          PrimaryRule rule, const IdeologyWeights& weights);

// Statewide ideological welfare of minority voters: sum over districts of
// N_mD,k times the district's expected ideological payoff.
double selection_welfare(const DistrictingPlan& plan, const SupportLevels& support,
                         PrimaryRule rule, const IdeologyWeights& weights);

}  // namespace distopt
