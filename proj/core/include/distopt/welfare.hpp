#pragma once

#include <string_view>
#include <vector>

#include "distopt/scenario.hpp"

namespace distopt {

// Minority welfare of one plan, split into its two channels: the ideological
// payoff from who holds each seat and the consumption payoff from targeted
// transfers. total is their sum by construction.
struct WelfareParts {
  double selection = 0.0;
  double competition = 0.0;
  double total = 0.0;
};

WelfareParts welfare_parts(const Scenario& scenario, const DistrictingPlan& plan);

// Statewide minority welfare: sum over districts of
// N_mD * [Psi_mD + beta * Psi_nD + kappa_mD * E u(b_mD)], where the
// consumption term averages over which general matchup is in force. Requires
// the scenario to carry epsilon and kappa_mD unless kappa_mD would be 0.
double total_welfare(const Scenario& scenario, const DistrictingPlan& plan);

// Cutoffs below which a district counts as safe: how fast the primary odds
// move in the minority share, how fast blended candidate means move, and how
// large the density log-slope |phi'/phi| is at the operative means.
struct FeedbackThresholds {
  double psi_slope = 0.5;
  double mu_slope = 0.1;
  double density_elasticity = 2.0;
};

// The three monitors classify_district compares against the thresholds,
// measured over [s_k - h, s_k + h] at the district's fixed nonminority mix.
// mu_slope is zero outside smoothed mode (candidate means do not move), and
// density_elasticity is zero for scenarios without primitives (no densities
// to inspect).
struct FeedbackMonitors {
  double psi_slope = 0.0;
  double mu_slope = 0.0;
  double density_elasticity = 0.0;
};

FeedbackMonitors feedback_monitors(const Scenario& scenario, const DistrictingPlan& plan,
                                   int district, double h = 1e-3);

enum class DistrictClass : int { safe = 0, tipping = 1 };

std::string_view district_class_name(DistrictClass c);

// Safe iff all three monitors fall below their thresholds.
DistrictClass classify_district(const Scenario& scenario, const DistrictingPlan& plan,
                                int district, const FeedbackThresholds& thresholds = {},
                                double h = 1e-3);

// Controls for the perturbation experiments. Moving minority share into
// district k draws it from the reservoir district (at that district's own
// fixed nonminority mix), so statewide minority population is conserved;
// -1 picks the next district after k.
struct CurvatureOptions {
  int reservoir = -1;
  double h = 1e-3;  // finite-difference step in share units
  FeedbackThresholds thresholds;
};

enum class FeedbackKind : int { reinforcing = 0, overturning = 1, negligible = 2 };
enum class ChannelAlignment : int {
  aligned_convex = 0,
  aligned_concave = 1,
  divergent = 2,
};

std::string_view feedback_kind_name(FeedbackKind k);
std::string_view channel_alignment_name(ChannelAlignment a);

// Second-order response of statewide welfare to concentrating minority share
// in one district, decomposed as
//   curvature  = W_ss          (everything responds),
//   benchmark  = Ws_ss + Wc_ss (selection channel plus consumption channel
//                               with primary weights and powers frozen at the
//                               base plan),
//   interaction = curvature - benchmark (general-equilibrium feedback).
struct CurvatureEntry {
  int district = 0;
  int reservoir = 0;
  double s = 0.0;       // base minority share of the district
  double h = 0.0;       // step actually used (shrunk near boundaries)
  double welfare = 0.0; // statewide welfare at the base plan

  double curvature = 0.0;    // W_ss
  double benchmark = 0.0;    // C
  double interaction = 0.0;  // I = W_ss - C
  double selection_curvature = 0.0;    // Ws_ss
  double competition_curvature = 0.0;  // Wc_ss, frozen-weight consumption

  DistrictClass classification = DistrictClass::safe;
  FeedbackKind feedback = FeedbackKind::negligible;
  ChannelAlignment alignment = ChannelAlignment::divergent;
  FeedbackMonitors monitors;
};

CurvatureEntry welfare_curvature(const Scenario& scenario, const DistrictingPlan& plan,
                                 int district, const CurvatureOptions& options = {});

// welfare_curvature for every district of the plan.
std::vector<CurvatureEntry> curvature_report(const Scenario& scenario,
                                             const DistrictingPlan& plan,
                                             const CurvatureOptions& options = {});

// Analytic split of the interaction term in smoothed mode: reweighting
// (office-odds weights shifting over fixed payoff levels; identically zero in
// smoothed mode, where consumption carries no stage weight) and pivotality
// (powers re-deriving at the blended mean as the primary tightens or slackens).
// total is their sum and tracks welfare_curvature's residual interaction.
struct InteractionTerms {
  double reweighting = 0.0;
  double pivotality = 0.0;
  double total = 0.0;
};

InteractionTerms interaction_formula(const Scenario& scenario, const DistrictingPlan& plan,
                                     int district, const CurvatureOptions& options = {});

// One point of a concentration sweep: district k rebuilt at minority share s
// (reservoir absorbing the difference), with the curvature decomposition and
// the primary odds there.
struct CurvatureSample {
  int district = 0;
  double s = 0.0;
  double psi_primary = 0.0;
  double welfare = 0.0;
  double curvature = 0.0;
  double benchmark = 0.0;
  double interaction = 0.0;
};

// Connected share range where interaction stays within a fixed fraction of
// its peak; peak_ratio compares the peak against the sweep's outer decile.
struct TippingInterval {
  double lower = 0.0;
  double upper = 0.0;
  double peak_ratio = 0.0;
};

struct TippingScan {
  bool empty = true;
  TippingInterval interval;
  double crossing = 0.0;     // s where the primary odds pass 1/2 (when found)
  bool has_crossing = false;
  double max_inside = 0.0;   // max |I| inside the interval
  double max_outside = 0.0;  // max |I| at sampled points outside it
  std::vector<CurvatureSample> samples;
};

// Sweeps district k's minority share over its feasible range on grid
// `grid_res` and locates where feedback concentrates: the maximal connected
// run of samples with |I| >= interval_fraction * max |I| around the peak.
// The scan is empty when the primary odds never cross 1/2 on the sweep or
// when interaction is numerically nil everywhere (|I| < 1e-8).
TippingScan tipping_region(const Scenario& scenario, const DistrictingPlan& plan_template,
                           int district, double grid_res,
                           const CurvatureOptions& options = {},
                           double interval_fraction = 0.1);

// Is concentrating minority voters marginally self-reinforcing everywhere
// (global_convex), self-limiting everywhere (global_concave), or
// direction-dependent?
enum class AllocationRegime : int {
  global_convex = 0,
  global_concave = 1,
  nonmonotonic = 2,
};

std::string_view allocation_regime_name(AllocationRegime r);

struct AllocationReport {
  AllocationRegime regime = AllocationRegime::nonmonotonic;
  // The benchmark channels themselves change sign across the sweeps.
  bool benchmark_driven = false;
  // Feedback somewhere overrides the benchmark's sign.
  bool feedback_driven = false;
  std::vector<CurvatureEntry> evidence;  // per-district decomposition at base
  std::vector<CurvatureSample> sweep;    // concentration sweeps, all districts
};

AllocationReport allocation_report(const Scenario& scenario, const DistrictingPlan& plan,
                                   const CurvatureOptions& options = {},
                                   double grid_res = 0.02);

}  // namespace distopt
