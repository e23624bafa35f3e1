#pragma once

#include "distopt/district.hpp"
#include "distopt/profile.hpp"

namespace distopt {

// District described by minority share s and nonminority mix t: counts are
// (s, t(1-s), (1-t)(1-s)) * total. The (s, t) chart is how curvature of the
// minority transfer share is analyzed along minority-concentration paths.
struct SurfacePoint {
  double s = 0.0;      // minority population share
  double t = 0.0;      // nD share of the nonminority remainder
  double total = 1.0;  // district population

  DistrictComposition to_composition() const;
};

// Aggregate power Pi_k = sum_i pi_i N_i of one district for one matchup's
// power vector, plus the minority transfer share f = pi_mD N_mD / Pi_k.
struct DistrictPower {
  double aggregate = 0.0;       // Pi_k
  double minority_share = 0.0;  // f = T_mD under a unit budget
};

DistrictPower district_power(const GroupVals& powers, const DistrictComposition& district);

// Minority transfer share f: the fraction of the district budget flowing to
// minority Democrats in equilibrium. Equals T_mD for a unit budget.
double minority_share(const GroupVals& powers, const DistrictComposition& district);

// First derivatives of f. Count derivatives treat N_R as the residual that
// keeps district population fixed: wrt_count_mD holds N_nD fixed, and
// wrt_count_nD holds N_mD fixed (nD-for-R substitution).
struct ShareGradient {
  GroupVals wrt_power;     // df/dpi_i
  double wrt_count_mD = 0.0;
  double wrt_count_nD = 0.0;
};

ShareGradient share_gradient(const GroupVals& powers, const DistrictComposition& district);

// Second derivatives of f over (N_mD, N_nD), same residual-N_R convention.
// The determinant is nonpositive everywhere (equality iff pi_nD = pi_R): the
// share surface is a saddle in the two-count chart, so convexity or concavity
// holds only along fixed-t paths, never as a two-variable property.
struct ShareHessian {
  double mD_mD = 0.0;
  double mD_nD = 0.0;
  double nD_nD = 0.0;
  double det = 0.0;
};

ShareHessian share_hessian(const GroupVals& powers, const DistrictComposition& district);

// Second derivative g''(s) of the minority share along the fixed-t path
// through `p`. Negative when minority power exceeds the t-blend of the other
// powers, positive when it falls short.
double path_curvature(const GroupVals& powers, const SurfacePoint& p);

enum class CurvatureClass : int { concave = 0, convex = 1, indeterminate = 2 };

std::string_view curvature_class_name(CurvatureClass c);

// Lemma-style global classification of the fixed-t path curvature: concave
// iff pi_mD is the strict maximum power, convex iff the strict minimum,
// indeterminate otherwise (sign then depends on t).
CurvatureClass classify_curvature(const GroupVals& powers);

// Greedy packing pass: repeatedly swaps nonminority population between
// district pairs (sending the more powerful nonminority group toward the
// district with the weaker squared minority pull) while the statewide
// minority transfer total strictly increases. `step` is the initial transfer
// size; it shrinks geometrically to 1e-6 before giving up.
DistrictingPlan swap_improve(const DistrictingPlan& plan, const GroupVals& powers,
                             double step);

// Statewide distributive welfare of minority Democrats.
struct CompetitionWelfare {
  double linear = 0.0;  // sum_k T_mD,k
  double crra = 0.0;    // sum_k N_mD,k * u_mD(b_mD,k)
};

CompetitionWelfare competition_welfare(const DistrictingPlan& plan, const GroupVals& powers,
                                       double kappa_mD = 1.0, double epsilon = 0.5);

}  // namespace distopt
