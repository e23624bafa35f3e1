#include "distopt/welfare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "distopt/surface.hpp"

namespace distopt {

namespace {

// Fixed nonminority mix of a district row: the chart along which its minority
// share is perturbed.
struct Chart {
  double t = 0.0;
  double total = 1.0;
};

Chart chart_of(const DistrictComposition& c, const char* what) {
  const double rest = c.counts[Group::nD] + c.counts[Group::R];
  if (!(rest > 0.0)) {
    throw NumericalError(std::string(what) +
                         ": district is entirely minority, so its fixed-mix "
                         "perturbation path is undefined");
  }
  return {c.counts[Group::nD] / rest, c.total};
}

DistrictComposition comp_at(const Chart& chart, double s) {
  SurfacePoint p{s, chart.t, chart.total};
  return p.to_composition();
}

// Primary odds with a limit convention for pure-Republican districts under a
// closed rule: the first Democrats a perturbation adds along a t = 0 chart
// are minority, so the empty primary resolves to the minority candidate's
// support among its own group.
double primary_odds(const Scenario& scn, const DistrictComposition& comp) {
  if (scn.rule == PrimaryRule::closed && comp.counts[Group::mD] <= 0.0 &&
      comp.counts[Group::nD] <= 0.0) {
    return scn.phi[Matchup::primary_mD_nD][Group::mD];
  }
  return stage_win_probabilities(scn.supports(), comp, scn.rule).primary;
}

const AffinityDistribution& general_affinity(const Scenario& scn, Group g) {
  return scn.primitives->profiles[index_of(g)].affinity_for(Matchup::general_mD_R);
}

// Blended general-stage state in smoothed mode: candidate means mixed with
// the primary odds, supports and powers re-derived there.
struct Blend {
  double psi1 = 0.0;
  GroupVals mu_bar;
  GroupVals phi_bar;
  GroupVals pi_bar;
};

Blend blend_at(const Scenario& scn, const DistrictComposition& comp) {
  const Primitives& pr = *scn.primitives;
  Blend b;
  b.psi1 = primary_odds(scn, comp);
  for (Group g : kGroups) {
    const double mu2 = pr.mu[Matchup::general_mD_R][g];
    const double mu3 = pr.mu[Matchup::general_nD_R][g];
    const double m = b.psi1 * mu2 + (1.0 - b.psi1) * mu3;
    b.mu_bar[g] = m;
    const auto& dist = general_affinity(scn, g);
    b.phi_bar[g] = dist.cdf(m);
    const double f = dist.pdf(m);
    if (!(f > 0.0)) {
      throw NumericalError(std::string("group ") + std::string(group_name(g)) +
                           " has zero affinity density at its blended general-"
                           "stage mean; powers are undefined there");
    }
    const double kappa_g = pr.profiles[index_of(g)].kappa;
    b.pi_bar[g] = std::pow(kappa_g * f, 1.0 / pr.epsilon);
    if (!std::isfinite(b.pi_bar[g])) {
      throw NumericalError("blended platform power overflowed for group " +
                           std::string(group_name(g)));
    }
  }
  return b;
}

// Per-district values held fixed while a plan is perturbed.
struct RowFreeze {
  double psi1 = 0.0;
  GroupVals phi_blend;  // smoothed mode only
  GroupVals pi_blend;   // smoothed mode only
};

RowFreeze freeze_row(const Scenario& scn, const DistrictComposition& comp) {
  RowFreeze f;
  if (scn.mode == MatchupMode::smoothed) {
    Blend b = blend_at(scn, comp);
    f.psi1 = b.psi1;
    f.phi_blend = b.phi_bar;
    f.pi_blend = b.pi_bar;
  } else {
    f.psi1 = primary_odds(scn, comp);
  }
  return f;
}

struct Terms {
  bool selection = true;
  bool consumption = true;
};

// Per-capita transfer to minority Democrats under the given power vector.
double minority_transfer(const GroupVals& powers, const DistrictComposition& comp) {
  const double agg = district_power(powers, comp).aggregate;
  if (!(agg > 0.0)) {
    throw NumericalError("aggregate power vanished; transfers are undefined");
  }
  return powers[Group::mD] / agg;
}

// Welfare contribution of one district. `frz` pins the primary odds (and in
// smoothed mode the blended supports and powers) while the composition moves.
double row_value(const Scenario& scn, const DistrictComposition& comp,
                 const Terms& terms, const RowFreeze* frz) {
  const double n_m = comp.counts[Group::mD];
  if (!(n_m > 0.0)) return 0.0;
  const double beta = scn.weights.beta;
  const double kappa = scn.kappa_mD.value_or(0.0);
  const bool want_cons = terms.consumption && kappa > 0.0;
  const double eps = want_cons ? scn.require_epsilon("consumption welfare") : 0.0;

  double sel = 0.0;
  double cons = 0.0;
  if (scn.mode == MatchupMode::smoothed) {
    double psi1;
    GroupVals phi_g, pi_g;
    if (frz) {
      psi1 = frz->psi1;
      phi_g = frz->phi_blend;
      pi_g = frz->pi_blend;
    } else {
      Blend b = blend_at(scn, comp);
      psi1 = b.psi1;
      phi_g = b.phi_bar;
      pi_g = b.pi_bar;
    }
    double num = 0.0;
    for (Group g : kGroups) num += phi_g[g] * comp.counts[g];
    const double psi_gen = num / comp.total;
    if (terms.selection) sel = n_m * psi_gen * (psi1 + beta * (1.0 - psi1));
    if (want_cons) {
      cons = kappa * n_m * crra_utility(1.0, eps, minority_transfer(pi_g, comp));
    }
  } else {
    const StageWinProbs sp = stage_win_probabilities(scn.supports(), comp, scn.rule);
    const double psi1 = frz ? frz->psi1 : sp.primary;
    if (terms.selection) {
      sel = n_m * (psi1 * sp.general_mD + beta * (1.0 - psi1) * sp.general_nD);
    }
    if (want_cons) {
      const double b2 = minority_transfer(scn.pi[Matchup::general_mD_R], comp);
      const double b3 = minority_transfer(scn.pi[Matchup::general_nD_R], comp);
      cons = kappa * n_m *
             (psi1 * crra_utility(1.0, eps, b2) +
              (1.0 - psi1) * crra_utility(1.0, eps, b3));
    }
  }
  return sel + cons;
}

void require_plan(const Scenario& scn, const DistrictingPlan& plan) {
  if (plan.size() != scn.demographics.districts) {
    throw ValidationError("plan has " + std::to_string(plan.size()) +
                          " districts but the scenario expects " +
                          std::to_string(scn.demographics.districts));
  }
  auto violations = validate_plan(plan, scn.demographics, 1e-7);
  if (!violations.empty()) {
    throw ValidationError("infeasible plan: " + violations.front().message);
  }
}

WelfareParts parts_unchecked(const Scenario& scn, const DistrictingPlan& plan) {
  WelfareParts out;
  for (const auto& row : plan.rows) {
    out.selection += row_value(scn, row, {true, false}, nullptr);
    out.competition += row_value(scn, row, {false, true}, nullptr);
  }
  out.total = out.selection + out.competition;
  return out;
}

// The two districts that trade minority share, their charts, base shares, and
// frozen values, plus a feasible finite-difference step.
struct PairContext {
  int k = 0;
  int l = 0;
  Chart chart_k, chart_l;
  double s_k = 0.0, s_l = 0.0;
  double ratio = 1.0;  // total_k / total_l, converts k's share step to l's
  RowFreeze frz_k, frz_l;
  double h = 0.0;
};

PairContext make_pair(const Scenario& scn, const DistrictingPlan& plan, int k,
                      const CurvatureOptions& opt, const char* what) {
  const int K = plan.size();
  if (K < 2) {
    throw ValidationError(std::string(what) + " needs at least two districts");
  }
  if (k < 0 || k >= K) {
    throw ValidationError(std::string(what) + ": district index out of range");
  }
  const int l = opt.reservoir < 0 ? (k + 1) % K : opt.reservoir;
  if (l < 0 || l >= K) {
    throw ValidationError(std::string(what) + ": reservoir index out of range");
  }
  if (l == k) {
    throw ValidationError(std::string(what) +
                          ": reservoir must differ from the perturbed district");
  }
  PairContext pc;
  pc.k = k;
  pc.l = l;
  pc.chart_k = chart_of(plan.rows[k], what);
  pc.chart_l = chart_of(plan.rows[l], what);
  pc.s_k = plan.rows[k].share(Group::mD);
  pc.s_l = plan.rows[l].share(Group::mD);
  pc.ratio = pc.chart_k.total / pc.chart_l.total;
  pc.frz_k = freeze_row(scn, plan.rows[k]);
  pc.frz_l = freeze_row(scn, plan.rows[l]);

  if (!(opt.h > 0.0) || !std::isfinite(opt.h)) {
    throw ValidationError(std::string(what) + ": step h must be positive");
  }
  double h = opt.h;
  auto feasible = [&](double step) {
    return pc.s_k - step >= 0.0 && pc.s_k + step <= 1.0 &&
           pc.s_l - step * pc.ratio >= 0.0 && pc.s_l + step * pc.ratio <= 1.0;
  };
  while (h >= 1e-6 && !feasible(h)) h *= 0.5;
  if (h < 1e-6) {
    throw NumericalError(std::string(what) +
                         ": no feasible perturbation step of at least 1e-6 "
                         "(district or reservoir sits at a share boundary)");
  }
  pc.h = h;
  return pc;
}

// Welfare of the perturbed pair at offset x; other districts are unchanged by
// the perturbation and drop out of differences.
double pair_value(const Scenario& scn, const PairContext& pc, double x,
                  const Terms& terms, bool frozen_eval) {
  const DistrictComposition ck = comp_at(pc.chart_k, pc.s_k + x);
  const DistrictComposition cl = comp_at(pc.chart_l, pc.s_l - x * pc.ratio);
  const RowFreeze* fk = frozen_eval ? &pc.frz_k : nullptr;
  const RowFreeze* fl = frozen_eval ? &pc.frz_l : nullptr;
  return row_value(scn, ck, terms, fk) + row_value(scn, cl, terms, fl);
}

template <typename F>
double second_diff(F&& f, double h) {
  return (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
}

FeedbackKind classify_feedback(double benchmark, double interaction) {
  if ((benchmark + interaction) * benchmark < 0.0 &&
      std::abs(interaction) > std::abs(benchmark)) {
    return FeedbackKind::overturning;
  }
  if (std::abs(interaction) < std::max(1e-8, 0.05 * std::abs(benchmark))) {
    return FeedbackKind::negligible;
  }
  return FeedbackKind::reinforcing;
}

ChannelAlignment classify_alignment(double selection_curv, double competition_curv) {
  if (selection_curv > 0.0 && competition_curv > 0.0) {
    return ChannelAlignment::aligned_convex;
  }
  if (selection_curv < 0.0 && competition_curv < 0.0) {
    return ChannelAlignment::aligned_concave;
  }
  return ChannelAlignment::divergent;
}

CurvatureEntry curvature_core(const Scenario& scn, const DistrictingPlan& plan,
                              int k, const CurvatureOptions& opt) {
  const PairContext pc = make_pair(scn, plan, k, opt, "welfare_curvature");
  const bool freeze_live = scn.mode == MatchupMode::frozen;

  auto live = [&](double x) { return pair_value(scn, pc, x, {true, true}, freeze_live); };
  auto sel_only = [&](double x) { return pair_value(scn, pc, x, {true, false}, freeze_live); };
  auto cons_frozen = [&](double x) { return pair_value(scn, pc, x, {false, true}, true); };

  CurvatureEntry e;
  e.district = k;
  e.reservoir = pc.l;
  e.s = pc.s_k;
  e.h = pc.h;
  e.welfare = parts_unchecked(scn, plan).total;
  e.curvature = second_diff(live, pc.h);
  e.selection_curvature = second_diff(sel_only, pc.h);
  e.competition_curvature = second_diff(cons_frozen, pc.h);
  e.benchmark = e.selection_curvature + e.competition_curvature;
  e.interaction = e.curvature - e.benchmark;
  if (!std::isfinite(e.curvature) || !std::isfinite(e.benchmark)) {
    throw NumericalError("welfare curvature did not evaluate to a finite value");
  }
  e.monitors = feedback_monitors(scn, plan, k, pc.h);
  const bool safe = e.monitors.psi_slope < opt.thresholds.psi_slope &&
                    e.monitors.mu_slope < opt.thresholds.mu_slope &&
                    e.monitors.density_elasticity < opt.thresholds.density_elasticity;
  e.classification = safe ? DistrictClass::safe : DistrictClass::tipping;
  e.feedback = classify_feedback(e.benchmark, e.interaction);
  e.alignment = classify_alignment(e.selection_curvature, e.competition_curvature);
  return e;
}

// Concentration sweep of district k against its reservoir: one curvature
// decomposition per grid point over the feasible share range.
std::vector<CurvatureSample> sweep_samples(const Scenario& scn,
                                           const DistrictingPlan& plan, int k,
                                           const CurvatureOptions& opt,
                                           double grid_res, const char* what) {
  if (!(grid_res > 0.0 && grid_res <= 0.5)) {
    throw ValidationError(std::string(what) + ": grid resolution must be in (0, 0.5]");
  }
  const PairContext pc = make_pair(scn, plan, k, opt, what);

  // Feasible offsets keep both districts' shares inside [0, 1]; the margin
  // leaves room for the finite-difference step at every sample.
  const double x_lo = std::max(-pc.s_k, (pc.s_l - 1.0) / pc.ratio);
  const double x_hi = std::min(1.0 - pc.s_k, pc.s_l / pc.ratio);
  const double margin = std::max(opt.h, 0.01);
  const double lo = pc.s_k + x_lo + margin;
  const double hi = pc.s_k + x_hi - margin;
  if (!(lo < hi)) {
    throw NumericalError(std::string(what) +
                         ": the feasible sweep range is empty at this grid "
                         "and step size");
  }

  std::vector<CurvatureSample> out;
  DistrictingPlan probe = plan;
  for (double s = lo; s <= hi + 1e-12; s += grid_res) {
    const double x = s - pc.s_k;
    probe.rows[pc.k] = comp_at(pc.chart_k, s);
    probe.rows[pc.l] = comp_at(pc.chart_l, pc.s_l - x * pc.ratio);
    const CurvatureEntry e = curvature_core(scn, probe, k, opt);
    CurvatureSample sample;
    sample.district = k;
    sample.s = s;
    sample.psi_primary = primary_odds(scn, probe.rows[pc.k]);
    sample.welfare = e.welfare;
    sample.curvature = e.curvature;
    sample.benchmark = e.benchmark;
    sample.interaction = e.interaction;
    out.push_back(sample);
  }
  return out;
}

}  // namespace

WelfareParts welfare_parts(const Scenario& scenario, const DistrictingPlan& plan) {
  require_plan(scenario, plan);
  return parts_unchecked(scenario, plan);
}

double total_welfare(const Scenario& scenario, const DistrictingPlan& plan) {
  return welfare_parts(scenario, plan).total;
}

std::string_view district_class_name(DistrictClass c) {
  return c == DistrictClass::safe ? "safe" : "tipping";
}

std::string_view feedback_kind_name(FeedbackKind k) {
  switch (k) {
    case FeedbackKind::reinforcing: return "reinforcing";
    case FeedbackKind::overturning: return "overturning";
    case FeedbackKind::negligible: return "negligible";
  }
  return "?";
}

std::string_view channel_alignment_name(ChannelAlignment a) {
  switch (a) {
    case ChannelAlignment::aligned_convex: return "aligned_convex";
    case ChannelAlignment::aligned_concave: return "aligned_concave";
    case ChannelAlignment::divergent: return "divergent";
  }
  return "?";
}

std::string_view allocation_regime_name(AllocationRegime r) {
  switch (r) {
    case AllocationRegime::global_convex: return "global_convex";
    case AllocationRegime::global_concave: return "global_concave";
    case AllocationRegime::nonmonotonic: return "nonmonotonic";
  }
  return "?";
}

FeedbackMonitors feedback_monitors(const Scenario& scenario, const DistrictingPlan& plan,
                                   int district, double h) {
  if (district < 0 || district >= plan.size()) {
    throw ValidationError("feedback_monitors: district index out of range");
  }
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw ValidationError("feedback_monitors: window h must be positive");
  }
  const auto& row = plan.rows[district];
  const Chart chart = chart_of(row, "feedback_monitors");
  const double s = row.share(Group::mD);
  const double lo = std::max(0.0, s - h);
  const double hi = std::min(1.0, s + h);

  std::vector<double> points{lo, s, hi};
  points.erase(std::unique(points.begin(), points.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-15; }),
               points.end());

  std::vector<double> psi;
  psi.reserve(points.size());
  for (double p : points) psi.push_back(primary_odds(scenario, comp_at(chart, p)));

  FeedbackMonitors mon;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double slope = (psi[i] - psi[i - 1]) / (points[i] - points[i - 1]);
    mon.psi_slope = std::max(mon.psi_slope, std::abs(slope));
  }

  if (scenario.mode == MatchupMode::smoothed) {
    const Primitives& pr = *scenario.primitives;
    for (Group g : kGroups) {
      const auto& dist = general_affinity(scenario, g);
      for (std::size_t i = 0; i < points.size(); ++i) {
        const double m = psi[i] * pr.mu[Matchup::general_mD_R][g] +
                         (1.0 - psi[i]) * pr.mu[Matchup::general_nD_R][g];
        const double f = dist.pdf(m);
        const double el = f > 0.0 ? std::abs(dist.pdf_prime(m) / f)
                                  : std::numeric_limits<double>::infinity();
        mon.density_elasticity = std::max(mon.density_elasticity, el);
        if (i > 0) {
          const double prev = psi[i - 1] * pr.mu[Matchup::general_mD_R][g] +
                              (1.0 - psi[i - 1]) * pr.mu[Matchup::general_nD_R][g];
          const double slope = (m - prev) / (points[i] - points[i - 1]);
          mon.mu_slope = std::max(mon.mu_slope, std::abs(slope));
        }
      }
    }
  } else if (scenario.primitives) {
    // Candidate means do not move outside smoothed mode, so mu_slope stays 0;
    // the density log-slope is still reported at the fixed matchup means.
    const Primitives& pr = *scenario.primitives;
    for (Group g : kGroups) {
      for (Matchup m : {Matchup::general_mD_R, Matchup::general_nD_R}) {
        const auto& dist = pr.profiles[index_of(g)].affinity_for(m);
        const double mu = pr.mu[m][g];
        const double f = dist.pdf(mu);
        const double el = f > 0.0 ? std::abs(dist.pdf_prime(mu) / f)
                                  : std::numeric_limits<double>::infinity();
        mon.density_elasticity = std::max(mon.density_elasticity, el);
      }
    }
  }
  return mon;
}

DistrictClass classify_district(const Scenario& scenario, const DistrictingPlan& plan,
                                int district, const FeedbackThresholds& thresholds,
                                double h) {
  const FeedbackMonitors mon = feedback_monitors(scenario, plan, district, h);
  const bool safe = mon.psi_slope < thresholds.psi_slope &&
                    mon.mu_slope < thresholds.mu_slope &&
                    mon.density_elasticity < thresholds.density_elasticity;
  return safe ? DistrictClass::safe : DistrictClass::tipping;
}

CurvatureEntry welfare_curvature(const Scenario& scenario, const DistrictingPlan& plan,
                                 int district, const CurvatureOptions& options) {
  require_plan(scenario, plan);
  return curvature_core(scenario, plan, district, options);
}

std::vector<CurvatureEntry> curvature_report(const Scenario& scenario,
                                             const DistrictingPlan& plan,
                                             const CurvatureOptions& options) {
  require_plan(scenario, plan);
  std::vector<CurvatureEntry> out;
  out.reserve(plan.rows.size());
  for (int k = 0; k < plan.size(); ++k) {
    CurvatureOptions row = options;
    // A fixed reservoir cannot absorb its own perturbation; that one row
    // falls back to the next-district default.
    if (row.reservoir == k) row.reservoir = -1;
    out.push_back(curvature_core(scenario, plan, k, row));
  }
  return out;
}

InteractionTerms interaction_formula(const Scenario& scenario, const DistrictingPlan& plan,
                                     int district, const CurvatureOptions& options) {
  if (scenario.mode != MatchupMode::smoothed) {
    throw ValidationError(
        "interaction_formula needs the smoothed matchup mode (the analytic "
        "split differentiates powers at the blended general-stage mean)");
  }
  const PairContext pc = make_pair(scenario, plan, district, options, "interaction_formula");
  const Primitives& pr = *scenario.primitives;
  const double eps = pr.epsilon;
  const double kappa = scenario.kappa_mD.value_or(0.0);

  InteractionTerms out;
  // Consumption carries no stage weight in smoothed mode (one blended general
  // platform applies regardless of who wins), so the reweighting bucket is
  // identically zero and feedback is pure pivotality.
  out.reweighting = 0.0;
  if (kappa == 0.0) return out;

  const double a = scenario.phi[Matchup::primary_mD_nD][Group::mD];
  const double c = scenario.phi[Matchup::primary_mD_nD][Group::nD];
  const double r = scenario.phi[Matchup::primary_mD_nD][Group::R];

  // One district's consumption-curvature excess over its frozen-power
  // benchmark, in that district's own share units.
  auto district_pivotality = [&](const Chart& chart, double s0) {
    const GroupVals n(chart.total * s0, chart.total * chart.t * (1.0 - s0),
                      chart.total * (1.0 - chart.t) * (1.0 - s0));
    const GroupVals np(chart.total, -chart.total * chart.t,
                       -chart.total * (1.0 - chart.t));

    const Blend base = blend_at(scenario, comp_at(chart, s0));

    // Primary-odds derivatives along the chart.
    double p1p = 0.0, p1pp = 0.0;
    if (scenario.rule == PrimaryRule::closed) {
      const double d = chart.t + (1.0 - chart.t) * s0;
      p1p = chart.t * (a - c) / (d * d);
      p1pp = -2.0 * chart.t * (1.0 - chart.t) * (a - c) / (d * d * d);
    } else {
      p1p = a - c * chart.t - r * (1.0 - chart.t);
      p1pp = 0.0;
    }

    GroupVals pi = base.pi_bar, pip, pipp;
    for (Group g : kGroups) {
      const double dmu = pr.mu[Matchup::general_mD_R][g] - pr.mu[Matchup::general_nD_R][g];
      const double mup = p1p * dmu;
      const double mupp = p1pp * dmu;
      const auto& dist = general_affinity(scenario, g);
      const double f = dist.pdf(base.mu_bar[g]);
      const double lf = dist.pdf_prime(base.mu_bar[g]) / f;
      const double lf_slope = dist.pdf_prime2(base.mu_bar[g]) / f - lf * lf;
      pip[g] = pi[g] / eps * lf * mup;
      pipp[g] = pip[g] / eps * lf * mup +
                pi[g] / eps * (lf_slope * mup * mup + lf * mupp);
    }

    double agg = 0.0, aggp = 0.0, aggpp = 0.0, agg0p = 0.0;
    for (Group g : kGroups) {
      agg += pi[g] * n[g];
      aggp += pip[g] * n[g] + pi[g] * np[g];
      aggpp += pipp[g] * n[g] + 2.0 * pip[g] * np[g];
      agg0p += pi[g] * np[g];  // frozen powers: only populations move
    }
    if (!(agg > 0.0)) {
      throw NumericalError("aggregate power vanished during the interaction split");
    }

    const double pm = pi[Group::mD];
    const double b = pm / agg;
    const double bp = pip[Group::mD] / agg - pm * aggp / (agg * agg);
    const double bpp = pipp[Group::mD] / agg - 2.0 * pip[Group::mD] * aggp / (agg * agg) -
                       pm * aggpp / (agg * agg) + 2.0 * pm * aggp * aggp / (agg * agg * agg);
    const double b0p = -pm * agg0p / (agg * agg);
    const double b0pp = 2.0 * pm * agg0p * agg0p / (agg * agg * agg);

    const double up = std::pow(b, -eps);
    const double upp = -eps * std::pow(b, -eps - 1.0);
    return kappa * (2.0 * np[Group::mD] * up * (bp - b0p) +
                    n[Group::mD] * (upp * (bp * bp - b0p * b0p) + up * (bpp - b0pp)));
  };

  out.pivotality = district_pivotality(pc.chart_k, pc.s_k) +
                   pc.ratio * pc.ratio * district_pivotality(pc.chart_l, pc.s_l);
  out.total = out.reweighting + out.pivotality;
  return out;
}

TippingScan tipping_region(const Scenario& scenario, const DistrictingPlan& plan_template,
                           int district, double grid_res,
                           const CurvatureOptions& options, double interval_fraction) {
  if (!(interval_fraction > 0.0 && interval_fraction < 1.0)) {
    throw ValidationError("tipping_region: interval fraction must be in (0, 1)");
  }
  TippingScan scan;
  scan.samples = sweep_samples(scenario, plan_template, district, options, grid_res,
                               "tipping_region");
  const auto& ss = scan.samples;

  // Locate where the primary odds cross 1/2. Samples exactly on the knife
  // edge are skipped when reading signs, so a flat stretch at the crossing
  // (or a scenario pinned at 1/2 everywhere) is not read as many crossings;
  // more than one genuine sign change breaks the single-index reading.
  int crossings = 0;
  int prev_sign = 0;
  double prev_s = 0.0, prev_d = 0.0;
  double last_zero_s = 0.0;
  bool pending_zero = false;  // knife-edge samples since the last signed one
  for (const auto& sample : ss) {
    const double d = sample.psi_primary - 0.5;
    const int sign = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (sign == 0) {
      pending_zero = true;
      last_zero_s = sample.s;
      continue;
    }
    if (prev_sign != 0 && sign != prev_sign) {
      ++crossings;
      scan.crossing = pending_zero
                          ? last_zero_s
                          : prev_s + (sample.s - prev_s) * prev_d / (prev_d - d);
    }
    prev_sign = sign;
    prev_s = sample.s;
    prev_d = d;
    pending_zero = false;
  }
  if (crossings == 0 && pending_zero && prev_sign != 0) {
    // The sweep ends exactly on the knife edge after a one-signed approach.
    ++crossings;
    scan.crossing = last_zero_s;
  }
  if (crossings > 1) {
    throw ValidationError(
        "tipping_region: primary odds cross 1/2 more than once over the "
        "sweep, so the single-crossing assumption does not hold");
  }
  scan.has_crossing = crossings == 1;

  double max_i = 0.0;
  std::size_t argmax = 0;
  for (std::size_t i = 0; i < ss.size(); ++i) {
    if (std::abs(ss[i].interaction) > max_i) {
      max_i = std::abs(ss[i].interaction);
      argmax = i;
    }
  }
  if (!scan.has_crossing || max_i < 1e-8) {
    scan.empty = true;
    return scan;
  }

  const double threshold = interval_fraction * max_i;
  std::size_t first = argmax, last = argmax;
  while (first > 0 && std::abs(ss[first - 1].interaction) >= threshold) --first;
  while (last + 1 < ss.size() && std::abs(ss[last + 1].interaction) >= threshold) ++last;

  scan.empty = false;
  scan.interval.lower = ss[first].s;
  scan.interval.upper = ss[last].s;
  for (std::size_t i = 0; i < ss.size(); ++i) {
    const double v = std::abs(ss[i].interaction);
    if (i >= first && i <= last) {
      scan.max_inside = std::max(scan.max_inside, v);
    } else {
      scan.max_outside = std::max(scan.max_outside, v);
    }
  }

  // Peak prominence: compare the interior peak against the outer tenth of the
  // sweep range on each side.
  const double lo = ss.front().s, hi = ss.back().s;
  const double edge = 0.1 * (hi - lo);
  double peak_interior = 0.0, peak_edge = 0.0;
  for (const auto& sample : ss) {
    const double v = std::abs(sample.interaction);
    if (sample.s <= lo + edge || sample.s >= hi - edge) {
      peak_edge = std::max(peak_edge, v);
    } else {
      peak_interior = std::max(peak_interior, v);
    }
  }
  scan.interval.peak_ratio = peak_edge > 0.0
                                 ? peak_interior / peak_edge
                                 : std::numeric_limits<double>::infinity();
  return scan;
}

AllocationReport allocation_report(const Scenario& scenario, const DistrictingPlan& plan,
                                   const CurvatureOptions& options, double grid_res) {
  require_plan(scenario, plan);
  AllocationReport rep;
  for (int k = 0; k < plan.size(); ++k) {
    CurvatureOptions opt = options;
    // A fixed reservoir cannot trade with itself; fall back to its neighbor.
    if (opt.reservoir == k) opt.reservoir = (k + 1) % plan.size();
    rep.evidence.push_back(curvature_core(scenario, plan, k, opt));
    auto sweep = sweep_samples(scenario, plan, k, opt, grid_res, "allocation_report");
    rep.sweep.insert(rep.sweep.end(), sweep.begin(), sweep.end());
  }

  double scale = 0.0;
  for (const auto& s : rep.sweep) scale = std::max(scale, std::abs(s.curvature));
  const double tol = 1e-9 * std::max(1.0, scale);

  bool curv_pos = false, curv_neg = false, bench_pos = false, bench_neg = false;
  for (const auto& s : rep.sweep) {
    if (s.curvature > tol) curv_pos = true;
    if (s.curvature < -tol) curv_neg = true;
    if (s.benchmark > tol) bench_pos = true;
    if (s.benchmark < -tol) bench_neg = true;
    if (std::abs(s.benchmark) > tol &&
        (s.benchmark + s.interaction) * s.benchmark < 0.0) {
      rep.feedback_driven = true;
    }
  }
  if (curv_pos && !curv_neg) {
    rep.regime = AllocationRegime::global_convex;
  } else if (curv_neg && !curv_pos) {
    rep.regime = AllocationRegime::global_concave;
  } else {
    rep.regime = AllocationRegime::nonmonotonic;
  }
  rep.benchmark_driven = bench_pos && bench_neg;
  return rep;
}

}  // namespace distopt
