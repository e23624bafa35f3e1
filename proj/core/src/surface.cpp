#include "distopt/surface.hpp"

#include <algorithm>
#include <cmath>

namespace distopt {

namespace {

void check_powers(const GroupVals& powers) {
  for (Group g : kGroups) {
    if (!(powers[g] > 0.0) || !std::isfinite(powers[g])) {
      throw ValidationError("platform power for " + std::string(group_name(g)) +
                            " must be positive and finite");
    }
  }
}

}  // namespace

DistrictComposition SurfacePoint::to_composition() const {
  if (!(s >= 0.0 && s <= 1.0) || !(t >= 0.0 && t <= 1.0)) {
    throw ValidationError("surface point requires s and t in [0, 1]");
  }
  if (!(total > 0.0)) {
    throw ValidationError("surface point requires positive district population");
  }
  DistrictComposition d;
  d.counts[Group::mD] = s * total;
  d.counts[Group::nD] = t * (1.0 - s) * total;
  d.counts[Group::R] = (1.0 - t) * (1.0 - s) * total;
  d.total = total;
  return d;
}

DistrictPower district_power(const GroupVals& powers, const DistrictComposition& district) {
  check_powers(powers);
  double agg = 0.0;
  for (Group g : kGroups) agg += powers[g] * district.counts[g];
  if (!(agg > 0.0)) {
    throw ValidationError("district has no population; aggregate power is zero");
  }
  DistrictPower out;
  out.aggregate = agg;
  out.minority_share = powers[Group::mD] * district.counts[Group::mD] / agg;
  return out;
}

double minority_share(const GroupVals& powers, const DistrictComposition& district) {
  return district_power(powers, district).minority_share;
}

ShareGradient share_gradient(const GroupVals& powers, const DistrictComposition& district) {
  const DistrictPower dp = district_power(powers, district);
  const double pi_s = powers[Group::mD], pi_n = powers[Group::nD], pi_r = powers[Group::R];
  const double n_s = district.counts[Group::mD], n_n = district.counts[Group::nD];
  const double n_r = district.counts[Group::R];
  const double n_k = district.total;
  const double inv2 = 1.0 / (dp.aggregate * dp.aggregate);

  ShareGradient g;
  g.wrt_power[Group::mD] = n_s * (pi_n * n_n + pi_r * n_r) * inv2;
  g.wrt_power[Group::nD] = -pi_s * n_s * n_n * inv2;
  g.wrt_power[Group::R] = -pi_s * n_s * n_r * inv2;
  // Residual-R chart: raising N_mD (or N_nD) displaces Republicans.
  g.wrt_count_mD = pi_s * (pi_n * n_n + pi_r * (n_k - n_n)) * inv2;
  g.wrt_count_nD = pi_s * n_s * (pi_r - pi_n) * inv2;
  return g;
}

ShareHessian share_hessian(const GroupVals& powers, const DistrictComposition& district) {
  const DistrictPower dp = district_power(powers, district);
  const double pi_s = powers[Group::mD], pi_n = powers[Group::nD], pi_r = powers[Group::R];
  const double n_s = district.counts[Group::mD], n_n = district.counts[Group::nD];
  const double n_k = district.total;
  const double pi3 = dp.aggregate * dp.aggregate * dp.aggregate;

  // A = dPi-free part of df/dN_mD; equals Pi - (pi_mD - pi_R) N_mD.
  const double a = pi_r * n_k + (pi_n - pi_r) * n_n;

  ShareHessian h;
  h.mD_mD = 2.0 * pi_s * (pi_r - pi_s) * a / pi3;
  h.mD_nD = pi_s * (pi_n - pi_r) * (dp.aggregate - 2.0 * a) / pi3;
  h.nD_nD = 2.0 * pi_s * n_s * (pi_n - pi_r) * (pi_n - pi_r) / pi3;
  // Equals -pi_mD^2 (pi_nD - pi_R)^2 / Pi^4: nonpositive, zero iff the two
  // nonminority powers coincide. The surface is a saddle wherever they differ.
  h.det = h.mD_mD * h.nD_nD - h.mD_nD * h.mD_nD;
  return h;
}

double path_curvature(const GroupVals& powers, const SurfacePoint& p) {
  check_powers(powers);
  if (!(p.s >= 0.0 && p.s <= 1.0) || !(p.t >= 0.0 && p.t <= 1.0)) {
    throw ValidationError("surface point requires s and t in [0, 1]");
  }
  const double pi_s = powers[Group::mD];
  // Blend of nonminority powers along the fixed-t path.
  const double q = p.t * powers[Group::nD] + (1.0 - p.t) * powers[Group::R];
  const double d = pi_s * p.s + q * (1.0 - p.s);
  if (!(d > 0.0)) {
    throw ValidationError("aggregate power vanishes along the path");
  }
  return -2.0 * pi_s * q * (pi_s - q) / (d * d * d);
}

std::string_view curvature_class_name(CurvatureClass c) {
  switch (c) {
    case CurvatureClass::concave: return "concave";
    case CurvatureClass::convex: return "convex";
    case CurvatureClass::indeterminate: return "indeterminate";
  }
  return "?";
}

CurvatureClass classify_curvature(const GroupVals& powers) {
  check_powers(powers);
  const double pi_s = powers[Group::mD], pi_n = powers[Group::nD], pi_r = powers[Group::R];
  if (pi_s > pi_n && pi_s > pi_r) return CurvatureClass::concave;
  if (pi_s < pi_n && pi_s < pi_r) return CurvatureClass::convex;
  return CurvatureClass::indeterminate;
}

DistrictingPlan swap_improve(const DistrictingPlan& plan, const GroupVals& powers,
                             double step) {
  check_powers(powers);
  if (!(step > 0.0)) {
    throw ValidationError("swap step must be positive");
  }
  const double pi_n = powers[Group::nD], pi_r = powers[Group::R];
  if (pi_n == pi_r) return plan;  // objective is flat in nonminority swaps

  // The more powerful nonminority group leaves the high-pull district.
  const Group strong = pi_n > pi_r ? Group::nD : Group::R;
  const Group weak = pi_n > pi_r ? Group::R : Group::nD;

  DistrictingPlan out = plan;
  const int K = out.size();

  constexpr double kMinStep = 1e-6;
  constexpr double kMinGain = 1e-12;

  while (step >= kMinStep) {
    // Best eligible pair at this step size, by exact objective gain.
    int best_k = -1, best_l = -1;
    double best_gain = 0.0, best_delta = 0.0;
    for (int k = 0; k < K; ++k) {
      for (int l = 0; l < K; ++l) {
        if (k == l) continue;
        const auto& dk = out.rows[k];
        const auto& dl = out.rows[l];
        if (dk.counts[Group::mD] == dl.counts[Group::mD]) continue;
        const double pull_k = dk.counts[Group::mD] / district_power(powers, dk).aggregate;
        const double pull_l = dl.counts[Group::mD] / district_power(powers, dl).aggregate;
        if (!(pull_k * pull_k > pull_l * pull_l)) continue;
        const double delta = std::min({step, dk.counts[strong], dl.counts[weak]});
        if (delta <= 0.0) continue;

        DistrictComposition nk = dk, nl = dl;
        nk.counts[strong] -= delta;
        nk.counts[weak] += delta;
        nl.counts[strong] += delta;
        nl.counts[weak] -= delta;
        const double gain = minority_share(powers, nk) + minority_share(powers, nl) -
                            minority_share(powers, dk) - minority_share(powers, dl);
        if (gain > best_gain) {  // strict: ties go to the earliest (k, l) pair
          best_gain = gain;
          best_k = k;
          best_l = l;
          best_delta = delta;
        }
      }
    }
    if (best_k < 0 || best_gain < kMinGain) {
      step *= 0.5;
      continue;
    }
    auto& dk = out.rows[best_k];
    auto& dl = out.rows[best_l];
    dk.counts[strong] -= best_delta;
    dk.counts[weak] += best_delta;
    dl.counts[strong] += best_delta;
    dl.counts[weak] -= best_delta;
  }
  return out;
}

CompetitionWelfare competition_welfare(const DistrictingPlan& plan, const GroupVals& powers,
                                       double kappa_mD, double epsilon) {
  check_powers(powers);
  CompetitionWelfare w;
  for (const auto& d : plan.rows) {
    const double n = d.counts[Group::mD];
    if (!(n > 0.0)) continue;
    const double b = powers[Group::mD] / district_power(powers, d).aggregate;
    w.linear += b * n;
    w.crra += n * crra_utility(kappa_mD, epsilon, b);
  }
  return w;
}

}  // namespace distopt
