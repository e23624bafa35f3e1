#include "distopt/profile.hpp"

#include <cmath>

namespace distopt {

const AffinityDistribution& GroupProfile::affinity_for(Matchup m) const {
  const auto& a = affinity[m];
  if (!a) {
    throw ValidationError("group profile has no affinity distribution for matchup " +
                          std::string(matchup_name(m)));
  }
  return *a;
}

void validate_profile(const GroupProfile& p) {
  if (!(p.kappa > 0.0) || !std::isfinite(p.kappa)) {
    throw ValidationError("group profile requires kappa > 0");
  }
  if (!(p.epsilon > 0.0) || !std::isfinite(p.epsilon)) {
    throw ValidationError("group profile requires epsilon > 0");
  }
  if (std::abs(p.epsilon - 1.0) < 1e-9) {
    throw ValidationError(
        "epsilon == 1 is outside the model domain (transfer formulas divide by 1 - epsilon); "
        "use a nearby value instead");
  }
}

void validate_profiles(const GroupProfiles& profiles) {
  for (const auto& p : profiles) validate_profile(p);
  for (std::size_t i = 1; i < profiles.size(); ++i) {
    if (std::abs(profiles[i].epsilon - profiles[0].epsilon) > 1e-12) {
      throw ValidationError(
          "all groups must share one CRRA curvature; per-group epsilon values "
          "differ");
    }
  }
}

double crra_utility(double kappa, double epsilon, double b) {
  if (!(b >= 0.0)) {
    throw ValidationError("consumption utility requires a nonnegative transfer");
  }
  if (b == 0.0) {
    if (epsilon > 1.0) {
      throw NumericalError("consumption utility diverges at b = 0 when epsilon > 1");
    }
    return 0.0;
  }
  return kappa * std::pow(b, 1.0 - epsilon) / (1.0 - epsilon);
}

double consumption_utility(const GroupProfile& p, double b) {
  validate_profile(p);
  return crra_utility(p.kappa, p.epsilon, b);
}

GroupPowerVector group_power(const GroupProfiles& profiles, const MatchupContext& ctx) {
  GroupPowerVector out;
  out.context = ctx.key;
  for (Group g : kGroups) {
    const GroupProfile& p = profiles[index_of(g)];
    validate_profile(p);
    const double phi = p.affinity_for(ctx.key).pdf(ctx.mu[g]);
    if (!(phi > 0.0)) {
      throw NumericalError("group " + std::string(group_name(g)) +
                           " has zero affinity density at its matchup mean; platform power "
                           "is undefined there");
    }
    out.power[g] = std::pow(p.kappa * phi, 1.0 / p.epsilon);
    if (!std::isfinite(out.power[g])) {
      throw NumericalError("platform power overflowed for group " +
                           std::string(group_name(g)));
    }
  }
  return out;
}

}  // namespace distopt
