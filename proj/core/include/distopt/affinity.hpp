#pragma once

#include <utility>
#include <vector>

#include "distopt/common.hpp"

namespace distopt {

enum class AffinityFamily : int { logistic = 0, normal = 1, tabulated = 2 };

AffinityFamily parse_affinity_family(std::string_view name);
std::string_view affinity_family_name(AffinityFamily f);

// Distribution of a group's idiosyncratic candidate affinity. A voter with
// affinity draw x supports candidate 1 when x exceeds the utility cutoff, so
// vote shares are CDF evaluations and densities drive platform power.
//
// Families: logistic(location, scale), normal(location, scale), and tabulated
// (a strictly increasing piecewise-linear CDF given as (x, F(x)) knots running
// from 0 to 1, which makes the density piecewise constant).
class AffinityDistribution {
 public:
  static AffinityDistribution logistic(double location, double scale);
  static AffinityDistribution normal(double location, double scale);
  static AffinityDistribution tabulated(std::vector<std::pair<double, double>> knots);

  double cdf(double x) const;
  // Density. Zero outside a tabulated distribution's support.
  double pdf(double x) const;
  // Slope of the density; zero everywhere for tabulated (piecewise constant).
  double pdf_prime(double x) const;
  // Curvature of the density; zero everywhere for tabulated.
  double pdf_prime2(double x) const;
  // Inverse CDF for u in (0, 1); used by the sampling oracle.
  double quantile(double u) const;

  AffinityFamily family() const { return family_; }
  double location() const { return location_; }
  double scale() const { return scale_; }
  const std::vector<std::pair<double, double>>& knots() const { return knots_; }

  friend bool operator==(const AffinityDistribution&, const AffinityDistribution&) = default;

 private:
  AffinityDistribution() = default;

  AffinityFamily family_ = AffinityFamily::logistic;
  double location_ = 0.0;
  double scale_ = 1.0;
  std::vector<std::pair<double, double>> knots_;  // tabulated only
};

}  // namespace distopt
