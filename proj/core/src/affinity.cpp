#include "distopt/affinity.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

namespace distopt {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;
constexpr double kInvSqrt2 = 0.7071067811865475244;

void check_scale(double scale, const char* family) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ValidationError(std::string(family) + " affinity requires scale > 0");
  }
}

}  // namespace

AffinityFamily parse_affinity_family(std::string_view name) {
  if (name == "logistic") return AffinityFamily::logistic;
  if (name == "normal") return AffinityFamily::normal;
  if (name == "tabulated") return AffinityFamily::tabulated;
  throw ValidationError("unknown affinity family '" + std::string(name) + "'");
}

std::string_view affinity_family_name(AffinityFamily f) {
  switch (f) {
    case AffinityFamily::logistic: return "logistic";
    case AffinityFamily::normal: return "normal";
    case AffinityFamily::tabulated: return "tabulated";
  }
  return "?";
}

AffinityDistribution AffinityDistribution::logistic(double location, double scale) {
  check_scale(scale, "logistic");
  AffinityDistribution d;
  d.family_ = AffinityFamily::logistic;
  d.location_ = location;
  d.scale_ = scale;
  return d;
}

AffinityDistribution AffinityDistribution::normal(double location, double scale) {
  check_scale(scale, "normal");
  AffinityDistribution d;
  d.family_ = AffinityFamily::normal;
  d.location_ = location;
  d.scale_ = scale;
  return d;
}

AffinityDistribution AffinityDistribution::tabulated(
    std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) {
    throw ValidationError("tabulated affinity requires at least two (x, cdf) knots");
  }
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!std::isfinite(knots[i].first) || !std::isfinite(knots[i].second)) {
      throw ValidationError("tabulated affinity knots must be finite");
    }
    if (i > 0) {
      if (!(knots[i].first > knots[i - 1].first)) {
        throw ValidationError("tabulated affinity x values must be strictly increasing");
      }
      if (!(knots[i].second > knots[i - 1].second)) {
        throw ValidationError("tabulated affinity cdf values must be strictly increasing");
      }
    }
  }
  if (knots.front().second != 0.0 || knots.back().second != 1.0) {
    throw ValidationError("tabulated affinity cdf must run from 0 to 1");
  }
  AffinityDistribution d;
  d.family_ = AffinityFamily::tabulated;
  d.location_ = knots.front().first;
  d.scale_ = knots.back().first - knots.front().first;
  d.knots_ = std::move(knots);
  return d;
}

double AffinityDistribution::cdf(double x) const {
  switch (family_) {
    case AffinityFamily::logistic: {
      const double z = (x - location_) / scale_;
      // 1/(1+e^-z), written to avoid overflow for large |z|.
      if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
      const double e = std::exp(z);
      return e / (1.0 + e);
    }
    case AffinityFamily::normal: {
      const double z = (x - location_) / scale_;
      return 0.5 * std::erfc(-z * kInvSqrt2);
    }
    case AffinityFamily::tabulated: {
      if (x <= knots_.front().first) return 0.0;
      if (x >= knots_.back().first) return 1.0;
      auto hi = std::upper_bound(knots_.begin(), knots_.end(), x,
                                 [](double v, const auto& k) { return v < k.first; });
      auto lo = hi - 1;
      const double t = (x - lo->first) / (hi->first - lo->first);
      return lo->second + t * (hi->second - lo->second);
    }
  }
  return 0.0;
}

double AffinityDistribution::pdf(double x) const {
  switch (family_) {
    case AffinityFamily::logistic: {
      const double c = cdf(x);
      return c * (1.0 - c) / scale_;
    }
    case AffinityFamily::normal: {
      const double z = (x - location_) / scale_;
      return kInvSqrt2Pi * std::exp(-0.5 * z * z) / scale_;
    }
    case AffinityFamily::tabulated: {
      if (x < knots_.front().first || x > knots_.back().first) return 0.0;
      auto hi = std::upper_bound(knots_.begin(), knots_.end(), x,
                                 [](double v, const auto& k) { return v < k.first; });
      if (hi == knots_.begin()) ++hi;
      if (hi == knots_.end()) --hi;  // right endpoint: use the last segment
      auto lo = hi - 1;
      return (hi->second - lo->second) / (hi->first - lo->first);
    }
  }
  return 0.0;
}

double AffinityDistribution::pdf_prime(double x) const {
  switch (family_) {
    case AffinityFamily::logistic: {
      const double c = cdf(x);
      const double p = c * (1.0 - c) / scale_;
      return p * (1.0 - 2.0 * c) / scale_;
    }
    case AffinityFamily::normal: {
      const double z = (x - location_) / scale_;
      return -z / scale_ * pdf(x);
    }
    case AffinityFamily::tabulated:
      return 0.0;
  }
  return 0.0;
}

double AffinityDistribution::pdf_prime2(double x) const {
  switch (family_) {
    case AffinityFamily::logistic: {
      const double c = cdf(x);
      const double p = c * (1.0 - c) / scale_;
      const double m = 1.0 - 2.0 * c;
      return p * (m * m / scale_ - 2.0 * p) / scale_;
    }
    case AffinityFamily::normal: {
      const double z = (x - location_) / scale_;
      return (z * z - 1.0) / (scale_ * scale_) * pdf(x);
    }
    case AffinityFamily::tabulated:
      return 0.0;
  }
  return 0.0;
}

double AffinityDistribution::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) {
    throw ValidationError("affinity quantile requires u in (0, 1)");
  }
  switch (family_) {
    case AffinityFamily::logistic:
      return location_ + scale_ * std::log(u / (1.0 - u));
    case AffinityFamily::normal: {
      boost::math::normal_distribution<double> n(location_, scale_);
      return boost::math::quantile(n, u);
    }
    case AffinityFamily::tabulated: {
      auto hi = std::upper_bound(knots_.begin(), knots_.end(), u,
                                 [](double v, const auto& k) { return v < k.second; });
      if (hi == knots_.begin()) ++hi;
      if (hi == knots_.end()) --hi;
      auto lo = hi - 1;
      const double t = (u - lo->second) / (hi->second - lo->second);
      return lo->first + t * (hi->first - lo->first);
    }
  }
  return 0.0;
}

}  // namespace distopt
