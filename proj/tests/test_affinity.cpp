#include <cmath>

#include <doctest.h>

#include <distopt/affinity.hpp>
#include <distopt/common.hpp>

using distopt::AffinityDistribution;
using distopt::AffinityFamily;
using distopt::ValidationError;

namespace {

// Central finite differences of the cdf/pdf, for checking the analytic
// density derivatives.
double fd1(const AffinityDistribution& d, double x, double h = 1e-5) {
  return (d.cdf(x + h) - d.cdf(x - h)) / (2 * h);
}
double fd_pdf1(const AffinityDistribution& d, double x, double h = 1e-5) {
  return (d.pdf(x + h) - d.pdf(x - h)) / (2 * h);
}
double fd_pdf2(const AffinityDistribution& d, double x, double h = 1e-4) {
  return (d.pdf(x + h) - 2 * d.pdf(x) + d.pdf(x - h)) / (h * h);
}

}  // namespace

TEST_SUITE("affinity") {

TEST_CASE("logistic cdf and density") {
  auto d = AffinityDistribution::logistic(0.3, 0.8);
  CHECK(d.cdf(0.3) == doctest::Approx(0.5));
  // Standard logistic at z = (x - loc)/scale.
  CHECK(d.cdf(1.1) == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
  // Far tails stay ordered and bounded; past z ~ 36 the upper tail is below
  // machine epsilon and rounds to exactly one, which is fine.
  CHECK(d.cdf(-40.0) > 0.0);
  CHECK(d.cdf(20.0) < 1.0);
  CHECK(d.cdf(40.0) <= 1.0);
  CHECK(d.cdf(20.0) < d.cdf(40.0) + 1e-12);

  for (double x : {-1.5, -0.2, 0.3, 0.9, 2.4}) {
    CHECK(d.pdf(x) == doctest::Approx(fd1(d, x)).epsilon(1e-6));
    CHECK(d.pdf_prime(x) == doctest::Approx(fd_pdf1(d, x)).epsilon(1e-6));
    CHECK(d.pdf_prime2(x) == doctest::Approx(fd_pdf2(d, x)).epsilon(1e-4));
  }
  // pdf = F(1-F)/s identity.
  double f = d.cdf(0.9);
  CHECK(d.pdf(0.9) == doctest::Approx(f * (1 - f) / 0.8));
}

TEST_CASE("normal cdf and density") {
  auto d = AffinityDistribution::normal(-0.5, 1.3);
  CHECK(d.cdf(-0.5) == doctest::Approx(0.5));
  CHECK(d.pdf(-0.5) == doctest::Approx(1.0 / (1.3 * std::sqrt(2 * M_PI))));
  for (double x : {-2.0, -0.5, 0.4, 1.7}) {
    CHECK(d.pdf(x) == doctest::Approx(fd1(d, x)).epsilon(1e-6));
    CHECK(d.pdf_prime(x) == doctest::Approx(fd_pdf1(d, x)).epsilon(1e-6));
    CHECK(d.pdf_prime2(x) == doctest::Approx(fd_pdf2(d, x)).epsilon(1e-4));
  }
}

TEST_CASE("quantile inverts the cdf") {
  for (auto d : {AffinityDistribution::logistic(0.1, 0.6),
                 AffinityDistribution::normal(0.4, 2.0)}) {
    for (double u : {0.01, 0.25, 0.5, 0.77, 0.99}) {
      CHECK(d.cdf(d.quantile(u)) == doctest::Approx(u).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS((void)AffinityDistribution::normal(0, 1).quantile(0.0), ValidationError);
  CHECK_THROWS_AS((void)AffinityDistribution::normal(0, 1).quantile(1.0), ValidationError);
}

TEST_CASE("tabulated distribution interpolates its knots") {
  auto d = AffinityDistribution::tabulated({{-1.0, 0.0}, {0.0, 0.4}, {2.0, 1.0}});
  CHECK(d.family() == AffinityFamily::tabulated);
  CHECK(d.cdf(-1.0) == doctest::Approx(0.0));
  CHECK(d.cdf(-0.5) == doctest::Approx(0.2));
  CHECK(d.cdf(0.0) == doctest::Approx(0.4));
  CHECK(d.cdf(1.0) == doctest::Approx(0.7));
  CHECK(d.cdf(2.0) == doctest::Approx(1.0));
  // Outside the support the cdf saturates and the density vanishes.
  CHECK(d.cdf(-3.0) == 0.0);
  CHECK(d.cdf(3.0) == 1.0);
  CHECK(d.pdf(-3.0) == 0.0);
  CHECK(d.pdf(3.0) == 0.0);
  // Piecewise-constant density, zero slope.
  CHECK(d.pdf(-0.5) == doctest::Approx(0.4));
  CHECK(d.pdf(1.0) == doctest::Approx(0.3));
  CHECK(d.pdf_prime(0.7) == 0.0);
  CHECK(d.pdf_prime2(0.7) == 0.0);
  CHECK(d.quantile(0.7) == doctest::Approx(1.0));
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS((void)AffinityDistribution::logistic(0.0, 0.0), ValidationError);
  CHECK_THROWS_AS((void)AffinityDistribution::normal(0.0, -1.0), ValidationError);
  CHECK_THROWS_AS((void)AffinityDistribution::tabulated({{0.0, 0.0}}), ValidationError);
  CHECK_THROWS_AS((void)AffinityDistribution::tabulated({{0.0, 0.0}, {0.0, 1.0}}),
                  ValidationError);
  CHECK_THROWS_AS((void)AffinityDistribution::tabulated({{0.0, 0.5}, {1.0, 1.0}}),
                  ValidationError);
  CHECK_THROWS_AS((void)AffinityDistribution::tabulated({{0.0, 0.0}, {1.0, 0.9}}),
                  ValidationError);
}

TEST_CASE("family names round-trip") {
  for (auto f : {AffinityFamily::logistic, AffinityFamily::normal, AffinityFamily::tabulated}) {
    CHECK(distopt::parse_affinity_family(distopt::affinity_family_name(f)) == f);
  }
  CHECK_THROWS_AS((void)distopt::parse_affinity_family("cauchy"), ValidationError);
}

}  // TEST_SUITE
