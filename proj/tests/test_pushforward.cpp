#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "logconc/errors.hpp"
#include "logconc/measure.hpp"
#include "logconc/polynomial.hpp"
#include "logconc/pushforward.hpp"
#include "testutil.hpp"

using namespace logconc;

namespace {
bool has_singularity(const Density1D& d, double where, double power) {
  for (std::size_t i = 0; i < d.singular_points.size(); ++i)
    if (std::abs(d.singular_points[i] - where) < 1e-9 &&
        std::abs(d.singular_powers[i] - power) < 1e-9)
      return true;
  return false;
}
}  // namespace

TEST_CASE("empirical sample basics") {
  EmpiricalSample1D s = EmpiricalSample1D::from({3.0, 1.0, 2.0, 4.0});
  CHECK(std::is_sorted(s.values.begin(), s.values.end()));
  CHECK(s.count() == 4);
  CHECK(s.mean() == doctest::Approx(2.5));
  CHECK(s.quantile(0.0) == doctest::Approx(1.0));
  CHECK(s.quantile(1.0) == doctest::Approx(4.0));
  CHECK(s.quantile(0.5) == doctest::Approx(2.5));
}

TEST_CASE("square of a standard normal") {
  Polynomial f = Polynomial::parse("x1^2");
  LogConcaveMeasure g = LogConcaveMeasure::standard_gaussian(1);
  Density1D d = image_density_1d(f, g);

  REQUIRE(d.exact);
  for (double t : {0.01, 0.25, 1.0, 4.0, 9.0}) {
    double truth = testutil::phi_pdf(std::sqrt(t)) / std::sqrt(t);
    CHECK(d.exact(t) == doctest::Approx(truth).epsilon(1e-10));
  }
  CHECK(has_singularity(d, 0.0, 0.5));
  CHECK(d.mass() == doctest::Approx(1.0).epsilon(1e-8));
  // P(x^2 <= 1) = 2 Phi(1) - 1.
  CHECK(d.cdf(1.0) ==
        doctest::Approx(2.0 * testutil::phi_cdf(1.0) - 1.0).epsilon(1e-8));
  double q = d.quantile(0.5);
  CHECK(d.cdf(q) == doctest::Approx(0.5).epsilon(1e-7));
}

TEST_CASE("odd powers keep the normal cdf at matching quantiles") {
  LogConcaveMeasure g = LogConcaveMeasure::standard_gaussian(1);

  Density1D c3 = image_density_1d(Polynomial::parse("x1^3"), g);
  REQUIRE(c3.exact);
  // rho(t) = phi(t^{1/3}) / (3 t^{2/3}).
  double t = 0.7;
  double truth = testutil::phi_pdf(std::cbrt(t)) /
                 (3.0 * std::pow(t, 2.0 / 3.0));
  CHECK(c3.exact(t) == doctest::Approx(truth).epsilon(1e-10));
  CHECK(has_singularity(c3, 0.0, 2.0 / 3.0));
  CHECK(c3.mass() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(c3.cdf(1.0) == doctest::Approx(testutil::phi_cdf(1.0)).epsilon(1e-8));
  CHECK(c3.cdf(-1.0) ==
        doctest::Approx(testutil::phi_cdf(-1.0)).epsilon(1e-8));

  Density1D c4 = image_density_1d(Polynomial::parse("x1^4"), g);
  CHECK(has_singularity(c4, 0.0, 0.75));
  CHECK(c4.mass() == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("interior critical values become square-root folds") {
  // f = x^3 - 3x has critical values +/-2 at x = -/+1.
  Polynomial f = Polynomial::parse("x1^3 - 3*x1");
  LogConcaveMeasure g = LogConcaveMeasure::standard_gaussian(1);
  Density1D d = image_density_1d(f, g);
  CHECK(has_singularity(d, 2.0, 0.5));
  CHECK(has_singularity(d, -2.0, 0.5));
  CHECK(d.mass() == doctest::Approx(1.0).epsilon(1e-7));
  // Odd polynomial of a symmetric law: median at zero.
  CHECK(d.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-8));
  // Inside the fold region three branches contribute.
  double t = 1.0;
  // Roots of x^3 - 3x = 1 solved independently by Newton from 3 starts.
  double total = 0.0;
  for (double x0 : {-1.6, -0.4, 1.9}) {
    double x = x0;
    for (int it = 0; it < 60; ++it)
      x -= (x * x * x - 3.0 * x - t) / (3.0 * x * x - 3.0);
    total += testutil::phi_pdf(x) / std::abs(3.0 * x * x - 3.0);
  }
  CHECK(d.exact(t) == doctest::Approx(total).epsilon(1e-9));
}

TEST_CASE("bounded supports produce boundary splits") {
  // x^2 on the uniform law over [-1, 1]: density (2 sqrt t)^{-1} on (0, 1].
  Polynomial f = Polynomial::parse("x1^2");
  LogConcaveMeasure box = LogConcaveMeasure::uniform_cube(1, 2.0);
  Density1D d = image_density_1d(f, box);
  REQUIRE(d.exact);
  CHECK(d.exact(0.25) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(has_singularity(d, 0.0, 0.5));
  // The image support ends at 1 with a jump; it must appear as a split.
  bool split_at_one = false;
  for (double s : d.singular_points)
    if (std::abs(s - 1.0) < 1e-9) split_at_one = true;
  CHECK(split_at_one);
  CHECK(d.mass() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(d.cdf(0.25) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("histogram estimation from samples") {
  LogConcaveMeasure g = LogConcaveMeasure::standard_gaussian(1);
  SamplerOptions o;
  o.stream = SeededStream(21, 0);
  EmpiricalSample1D s =
      image_sample(Polynomial::parse("x1"), g, 200000, o);
  Density1D hist = estimate_density(s);
  CHECK(hist.source == "histogram");
  CHECK(!hist.exact);
  CHECK(hist.mass() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(hist.head_mass > 0.0);  // trimmed tails are bookkept, not lost

  // Pointwise agreement with the true density at moderate points.
  for (double t : {-1.0, 0.0, 0.5, 1.5})
    CHECK(std::abs(hist.value_at(t) - testutil::phi_pdf(t)) < 0.02);

  CHECK_THROWS_AS(estimate_density(EmpiricalSample1D::from({1.0, 2.0})),
                  config_error);
}

TEST_CASE("image samples are the polynomial applied to base draws") {
  LogConcaveMeasure g = LogConcaveMeasure::standard_gaussian(2);
  Polynomial f = Polynomial::parse("x1*x2");
  SamplerOptions o;
  o.stream = SeededStream(33, 0);
  SampleResult base = sample(g, 1000, o);
  EmpiricalSample1D img = image_sample(f, g, 1000, o);
  std::vector<double> expect;
  for (int i = 0; i < 1000; ++i)
    expect.push_back(base.points(i, 0) * base.points(i, 1));
  std::sort(expect.begin(), expect.end());
  REQUIRE(img.count() == 1000);
  for (int i = 0; i < 1000; ++i) CHECK(img.values[i] == expect[i]);
}

TEST_CASE("closed-form reference densities") {
  Density1D n01 = analytic_density("gaussian", {{"mean", 0.0}, {"sd", 1.0}});
  CHECK(n01.exact(0.3) == doctest::Approx(testutil::phi_pdf(0.3)));
  CHECK(n01.mass() == doctest::Approx(1.0).epsilon(1e-9));

  Density1D u = analytic_density("uniform", {{"a", 2.0}, {"b", 3.0}});
  CHECK(u.exact(2.5) == doctest::Approx(1.0));
  CHECK(u.value_at(1.0) == 0.0);
  CHECK(u.mass() == doctest::Approx(1.0).epsilon(1e-12));

  Density1D chi = analytic_density("chi2_1");
  CHECK(chi.exact(0.49) ==
        doctest::Approx(testutil::phi_pdf(0.7) / 0.7).epsilon(1e-12));
  // Mass splits between the grid window and the head/tail bookkeeping.
  CHECK(chi.mass() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(chi.head_mass > 0.0);

  Density1D p3 = analytic_density("power_image", {{"k", 3.0}});
  CHECK(p3.cdf(1.0) == doctest::Approx(testutil::phi_cdf(1.0)).epsilon(1e-8));

  CHECK_THROWS_AS(analytic_density("no_such_oracle", {}), config_error);
}

TEST_CASE("grid interpolation and support clipping") {
  Density1D d;
  d.left = 0.0;
  d.step = 1.0;
  d.values = {0.0, 1.0, 0.0};
  d.support_lo = 0.0;
  d.support_hi = 2.0;
  d.source = "histogram";
  CHECK(d.value_at(0.5) == doctest::Approx(0.5));
  CHECK(d.value_at(1.25) == doctest::Approx(0.75));
  CHECK(d.value_at(-0.1) == 0.0);
  CHECK(d.value_at(2.1) == 0.0);
  CHECK(d.mass() == doctest::Approx(1.0));  // trapezoid
  CHECK(integrate_density(d, 0.0, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("degenerate images are rejected") {
  LogConcaveMeasure g = LogConcaveMeasure::standard_gaussian(1);
  CHECK_THROWS_AS(image_density_1d(Polynomial::constant(3.0), g),
                  config_error);
  LogConcaveMeasure g2 = LogConcaveMeasure::standard_gaussian(2);
  // The exact image density requires a one-dimensional base.
  CHECK_THROWS_AS(image_density_1d(Polynomial::parse("x1"), g2),
                  config_error);
}
