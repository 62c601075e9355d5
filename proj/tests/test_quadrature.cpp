#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "logconc/quadrature.hpp"
#include "testutil.hpp"

using namespace logconc;

TEST_CASE("plain integrals") {
  CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0, 1e-12) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(integrate([](double x) { return std::sin(x); }, 0.0, testutil::kPi,
                  1e-12) == doctest::Approx(2.0).epsilon(1e-11));
  double g = integrate([](double x) { return testutil::phi_pdf(x); }, -10.0,
                       10.0, 1e-12);
  CHECK(g == doctest::Approx(std::erf(10.0 / std::sqrt(2.0))).epsilon(1e-12));
}

TEST_CASE("localized mass on a long interval") {
  // A standard gaussian integrated over a domain 2460 half-widths wide: the
  // initial scan still has to find the bump and refine it to full accuracy.
  double v = integrate([](double x) { return testutil::phi_pdf(x); }, -2460.0,
                       2460.0, 1e-10);
  CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("explicit breakpoints recover features the scan cannot see") {
  // Width-0.002 triangular bump; invisible to a uniform scan of the full
  // interval, exact once its breakpoints are declared.
  auto bump = [](double x) {
    double d = std::abs(x - 0.613);
    return d < 0.001 ? (0.001 - d) * 1e6 : 0.0;
  };
  double v = integrate_split(bump, -2000.0, 2000.0,
                             {0.612, 0.613, 0.614}, 1e-10);
  CHECK(v == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("endpoint power singularities") {
  // int_0^1 t^{-1/2} dt = 2.
  double a = integrate_power_left([](double t) { return 1.0 / std::sqrt(t); },
                                  0.0, 1.0, 0.5, 1e-10);
  CHECK(a == doctest::Approx(2.0).epsilon(1e-9));
  // int_0^1 (1-t)^{-1/3} dt = 3/2.
  double b = integrate_power_right(
      [](double t) { return std::pow(1.0 - t, -1.0 / 3.0); }, 0.0, 1.0,
      1.0 / 3.0, 1e-10);
  CHECK(b == doctest::Approx(1.5).epsilon(1e-9));
  CHECK_THROWS_AS(integrate_power_left([](double) { return 1.0; }, 0.0, 1.0,
                                       1.5, 1e-9),
                  std::invalid_argument);
}

TEST_CASE("right-anchored singularity far from the origin") {
  // int_a^b (b-t)^{-1/2} dt = 2 sqrt(b-a).  The integrand itself rounds
  // b - t to zero within an ulp of b, which caps the reachable accuracy
  // near the endpoint; anything worse than ~1e-8 here means the
  // substitution is losing the distance to the singularity as well.
  const double a = -2460.0, b = 2460.0;
  double v = integrate_power_right(
      [&](double t) { return 1.0 / std::sqrt(b - t); }, a, b, 0.5, 1e-10);
  CHECK(v == doctest::Approx(2.0 * std::sqrt(b - a)).epsilon(1e-8));
}

TEST_CASE("interior singular points") {
  // int_0^1 t^{-1/2} (1-t)^{-1/2} dt = pi, singular at both ends.
  auto f = [](double t) { return 1.0 / std::sqrt(t * (1.0 - t)); };
  double v = integrate_singular(f, 0.0, 1.0, {{0.0, 0.5}, {1.0, 0.5}}, 1e-10);
  CHECK(v == doctest::Approx(testutil::kPi).epsilon(1e-8));

  // |t - 0.3|^{-1/2} has an interior singularity.
  auto g = [](double t) { return std::pow(std::abs(t - 0.3), -0.5); };
  double w = integrate_singular(g, 0.0, 1.0, {{0.3, 0.5}}, 1e-10);
  CHECK(w == doctest::Approx(2.0 * std::sqrt(0.3) + 2.0 * std::sqrt(0.7))
                .epsilon(1e-8));
}

TEST_CASE("recursive panel variant agrees") {
  double v = adaptive_simpson([](double x) { return std::exp(-x); }, 0.0, 5.0,
                              1e-10, 40);
  CHECK(v == doctest::Approx(1.0 - std::exp(-5.0)).epsilon(1e-9));
}

TEST_CASE("box quadrature in two dimensions") {
  Eigen::VectorXd lo(2), hi(2);
  lo << -8.0, -8.0;
  hi << 8.0, 8.0;
  auto f = [](const Eigen::VectorXd& x) {
    return testutil::phi_pdf(x[0]) * testutil::phi_pdf(x[1]);
  };
  CHECK(integrate_box(f, lo, hi, 1e-8) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("maximum search") {
  auto f = [](double x) { return -(x - 1.3) * (x - 1.3); };
  CHECK(golden_max(f, -4.0, 4.0, 1e-10) == doctest::Approx(1.3).epsilon(1e-7));

  double arg = 0.0;
  double m = line_max([](double x) { return testutil::phi_pdf(x - 0.4); },
                      -6.0, 6.0, 64, &arg);
  CHECK(m == doctest::Approx(testutil::phi_pdf(0.0)).epsilon(1e-8));
  CHECK(arg == doctest::Approx(0.4).epsilon(1e-5));

  Bracket br = bracket_max([](double x) { return -x * x; }, 3.0, 0.5, -100.0,
                           100.0);
  CHECK(br.lo <= 0.0);
  CHECK(br.hi >= 0.0);
}

TEST_CASE("boundary bisection") {
  double r = bisect_boundary([](double t) { return t * t < 2.0; }, 0.0, 10.0,
                             1e-12);
  CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
}
