#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "logconc/errors.hpp"
#include "logconc/metrics.hpp"
#include "logconc/pushforward.hpp"
#include "testutil.hpp"

using namespace logconc;

namespace {
Density1D normal(double mean, double sd) {
  return analytic_density("gaussian", {{"mean", mean}, {"sd", sd}});
}
}  // namespace

TEST_CASE("total variation between shifted normals") {
  // int |phi(t) - phi(t-1)| dt = 2 (2 Phi(1/2) - 1).
  double expect = 2.0 * (2.0 * testutil::phi_cdf(0.5) - 1.0);
  CHECK(tv_distance(normal(0, 1), normal(1, 1)) ==
        doctest::Approx(expect).epsilon(1e-6));
  CHECK(tv_distance(normal(0, 1), normal(0, 1)) ==
        doctest::Approx(0.0).epsilon(1e-9));
  // Mutually singular laws: the full mass 2 under this normalization.
  Density1D u1 = analytic_density("uniform", {{"a", 0.0}, {"b", 1.0}});
  Density1D u2 = analytic_density("uniform", {{"a", 2.0}, {"b", 3.0}});
  CHECK(tv_distance(u1, u2) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("cdf distance between shifted laws equals the shift") {
  CHECK(w1_distance(normal(0, 1), normal(1, 1)) ==
        doctest::Approx(1.0).epsilon(1e-6));
  Density1D u1 = analytic_density("uniform", {{"a", 0.0}, {"b", 1.0}});
  Density1D u2 = analytic_density("uniform", {{"a", 2.0}, {"b", 3.0}});
  CHECK(w1_distance(u1, u2) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("bounded-Lipschitz distance against the windowed closed form") {
  // For N(0,1) vs N(0.1,1) the optimal test function ramps with unit slope
  // across a width-2 window centered on the symmetry point, so the value is
  // int_{-0.95}^{1.05} (Phi(t) - Phi(t - 0.1)) dt.
  double oracle = testutil::simpson(
      [](double t) {
        return testutil::phi_cdf(t) - testutil::phi_cdf(t - 0.1);
      },
      -0.95, 1.05, 4000);
  FmResult fm = fm_distance(normal(0, 1), normal(0.1, 1));
  CHECK(std::abs(fm.value - oracle) < 1e-3);
  CHECK(fm.value == doctest::Approx(0.0683).epsilon(0.02));
  CHECK(!fm.coarse_flag);

  // The recovered test function certifies feasibility.
  REQUIRE(fm.grid.size() == fm.phi.size());
  double step = fm.grid[1] - fm.grid[0];
  for (std::size_t i = 0; i < fm.phi.size(); ++i) {
    CHECK(std::abs(fm.phi[i]) <= 1.0 + 1e-9);
    if (i) CHECK(std::abs(fm.phi[i] - fm.phi[i - 1]) <= step * (1.0 + 1e-9));
  }
}

TEST_CASE("bounded-Lipschitz distance of separated uniforms") {
  // Supports [0,1] and [2,3].  The optimal test function holds +1 on
  // [0, 1/2], falls with unit slope to -1 at 5/2 and stays there; with
  // phi(1) = p the objective is 1 + (1-p^2)/2 + (1-(1-p)^2)/2, maximized
  // at p = 1/2 with value 7/4.
  Density1D u1 = analytic_density("uniform", {{"a", 0.0}, {"b", 1.0}});
  Density1D u2 = analytic_density("uniform", {{"a", 2.0}, {"b", 3.0}});
  FmResult fm = fm_distance(u1, u2);
  CHECK(fm.value == doctest::Approx(1.75).epsilon(1e-3));
}

TEST_CASE("distance order on random normal pairs") {
  SeededStream rng(2024, 0);
  for (int k = 0; k < 10; ++k) {
    double m1 = -1.5 + 3.0 * rng.uniform01();
    double m2 = -1.5 + 3.0 * rng.uniform01();
    double s1 = 0.7 + 0.8 * rng.uniform01();
    double s2 = 0.7 + 0.8 * rng.uniform01();
    Density1D a = normal(m1, s1), b = normal(m2, s2);
    double tv = tv_distance(a, b);
    double w1 = w1_distance(a, b);
    double fm = fm_distance(a, b).value;
    CHECK(fm <= tv + 1e-6);
    CHECK(fm <= w1 + 1e-6);
    CHECK(tv <= 2.0 + 1e-9);
  }
}

TEST_CASE("shift modulus") {
  // Exact route: Delta(h) = 2 (2 Phi(h/2) - 1) for the standard normal.
  Density1D n = normal(0, 1);
  for (double h : {0.25, 1.0, 3.0}) {
    double expect = 2.0 * (2.0 * testutil::phi_cdf(h / 2.0) - 1.0);
    CHECK(shift_modulus(n, h) == doctest::Approx(expect).epsilon(1e-6));
  }

  // Histogram route snaps the shift to a grid multiple.
  Density1D hist;
  hist.left = 0.0;
  hist.step = 0.5;
  hist.values = {0.5, 1.0, 0.5, 0.0, 0.0};
  hist.support_lo = 0.0;
  hist.support_hi = 2.0;
  hist.source = "histogram";
  double snapped = 0.0;
  shift_modulus(hist, 0.6, &snapped);
  CHECK(snapped == doctest::Approx(0.5));
}

TEST_CASE("shift-exponent fits on reference laws") {
  BesovFit g = besov_fit(normal(0, 1), 1.0);
  CHECK(std::abs(g.slope - 1.0) < 0.05);
  CHECK(g.seminorm > 0.0);

  BesovFit chi = besov_fit(analytic_density("chi2_1"), 0.5);
  CHECK(std::abs(chi.slope - 0.5) < 0.05);

  BesovFit cube =
      besov_fit(analytic_density("power_image", {{"k", 3.0}}), 1.0 / 3.0);
  CHECK(std::abs(cube.slope - 1.0 / 3.0) < 0.05);

  // Too few usable shifts must be refused, not silently fitted.
  Density1D n = normal(0, 1);
  CHECK_THROWS_AS(besov_fit(n, 0.5, {1e-9, 2e-9, 3e-9}), config_error);
}

TEST_CASE("Lp norms of densities") {
  // ||phi||_2 = (2 sqrt(pi))^{-1/2}.
  double expect = std::pow(2.0 * std::sqrt(testutil::kPi), -0.5);
  CHECK(lp_norm(normal(0, 1), 2.0) == doctest::Approx(expect).epsilon(1e-8));

  Density1D u = analytic_density("uniform", {{"a", 0.0}, {"b", 1.0}});
  CHECK(lp_norm(u, 3.0) == doctest::Approx(1.0).epsilon(1e-9));

  // chi-square with one degree of freedom: finite at p = 1.5, divergent at
  // p = 2 because the endpoint exponent reaches p * 1/2 = 1.
  Density1D chi = analytic_density("chi2_1");
  double p15 = lp_norm(chi, 1.5);
  CHECK(p15 == doctest::Approx(0.988).epsilon(0.01));
  CHECK(std::isinf(lp_norm(chi, 2.0)));
}
