#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "logconc/errors.hpp"
#include "logconc/measure.hpp"
#include "logconc/polynomial.hpp"
#include "logconc/verifier.hpp"
#include "testutil.hpp"

using namespace logconc;

namespace {
VerifyOptions quad_opts() {
  VerifyOptions o;
  o.engine = Engine::Quadrature;
  o.seed = 42;
  return o;
}
}  // namespace

TEST_CASE("steep-test-function growth for the squared normal") {
  Polynomial f = Polynomial::parse("x1^2");
  LogConcaveMeasure g = LogConcaveMeasure::standard_gaussian(1);
  InequalityReport rep = check_malliavin(f, g, 2, {}, {}, quad_opts());
  CHECK(rep.pass);
  CHECK(rep.engine == "quadrature");
  CHECK(std::abs(rep.slope - 0.5) < 0.05);
  CHECK(rep.constant > 0.0);
  CHECK(rep.series.at("M").size() == rep.series.at("growth").size());
  CHECK(!rep.criterion.empty());
}

TEST_CASE("the growth statistic is invariant under affine reparametrization") {
  // (y/2)^2 under N(0, 4) is the same law as x^2 under N(0, 1), so every
  // reported number must match exactly.
  LogConcaveMeasure g1 = LogConcaveMeasure::standard_gaussian(1);
  Eigen::VectorXd mu(1);
  mu << 0.0;
  Eigen::MatrixXd cov(1, 1);
  cov << 4.0;
  LogConcaveMeasure g4 = LogConcaveMeasure::gaussian(mu, cov);

  InequalityReport a =
      check_malliavin(Polynomial::parse("x1^2"), g1, 2, {}, {}, quad_opts());
  InequalityReport b =
      check_malliavin(Polynomial::parse("0.25*x1^2"), g4, 2, {}, {},
                      quad_opts());
  CHECK(b.constant == doctest::Approx(a.constant).epsilon(1e-6));
  CHECK(b.slope == doctest::Approx(a.slope).epsilon(1e-6));

  // Rescaling f itself only shifts the probed slopes along the grid; the
  // normalized constant moves very little.
  InequalityReport c =
      check_malliavin(Polynomial::parse("2*x1^2"), g1, 2, {}, {}, quad_opts());
  CHECK(std::abs(c.constant - a.constant) / a.constant < 0.10);
}

TEST_CASE("shift modulus of the identity image") {
  Polynomial f = Polynomial::parse("x1");
  LogConcaveMeasure g = LogConcaveMeasure::standard_gaussian(1);
  InequalityReport rep = check_shift_tv(f, g, 1, {}, 0.0, 128.0, quad_opts());
  CHECK(rep.pass);
  CHECK(std::abs(rep.slope - 1.0) < 0.01);
  // sup_h Delta(h)/h for the standard normal is 2 phi(0) = sqrt(2/pi).
  CHECK(rep.constant ==
        doctest::Approx(std::sqrt(2.0 / testutil::kPi)).epsilon(1e-3));
}

TEST_CASE("small-ball exponents and a closed-form spot value") {
  LogConcaveMeasure g = LogConcaveMeasure::standard_gaussian(1);
  InequalityReport rep =
      check_small_ball(Polynomial::parse("x1^2"), g, 2, {}, quad_opts());
  CHECK(rep.pass);
  CHECK(std::abs(rep.slope - 0.5) < 0.05);

  // mu(|x^2| <= 0.01) = 2 Phi(0.1) - 1.
  const auto& ts = rep.series.at("t");
  const auto& ps = rep.series.at("prob");
  bool found = false;
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (std::abs(ts[i] - 0.01) < 1e-12) {
      CHECK(ps[i] == doctest::Approx(2.0 * testutil::phi_cdf(0.1) - 1.0)
                         .epsilon(1e-6));
      found = true;
    }
  CHECK(found);
}

TEST_CASE("variance ratio for exact polynomials") {
  LogConcaveMeasure g = LogConcaveMeasure::standard_gaussian(1);
  InequalityReport r1 =
      check_poincare(Polynomial::parse("x1"), g, quad_opts());
  CHECK(r1.pass);
  CHECK(r1.constant == doctest::Approx(1.0).epsilon(1e-9));

  LogConcaveMeasure g2 = LogConcaveMeasure::standard_gaussian(2);
  VerifyOptions o;  // analytic moments: engine resolution is internal
  o.seed = 42;
  InequalityReport r2 =
      check_poincare(Polynomial::parse("x1 + x2"), g2, o);
  CHECK(r2.pass);
  CHECK(r2.constant == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("distance chain for nearby quadratic images") {
  LogConcaveMeasure g = LogConcaveMeasure::standard_gaussian(1);
  InequalityReport rep =
      check_tv_fm(Polynomial::parse("x1^2"),
                  Polynomial::parse("x1^2 + 0.1*x1"), g, 2, quad_opts());
  CHECK(rep.pass);
  CHECK(rep.scalars.at("ratio") <= 1.0 + 1e-9);
  CHECK(rep.scalars.at("tv") > 0.0);
  CHECK(rep.scalars.at("fm") > 0.0);
}

TEST_CASE("density norm bound for the squared normal") {
  LogConcaveMeasure g = LogConcaveMeasure::standard_gaussian(1);
  InequalityReport rep = check_lp_density(Polynomial::parse("x1^2"), g, 2,
                                          1.5, 0.0, quad_opts());
  CHECK(rep.pass);
  // sigma^{1-1/p} ||rho||_p with sigma = sqrt(2): frozen spot value.
  CHECK(rep.scalars.at("lhs") == doctest::Approx(1.1088).epsilon(0.02));
  CHECK(rep.scalars.at("lhs") <= rep.scalars.at("rhs"));

  // p beyond d/(d-1) is a configuration error, matching the divergence of
  // the constant and of the norm itself.
  CHECK_THROWS_AS(check_lp_density(Polynomial::parse("x1^2"), g, 2, 2.0, 0.0,
                                   quad_opts()),
                  config_error);
}

TEST_CASE("moment growth of gaussian images") {
  LogConcaveMeasure g = LogConcaveMeasure::standard_gaussian(1);
  VerifyOptions o;
  o.samples = 50000;
  o.seed = 42;
  InequalityReport rep =
      check_moment_growth(Polynomial::parse("x1"), g, 1, {}, o);
  CHECK(rep.pass);
  CHECK(rep.constant == doctest::Approx(1.505).epsilon(0.05));
}

TEST_CASE("level-set geometry of the standard normal line") {
  LogConcaveMeasure g = LogConcaveMeasure::standard_gaussian(1);
  VerifyOptions o;
  o.seed = 42;
  InequalityReport rep = check_geometry(g, {0.5, 1.0, 2.0}, o);
  CHECK(rep.pass);
  const auto& taus = rep.series.at("tau");
  const auto& prods = rep.series.at("volume_product");
  for (std::size_t i = 0; i < taus.size(); ++i) {
    CHECK(prods[i] >= 1.0 - 1e-9);
    if (std::abs(taus[i] - 1.0) < 1e-12)
      CHECK(prods[i] == doctest::Approx(1.5436).epsilon(1e-3));
  }
}

TEST_CASE("suite registry") {
  auto ids = suite_ids();
  for (const char* want :
       {"thm4.1", "cor5.1", "cor5.2", "cor5.3", "cor5.4", "cw", "moments",
        "poincare", "geometry", "all"})
    CHECK(std::find(ids.begin(), ids.end(), want) != ids.end());

  SuiteSpec spec;
  spec.id = "cw";
  VerifyOptions o;
  o.seed = 42;
  auto reports = run_suite(spec, o);
  CHECK(reports.size() == 4);
  for (const auto& r : reports) CHECK(r.pass);

  spec.id = "nonsense";
  CHECK_THROWS_AS(run_suite(spec, o), config_error);
}

TEST_CASE("engine resolution refuses impossible requests") {
  // Exact image densities need a one-dimensional normalized base, so an
  // explicit quadrature engine on a 2D base must be rejected.
  LogConcaveMeasure g2 = LogConcaveMeasure::standard_gaussian(2);
  CHECK_THROWS_AS(check_malliavin(Polynomial::parse("x1*x2"), g2, 2, {}, {},
                                  quad_opts()),
                  config_error);
}

TEST_CASE("degenerate images are reported as such") {
  LogConcaveMeasure g = LogConcaveMeasure::standard_gaussian(1);
  CHECK_THROWS_AS(check_shift_tv(Polynomial::constant(2.0), g, 1, {}, 0.0,
                                 128.0, quad_opts()),
                  std::runtime_error);
  CHECK_THROWS_AS(check_malliavin(Polynomial::parse("x1^2"), g, 0, {}, {},
                                  quad_opts()),
                  config_error);
}
