#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "logconc/errors.hpp"
#include "logconc/measure.hpp"
#include "logconc/polynomial.hpp"
#include "testutil.hpp"

using namespace logconc;

namespace {
Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<int>(v.size()));
  int i = 0;
  for (double t : v) x[i++] = t;
  return x;
}
}  // namespace

TEST_CASE("parsing and evaluation") {
  Polynomial f = Polynomial::parse("x1^2");
  CHECK(f.degree() == 2);
  CHECK(f.dimension() == 1);
  CHECK(f(vec({3.0})) == doctest::Approx(9.0));

  Polynomial g = Polynomial::parse("3*x1*x2 - 0.5*x3^4 + 1");
  CHECK(g.degree() == 4);
  CHECK(g.dimension() == 3);
  CHECK(g(vec({1.0, 2.0, 1.0})) == doctest::Approx(3.0 * 2.0 - 0.5 + 1.0));

  Polynomial h = Polynomial::parse("-x1 + 2.5");
  CHECK(h(vec({4.0})) == doctest::Approx(-1.5));

  CHECK(Polynomial::parse("0").is_zero());
  CHECK(Polynomial::parse("x1 - x1").is_zero());
}

TEST_CASE("text round trip is exact") {
  for (const char* s : {"x1^2", "3*x1*x2 - 0.5*x3^4 + 1", "-x1 + 2.5",
                        "0.1*x1^3", "x2^5 - x1"}) {
    Polynomial f = Polynomial::parse(s);
    CHECK(Polynomial::parse(f.to_string()) == f);
  }
  // Coefficients that do not have short decimal forms survive as well.
  Polynomial f = Polynomial::constant(1.0 / 3.0) * Polynomial::variable(1);
  CHECK(Polynomial::parse(f.to_string()) == f);
}

TEST_CASE("parse errors carry the offending position") {
  CHECK_THROWS_AS(Polynomial::parse("x0"), parse_error);
  CHECK_THROWS_AS(Polynomial::parse("x1^-2"), parse_error);
  CHECK_THROWS_AS(Polynomial::parse("x1 +"), parse_error);
  CHECK_THROWS_AS(Polynomial::parse("y1"), parse_error);
  try {
    Polynomial::parse("x1 + @");
    CHECK(false);
  } catch (const parse_error& e) {
    CHECK(e.position == 5);
  }
}

TEST_CASE("gradient matches central differences") {
  Polynomial g = Polynomial::parse("3*x1*x2 - 0.5*x3^4 + x1^3");
  Eigen::VectorXd x = vec({0.7, -1.2, 0.4});
  Eigen::VectorXd grad = g.gradient(x);
  const double h = 1e-6;
  for (int i = 0; i < 3; ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    double fd = (g(xp) - g(xm)) / (2.0 * h);
    CHECK(grad[i] == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("directional derivative as a polynomial") {
  Polynomial g = Polynomial::parse("x1^2*x2 + x2^3");
  Eigen::VectorXd e = vec({0.6, 0.8});
  Polynomial de = g.directional(e);
  Eigen::VectorXd x = vec({1.3, -0.4});
  CHECK(de(x) == doctest::Approx(g.gradient(x).dot(e)).epsilon(1e-12));
}

TEST_CASE("affine substitution") {
  Polynomial f = Polynomial::parse("x1^2 - x2");
  Eigen::MatrixXd A(2, 2);
  A << 2.0, 1.0, 0.0, -1.0;
  Eigen::VectorXd b = vec({0.5, 2.0});
  Polynomial g = f.substitute_affine(A, b);
  Eigen::VectorXd y = vec({0.3, -0.7});
  CHECK(g(y) == doctest::Approx(f(A * y + b)).epsilon(1e-12));
}

TEST_CASE("arithmetic") {
  Polynomial a = Polynomial::parse("x1 + 1");
  Polynomial b = Polynomial::parse("x1 - 1");
  CHECK((a * b) == Polynomial::parse("x1^2 - 1"));
  CHECK((a + b) == Polynomial::parse("2*x1"));
  CHECK((a - b) == Polynomial::constant(2.0));
  CHECK((a * 3.0)(vec({1.0})) == doctest::Approx(6.0));
}

TEST_CASE("moments of gaussian images") {
  LogConcaveMeasure m = LogConcaveMeasure::standard_gaussian(1);
  PolyMomentOptions opts;
  opts.samples = 100000;
  opts.stream = SeededStream(11, 0);

  Polynomial f = Polynomial::parse("x1^2");
  PolyMoments pm = poly_moments(f, m, opts);
  CHECK(pm.analytic_mean_var);  // degree <= 2 under a gaussian base
  CHECK(pm.mean == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(pm.variance == doctest::Approx(2.0).epsilon(1e-9));
  // E|x^2 - 1| = 4 phi(1) for a standard normal.
  CHECK(pm.frac_defined);
  CHECK(std::abs(pm.frac_moment - 4.0 * testutil::phi_pdf(1.0)) <
        5.0 * std::max(pm.frac_moment_se, 1e-3));

  Polynomial id = Polynomial::parse("x1");
  PolyMoments pid = poly_moments(id, m, opts);
  CHECK(std::abs(pid.mean) < 5.0 * std::max(pid.mean_se, 1e-3));
  CHECK(pid.q_norms.at(2.0) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(pid.q_norms.at(1.0) ==
        doctest::Approx(std::sqrt(2.0 / testutil::kPi)).epsilon(0.02));
  // q-norms are nondecreasing in q.
  double prev = 0.0;
  for (const auto& [q, nq] : pid.q_norms) {
    if (q == 0.0) continue;
    CHECK(nq >= prev - 1e-12);
    prev = nq;
  }
  CHECK(pid.q0_defined);
  // Near-zeros of x under the standard normal: about 2 phi(0) of the
  // relative band width used by the zero counter.
  CHECK(pid.zero_fraction < 1e-3);
}
