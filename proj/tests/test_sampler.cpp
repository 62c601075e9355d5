#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "logconc/errors.hpp"
#include "logconc/measure.hpp"
#include "logconc/rng.hpp"
#include "logconc/sampler.hpp"
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

TEST_CASE("seeded streams are reproducible and independent") {
  SeededStream a(42, 3), b(42, 3), c(42, 4);
  for (int i = 0; i < 100; ++i) {
    double ua = a.uniform01(), ub = b.uniform01();
    CHECK(ua == ub);
    CHECK(ua >= 0.0);
    CHECK(ua < 1.0);
  }
  // A different index decorrelates immediately.
  bool all_equal = true;
  SeededStream a2(42, 3);
  for (int i = 0; i < 16; ++i)
    if (a2.uniform01() != c.uniform01()) all_equal = false;
  CHECK(!all_equal);

  SeededStream s1 = SeededStream(7, 0).substream(5);
  SeededStream s2 = SeededStream(7, 0).substream(5);
  CHECK(s1.uniform01() == s2.uniform01());
}

TEST_CASE("direct gaussian sampling: worker invariance and moments") {
  LogConcaveMeasure g = LogConcaveMeasure::standard_gaussian(3);
  SamplerOptions o1;
  o1.stream = SeededStream(9, 0);
  o1.workers = 1;
  SamplerOptions o8 = o1;
  o8.workers = 8;

  SampleResult r1 = sample(g, 20000, o1);
  SampleResult r8 = sample(g, 20000, o8);
  CHECK(r1.method == "direct");
  CHECK(r1.points.rows() == 20000);
  CHECK(r1.points.cols() == 3);
  CHECK(r1.points == r8.points);  // bit-exact, not just statistically equal

  Eigen::VectorXd mean = r1.points.colwise().mean();
  CHECK(mean.norm() < 5.0 / std::sqrt(20000.0) * std::sqrt(3.0));
  Eigen::MatrixXd centered = r1.points.rowwise() - mean.transpose();
  Eigen::MatrixXd cov =
      centered.transpose() * centered / (r1.points.rows() - 1.0);
  CHECK((cov - Eigen::MatrixXd::Identity(3, 3)).norm() < 0.08);
}

TEST_CASE("uniform ball points stay inside and spread evenly") {
  LogConcaveMeasure ball =
      LogConcaveMeasure::uniform_ball(2, vec({0.0, 0.0}), 1.0);
  SamplerOptions o;
  o.stream = SeededStream(10, 0);
  SampleResult r = sample(ball, 40000, o);
  int quadrant = 0;
  for (int i = 0; i < r.points.rows(); ++i) {
    CHECK(r.points.row(i).norm() <= 1.0 + 1e-12);
    if (r.points(i, 0) > 0 && r.points(i, 1) > 0) ++quadrant;
  }
  // Binomial(40000, 1/4): five sigma is about 433.
  CHECK(std::abs(quadrant - 10000) < 450);
  // Mass of the half-radius disc is 1/4 as well.
  int inner = 0;
  for (int i = 0; i < r.points.rows(); ++i)
    if (r.points.row(i).norm() < 0.5) ++inner;
  CHECK(std::abs(inner - 10000) < 450);
}

TEST_CASE("two-sided exponential moments") {
  LogConcaveMeasure pe =
      LogConcaveMeasure::product_exponential(vec({2.0}));
  SamplerOptions o;
  o.stream = SeededStream(11, 0);
  SampleResult r = sample(pe, 100000, o);
  double mabs = r.points.col(0).cwiseAbs().mean();
  CHECK(std::abs(mabs - 0.5) < 0.01);  // E|x| = 1/rate
}

TEST_CASE("one-dimensional custom measures sample by adaptive rejection") {
  // V = x^2/2 + x^4/4, a genuinely non-gaussian log-concave law.
  auto V = [](const Eigen::VectorXd& x) {
    return 0.5 * x[0] * x[0] + 0.25 * std::pow(x[0], 4.0);
  };
  LogConcaveMeasure m = LogConcaveMeasure::custom(1, V, vec({0.0}));
  SamplerOptions o;
  o.stream = SeededStream(12, 0);
  const std::size_t n = 100000;
  SampleResult r = sample(m, n, o);
  CHECK(r.method == "direct");

  // Empirical cdf against quadrature of the normalized density.
  std::vector<double> xs(r.points.col(0).data(),
                         r.points.col(0).data() + n);
  std::sort(xs.begin(), xs.end());
  for (double t : {-1.5, -0.5, 0.0, 0.7, 1.3}) {
    double truth = testutil::simpson(
        [&](double x) { return m.density(vec({x})); }, -6.0, t, 6000);
    double emp = static_cast<double>(std::lower_bound(xs.begin(), xs.end(),
                                                      t) -
                                     xs.begin()) /
                 static_cast<double>(n);
    double se = std::sqrt(truth * (1.0 - truth) / n);
    CHECK(std::abs(emp - truth) < 5.0 * std::max(se, 1e-4));
  }

  // Same draws regardless of worker count.
  SamplerOptions o8 = o;
  o8.workers = 8;
  CHECK(sample(m, 5000, o).points == sample(m, 5000, o8).points);
}

TEST_CASE("hit-and-run matches closed-form moments in two dimensions") {
  // Custom carrier for a known law: V = |x|^2/2 (standard gaussian) so the
  // chain output can be checked exactly.
  auto V = [](const Eigen::VectorXd& x) { return 0.5 * x.squaredNorm(); };
  LogConcaveMeasure m = LogConcaveMeasure::custom(
      2, V, vec({0.0, 0.0}), Support::all_space(), false);
  SamplerOptions o;
  o.stream = SeededStream(13, 0);
  SampleResult r = sample(m, 60000, o);
  CHECK(r.method == "hit_and_run");
  CHECK(r.burnin > 0);

  Eigen::VectorXd mean = r.points.colwise().mean();
  CHECK(mean.norm() < 0.03);
  Eigen::MatrixXd centered = r.points.rowwise() - mean.transpose();
  Eigen::MatrixXd cov =
      centered.transpose() * centered / (r.points.rows() - 1.0);
  CHECK(std::abs(cov(0, 0) - 1.0) < 0.06);
  CHECK(std::abs(cov(1, 1) - 1.0) < 0.06);
  CHECK(std::abs(cov(0, 1)) < 0.05);

  SamplerOptions o8 = o;
  o8.workers = 8;
  CHECK(sample(m, 4000, o).points == sample(m, 4000, o8).points);
}

TEST_CASE("expectation helper reports batch errors") {
  LogConcaveMeasure g = LogConcaveMeasure::standard_gaussian(1);
  SamplerOptions o;
  o.stream = SeededStream(14, 0);
  Expectation e = expect(
      g, [](const Eigen::VectorXd& x) { return x[0] * x[0]; }, 100000, o);
  CHECK(e.count == 100000);
  CHECK(e.stderror > 0.0);
  CHECK(std::abs(e.value - 1.0) < 5.0 * e.stderror);
}

TEST_CASE("sampling rejects empty requests") {
  LogConcaveMeasure g = LogConcaveMeasure::standard_gaussian(1);
  CHECK_THROWS_AS(sample(g, 0), config_error);
}
