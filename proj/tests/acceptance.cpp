// End-to-end acceptance gate.  Ten property checks with closed-form or
// independently computed expectations; one PASS/FAIL line each.  Exit code
// is the number of failed checks.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "logconc/constants.hpp"
#include "logconc/errors.hpp"
#include "logconc/io.hpp"
#include "logconc/measure.hpp"
#include "logconc/metrics.hpp"
#include "logconc/polynomial.hpp"
#include "logconc/pushforward.hpp"
#include "logconc/sampler.hpp"
#include "logconc/verifier.hpp"
#include "testutil.hpp"

using namespace logconc;

namespace {

int failures = 0;

void criterion(int idx, const char* name,
               const std::function<std::pair<bool, std::string>()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  std::string detail;
  try {
    auto [o, d] = body();
    ok = o;
    detail = d;
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("exception: ") + e.what();
  }
  double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             t0)
                   .count();
  std::printf("%s criterion-%d (%s): %s [%.1fs]\n", ok ? "PASS" : "FAIL", idx,
              name, detail.c_str(), sec);
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

Eigen::VectorXd ones(int n, double v) {
  return Eigen::VectorXd::Constant(n, v);
}

VerifyOptions quad_opts() {
  VerifyOptions o;
  o.engine = Engine::Quadrature;
  o.seed = 42;
  return o;
}

VerifyOptions mc_opts(std::size_t samples) {
  VerifyOptions o;
  o.engine = Engine::MonteCarlo;
  o.samples = samples;
  o.seed = 42;
  return o;
}

}  // namespace

int main() {
  const double kPi = testutil::kPi;

  criterion(1, "constant golden values", [&] {
    struct Row {
      double got, quad, want;
    };
    std::vector<Row> rows = {
        {c_n_tau(1, 1.0), c_n_tau_quad(1, 1.0), 1.0 + std::exp(-1.0)},
        {c_n_tau(3, 1.0), c_n_tau_quad(3, 1.0), 1.0 + 15.0 * std::exp(-1.0)},
        {c1_integral(2), c1_integral_quad(2), kPi / 2.0},
        {C_nd(2, 2), C_nd_quad(2, 2), 2.0 / kPi},
        {C_nd(3, 2), C_nd_quad(3, 2), 0.5},
        {gaussian_abs_moment(1.0), gaussian_abs_moment_quad(1.0),
         std::sqrt(2.0 / kPi)}};
    double worst = 0.0;
    for (const Row& r : rows) {
      worst = std::max(worst, std::abs(r.got - r.want));
      worst = std::max(worst, std::abs(r.quad - r.want));
    }
    return std::make_pair(worst < 1e-8,
                          "max |closed-form - expected| and |quadrature - "
                          "expected| = " +
                              num(worst));
  });

  criterion(2, "directional derivative norms", [&] {
    const double want = std::sqrt(2.0 / kPi);
    double worst_g = 0.0;
    for (int n : {1, 2, 3}) {
      LogConcaveMeasure g = LogConcaveMeasure::standard_gaussian(n);
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e[0] = 1.0;
      worst_g = std::max(worst_g, std::abs(skorohod_norm(g, e) - want));
    }
    double worst_b = 0.0;
    {
      LogConcaveMeasure b1 = LogConcaveMeasure::uniform_cube(1, 2.5);
      Eigen::VectorXd e1(1);
      e1 << 1.0;
      worst_b = std::max(worst_b,
                         std::abs(skorohod_norm(b1, e1) - 2.0 / 2.5));
      double side = std::sqrt(12.0);
      LogConcaveMeasure b2 = LogConcaveMeasure::uniform_cube(2, side);
      Eigen::VectorXd e2(2);
      e2 << 1.0, 0.0;
      worst_b = std::max(worst_b,
                         std::abs(skorohod_norm(b2, e2) - 2.0 / side));
    }
    return std::make_pair(
        worst_g < 1e-4 && worst_b < 1e-6,
        "gaussian err " + num(worst_g) + ", box err " + num(worst_b));
  });

  criterion(3, "level-set volume and radius bounds", [&] {
    VerifyOptions o;
    o.seed = 42;
    bool all = true;
    double spot = 0.0;
    for (int n : {1, 2, 3}) {
      std::vector<LogConcaveMeasure> ms = {
          LogConcaveMeasure::standard_gaussian(n),
          LogConcaveMeasure::uniform_cube(n, std::sqrt(12.0)),
          LogConcaveMeasure::product_exponential(ones(n, std::sqrt(2.0)))};
      for (std::size_t k = 0; k < ms.size(); ++k) {
        InequalityReport rep = check_geometry(ms[k], {0.5, 1.0, 2.0}, o);
        all = all && rep.pass;
        if (n == 1 && k == 0) {
          const auto& taus = rep.series.at("tau");
          const auto& prods = rep.series.at("volume_product");
          for (std::size_t i = 0; i < taus.size(); ++i)
            if (std::abs(taus[i] - 1.0) < 1e-12) spot = prods[i];
        }
      }
    }
    bool spot_ok = std::abs(spot - 1.5436) <= 1e-3;
    return std::make_pair(all && spot_ok,
                          std::string(all ? "9/9 measure checks pass"
                                          : "a measure check failed") +
                              "; gaussian n=1 tau=1 product = " + num(spot));
  });

  criterion(4, "shift-modulus exponents", [&] {
    double e_chi = besov_fit(analytic_density("chi2_1"), 0.5).slope - 0.5;
    double e_g =
        besov_fit(analytic_density("gaussian", {{"mean", 0.0}, {"sd", 1.0}}),
                  1.0)
            .slope -
        1.0;
    double e_c =
        besov_fit(analytic_density("power_image", {{"k", 3.0}}), 1.0 / 3.0)
            .slope -
        1.0 / 3.0;
    bool exact_ok = std::abs(e_chi) < 0.05 && std::abs(e_g) < 0.05 &&
                    std::abs(e_c) < 0.05;

    LogConcaveMeasure g = LogConcaveMeasure::standard_gaussian(1);
    VerifyOptions mc = mc_opts(1000000);
    double worst_mc = 0.0;
    bool mc_pass = true;
    for (int d : {1, 2, 3}) {
      Polynomial f = Polynomial::parse(d == 1   ? "x1"
                                       : d == 2 ? "x1^2"
                                                : "x1^3");
      InequalityReport rep = check_shift_tv(f, g, d, {}, 0.0, 128.0, mc);
      worst_mc = std::max(worst_mc, std::abs(rep.slope - 1.0 / d));
      mc_pass = mc_pass && rep.pass;
    }
    return std::make_pair(
        exact_ok && worst_mc <= 0.08 && mc_pass,
        "oracle errs " + num(std::abs(e_chi)) + "/" + num(std::abs(e_g)) +
            "/" + num(std::abs(e_c)) + ", sampled err max " + num(worst_mc));
  });

  criterion(5, "steep-test-function growth exponents", [&] {
    LogConcaveMeasure g = LogConcaveMeasure::standard_gaussian(1);
    const char* polys[] = {"x1^2", "x1^3", "x1^4"};
    double worst_q = 0.0, worst_mc = 0.0, worst_stab = 0.0;
    bool pass_all = true;
    for (int d : {2, 3, 4}) {
      Polynomial f = Polynomial::parse(polys[d - 2]);
      double target = 1.0 - 1.0 / d;
      InequalityReport q = check_malliavin(f, g, d, {}, {}, quad_opts());
      worst_q = std::max(worst_q, std::abs(q.slope - target));
      pass_all = pass_all && q.pass;
      InequalityReport m = check_malliavin(f, g, d, {}, {}, mc_opts(1000000));
      worst_mc = std::max(worst_mc, std::abs(m.slope - target));
      worst_stab = std::max(worst_stab, m.stability);
      pass_all = pass_all && m.pass;
    }
    return std::make_pair(
        pass_all && worst_q <= 0.05 && worst_mc <= 0.08 && worst_stab < 0.10,
        "quadrature err " + num(worst_q) + ", sampled err " + num(worst_mc) +
            ", max budget-x4 change " + num(worst_stab));
  });

  criterion(6, "small-ball exponents and spot probability", [&] {
    LogConcaveMeasure g = LogConcaveMeasure::standard_gaussian(1);
    const char* polys[] = {"x1", "x1^2", "x1^3", "x1^4"};
    double worst = 0.0;
    bool pass_all = true;
    for (int d : {1, 2, 3, 4}) {
      InequalityReport rep = check_small_ball(Polynomial::parse(polys[d - 1]),
                                              g, d, {}, quad_opts());
      worst = std::max(worst, std::abs(rep.slope - 1.0 / d));
      pass_all = pass_all && rep.pass;
    }
    SamplerOptions so;
    so.stream = SeededStream(42, 64);
    SampleResult r = sample(g, 1000000, so);
    long hits = 0;
    for (int i = 0; i < r.points.rows(); ++i)
      if (r.points(i, 0) * r.points(i, 0) <= 0.01) ++hits;
    double p = static_cast<double>(hits) / 1e6;
    bool spot_ok = std::abs(p - 0.0797) <= 0.002;
    return std::make_pair(pass_all && worst <= 0.05 && spot_ok,
                          "exponent err " + num(worst) +
                              ", spot probability " + num(p));
  });

  criterion(7, "bounded-Lipschitz distance", [&] {
    Density1D a = analytic_density("gaussian", {{"mean", 0.0}, {"sd", 1.0}});
    Density1D b = analytic_density("gaussian", {{"mean", 0.1}, {"sd", 1.0}});
    // Optimal test function: a unit-slope ramp over a width-2 window centered
    // at the crossing point 0.05 of the two densities.
    double oracle = testutil::simpson(
        [](double t) {
          return testutil::phi_cdf(t) - testutil::phi_cdf(t - 0.1);
        },
        -0.95, 1.05, 4000);
    double fm = fm_distance(a, b).value;
    bool close = std::abs(fm - oracle) < 1e-3;

    SeededStream rng(2025, 0);
    bool order_ok = true;
    for (int k = 0; k < 50; ++k) {
      double m1 = -1.5 + 3.0 * rng.uniform01();
      double m2 = -1.5 + 3.0 * rng.uniform01();
      double s1 = 0.7 + 0.8 * rng.uniform01();
      double s2 = 0.7 + 0.8 * rng.uniform01();
      Density1D x = analytic_density("gaussian", {{"mean", m1}, {"sd", s1}});
      Density1D y = analytic_density("gaussian", {{"mean", m2}, {"sd", s2}});
      double f = fm_distance(x, y).value;
      double bound = std::min({w1_distance(x, y), 2.0, tv_distance(x, y)});
      if (f > bound + 1e-6) order_ok = false;
    }
    return std::make_pair(close && order_ok,
                          "closed-form gap " + num(std::abs(fm - oracle)) +
                              ", ordering on 50 random pairs " +
                              (order_ok ? "holds" : "violated"));
  });

  criterion(8, "tv vs bounded-Lipschitz chain", [&] {
    LogConcaveMeasure g = LogConcaveMeasure::standard_gaussian(1);
    Polynomial f = Polynomial::parse("x1^2");
    bool all = true;
    double max_ratio = 0.0;
    for (double delta : {0.05, 0.1, 0.2, 0.3, 0.5}) {
      Polynomial h = f + Polynomial::variable(1) * delta;
      InequalityReport rep = check_tv_fm(f, h, g, 2, quad_opts());
      all = all && rep.pass;
      max_ratio = std::max(max_ratio, rep.scalars.at("ratio"));
    }
    return std::make_pair(all, "5 quadratic pairs, max lhs/rhs margin " +
                                   num(max_ratio));
  });

  criterion(9, "density norm bounds", [&] {
    LogConcaveMeasure g = LogConcaveMeasure::standard_gaussian(1);
    Polynomial f = Polynomial::parse("x1^2");
    InequalityReport rep = check_lp_density(f, g, 2, 1.5, 0.0, quad_opts());
    double lhs = rep.scalars.at("lhs");
    bool value_ok = std::abs(lhs - 1.110) <= 0.02 && rep.pass;

    bool divergence_ok = std::isinf(lp_norm(image_density_1d(f, g), 2.0));
    std::string diverr;
    try {
      check_lp_density(f, g, 2, 2.0, 0.0, quad_opts());
      divergence_ok = false;
      diverr = "p = 2 was accepted";
    } catch (const config_error&) {
      diverr = "p = 2 rejected, norm infinite";
    }
    return std::make_pair(value_ok && divergence_ok,
                          "scaled norm at p=1.5 is " + num(lhs) + "; " +
                              diverr);
  });

  criterion(10, "reproducibility", [&] {
    SuiteSpec spec;
    spec.id = "all";
    VerifyOptions o;
    o.samples = 200000;
    o.seed = 42;
    o.workers = 1;
    std::string r1 = reports_to_json(run_suite(spec, o), true);
    std::string r2 = reports_to_json(run_suite(spec, o), true);
    VerifyOptions o8 = o;
    o8.workers = 8;
    std::string r3 = reports_to_json(run_suite(spec, o8), true);
    bool same_seed = r1 == r2;
    bool same_workers = r1 == r3;
    return std::make_pair(same_seed && same_workers,
                          std::string("same-seed reruns ") +
                              (same_seed ? "identical" : "differ") +
                              ", 1 vs 8 workers " +
                              (same_workers ? "identical" : "differ") + " (" +
                              num(static_cast<double>(r1.size())) +
                              " bytes compared)");
  });

  if (failures == 0) std::printf("acceptance: all 10 criteria pass\n");
  else std::printf("acceptance: %d criterion(s) failed\n", failures);
  return failures;
}
