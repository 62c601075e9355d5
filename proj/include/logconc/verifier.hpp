#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "logconc/measure.hpp"
#include "logconc/metrics.hpp"
#include "logconc/polynomial.hpp"
#include "logconc/pushforward.hpp"

namespace logconc {

// Backend for expectations and densities.  Auto picks quadrature when the
// base measure is one-dimensional and normalized (exact image densities are
// then available) and Monte Carlo otherwise.
enum class Engine { Auto, Quadrature, MonteCarlo };

struct VerifyOptions {
  std::size_t samples = 200000;
  std::uint64_t seed = 42;
  int workers = 1;
  Engine engine = Engine::Auto;
};

// One verification run of a single inequality.  Everything needed to
// recompute the pass flag is stored: parameter echo, measured series,
// scalar summaries, and provenance.
struct InequalityReport {
  std::string id;         // inequality key, e.g. "thm4.1", "cw"
  std::string criterion;  // human-readable pass criterion with numbers
  std::string engine;     // "quadrature", "monte_carlo", "analytic"
  std::map<std::string, std::string> params;
  std::map<std::string, std::vector<double>> series;
  std::map<std::string, double> scalars;
  double constant = 0.0;   // headline empirical constant
  double stability = 0.0;  // relative change under the enlarged-budget rerun
  double slope = 0.0;      // fitted exponent, when the check fits one
  double slope_err = 0.0;  // least-squares standard error of that exponent
  bool pass = false;
  std::vector<std::string> warnings;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  double runtime_sec = 0.0;
};

// Growth of E[phi'_M(f)] in the step slope M for steep test functions
// phi with |phi| <= 1.  Reports the fitted exponent against 1 - 1/d and
// C_hat = max over the grid of sigma_f^{1/d} E[phi'_M(f)] / M^{1-1/d}.
// Families: "tanh" (M sech^2 profile), "erf" (Gaussian profile), "ramp"
// (indicator window, the extremal probe for singular densities); the
// default is {tanh, erf}.
InequalityReport check_malliavin(const Polynomial& f,
                                 const LogConcaveMeasure& m, int d,
                                 std::vector<double> M_grid = {},
                                 std::vector<std::string> families = {},
                                 const VerifyOptions& opts = {});

// Shift modulus of the image law: fits Delta(h) ~ h^{1/d} and reports
// sup_h sigma_f^{1/d} Delta(h) h^{-1/d}.  When c_hat > 0 it additionally
// checks the chain Delta(h) <= 2^{1-1/d} c_hat sigma_f^{-1/d} h^{1/d} for
// grid shifts h >= 4/max(M_grid of the constant's source); finer shifts
// are not certified by a finite-M constant.
InequalityReport check_shift_tv(const Polynomial& f,
                                const LogConcaveMeasure& m, int d,
                                std::vector<double> h_grid = {},
                                double c_hat = 0.0, double c_hat_m_max = 128.0,
                                const VerifyOptions& opts = {});

// TV vs Fortet-Mourier: TV <= C(nu, sigma) FM^{alpha/(1+alpha)} with
// alpha = 1/d and C from the two empirical shift constants.
InequalityReport check_tv_fm(const Polynomial& f, const Polynomial& g,
                             const LogConcaveMeasure& m, int d,
                             const VerifyOptions& opts = {});

// L^p bound for the image density: sigma_f^{1-1/p} ||rho_f||_p <= C1_dp(d,
// p, c_hat), plus interval spot checks nu(A) <= c_hat lambda(A)^{1/d}
// sigma_f^{-1/d}.  c_hat = 0 computes the constant internally.
InequalityReport check_lp_density(const Polynomial& f,
                                  const LogConcaveMeasure& m, int d, double p,
                                  double c_hat = 0.0,
                                  const VerifyOptions& opts = {});

// L^p bound for a difference of image densities against a TV power.
InequalityReport check_lp_difference(const Polynomial& f, const Polynomial& g,
                                     const LogConcaveMeasure& m, int d,
                                     double p, double c_hat = 0.0,
                                     const VerifyOptions& opts = {});

// Small-ball probabilities mu(|f| <= t): fitted exponent vs 1/d and
// c1_hat = sup_t mu(|f|<=t) (E|f|)^{1/d} / (t^{1/d} d).
InequalityReport check_small_ball(const Polynomial& f,
                                  const LogConcaveMeasure& m, int d,
                                  std::vector<double> t_grid = {},
                                  const VerifyOptions& opts = {});

// Moment comparison ||f||_q <= (c q d)^d ||f||_p for 0 <= p < q: reports
// c_hat = max over pairs of (||f||_q/||f||_p)^{1/d} / (q d).  Sample-based.
InequalityReport check_moment_growth(const Polynomial& f,
                                     const LogConcaveMeasure& m, int d,
                                     std::vector<double> q_list = {},
                                     const VerifyOptions& opts = {});

// Variance bound Var f <= R int|x-x0|^2 dmu int|grad f|^2 dmu; reports
// R_hat, the ratio of the two sides.
InequalityReport check_poincare(const Polynomial& f,
                                const LogConcaveMeasure& m,
                                const VerifyOptions& opts = {});

// Level-set volume and radius bounds, directional-derivative norms over a
// direction grid, and the exponential envelope of the density.  Expects a
// whitened measure (identity covariance) of dimension <= 3.
InequalityReport check_geometry(const LogConcaveMeasure& m,
                                std::vector<double> tau_list = {},
                                const VerifyOptions& opts = {});

// A named batch of checks over canonical measure/polynomial targets.  Any
// of the optional fields replaces the canonical choice in every target.
struct SuiteSpec {
  std::string id;
  std::optional<LogConcaveMeasure> measure;
  std::optional<Polynomial> poly;
  std::optional<Polynomial> poly2;
};

std::vector<std::string> suite_ids();

// Runs the suite and returns its reports in a fixed parameter order.
// Unknown ids throw config_error.
std::vector<InequalityReport> run_suite(const SuiteSpec& spec,
                                        const VerifyOptions& opts = {});

}  // namespace logconc
