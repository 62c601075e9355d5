#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>

#include "logconc/rng.hpp"

namespace logconc {

struct AffineMap {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const { return A * x + b; }
  AffineMap inverse() const;
  // Composition (this after inner): x -> this(inner(x)).
  AffineMap after(const AffineMap& inner) const;
  double log_abs_det() const;
  static AffineMap identity(int n);
};

enum class Family { Gaussian, UniformBox, UniformBall, ProductExponential, Custom };

enum class SupportKind { AllSpace, Box, Ball };

struct Support {
  SupportKind kind = SupportKind::AllSpace;
  Eigen::VectorXd center;
  Eigen::VectorXd half_widths;  // Box
  double radius = 0.0;          // Ball

  static Support all_space() { return {}; }
  static Support box(Eigen::VectorXd center, Eigen::VectorXd half_widths);
  static Support ball(Eigen::VectorXd center, double radius);
  bool contains(const Eigen::VectorXd& x) const;
};

// A log-concave probability measure exp(-V(x)) dx on R^n.  Built-in families
// carry exact normalization and moments; custom potentials are normalized by
// quadrature in dimension <= 3 and are available unnormalized (for sampling
// only) above that.
class LogConcaveMeasure {
 public:
  static LogConcaveMeasure standard_gaussian(int dim);
  static LogConcaveMeasure gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov);
  static LogConcaveMeasure uniform_box(Eigen::VectorXd center,
                                       Eigen::VectorXd half_widths);
  // Cube of the given full side length centered at the origin.
  static LogConcaveMeasure uniform_cube(int dim, double side);
  static LogConcaveMeasure uniform_ball(int dim, Eigen::VectorXd center,
                                        double radius);
  // Product of centered two-sided exponentials with the given rates.
  static LogConcaveMeasure product_exponential(Eigen::VectorXd rates);
  static LogConcaveMeasure custom(
      int dim, std::function<double(const Eigen::VectorXd&)> potential,
      Eigen::VectorXd interior_point, Support support = Support::all_space(),
      bool validate_convexity = true);

  int dim() const { return dim_; }
  Family family() const { return family_; }
  const Support& support() const { return support_; }

  // V(x); +inf outside the support.  For built-in families V absorbs the
  // normalization, so exp(-V) is the density.
  double potential(const Eigen::VectorXd& x) const;
  bool normalized() const { return has_log_norm_; }
  double log_density(const Eigen::VectorXd& x) const;  // -V(x) - log Z
  double density(const Eigen::VectorXd& x) const;

  bool has_analytic_moments() const { return family_ != Family::Custom; }
  Eigen::VectorXd analytic_mean() const;
  Eigen::MatrixXd analytic_cov() const;

  // Axis-aligned box outside which the remaining mass is negligible; the
  // default domain for quadrature and searches.
  void effective_box(Eigen::VectorXd& lo, Eigen::VectorXd& hi) const;

  // Rough per-axis length scale (sqrt of variances when known).
  double length_scale() const;

  const Eigen::VectorXd& interior_point() const { return interior_; }

  // Family-specific accessors (throw config_error on mismatch).
  const Eigen::VectorXd& gaussian_mean() const;
  const Eigen::MatrixXd& gaussian_cov() const;
  const Eigen::MatrixXd& gaussian_chol() const;  // lower factor of cov
  const Eigen::VectorXd& exp_rates() const;

  friend LogConcaveMeasure pushforward(const LogConcaveMeasure& m,
                                       const AffineMap& T);

 private:
  LogConcaveMeasure() = default;

  int dim_ = 0;
  Family family_ = Family::Custom;
  Support support_;
  Eigen::VectorXd interior_;

  // Gaussian
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_, cov_inv_, chol_;
  double gauss_log_norm_ = 0.0;

  // ProductExponential
  Eigen::VectorXd rates_;

  // UniformBox / UniformBall: log of the support volume
  double log_volume_ = 0.0;

  // Custom
  std::function<double(const Eigen::VectorXd&)> potential_fn_;
  Eigen::VectorXd quad_lo_, quad_hi_;
  double log_norm_ = 0.0;  // log \int exp(-V)
  bool has_log_norm_ = true;
};

// Law of T(X) for X ~ m.
LogConcaveMeasure pushforward(const LogConcaveMeasure& m, const AffineMap& T);

// t-interval of {x + t dir inside s}; {0, 0} when the line misses the
// support.  AllSpace yields a huge but finite interval.
std::pair<double, double> support_chord(const Support& s,
                                        const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& dir);

namespace detail {
// Mode of the density by cyclic coordinate search from the interior point.
Eigen::VectorXd minimize_potential(const LogConcaveMeasure& m);
}  // namespace detail

struct MomentBudget {
  enum class Method { Auto, Analytic, Quadrature, MonteCarlo };
  Method method = Method::Auto;
  std::size_t samples = 200000;
  SeededStream stream{0, 0};
  int workers = 1;
};

struct MomentResult {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  Eigen::VectorXd mean_se;  // zero for exact routes
  double cov_se = 0.0;      // max standard error over covariance entries
  std::string method;
};

MomentResult mean_and_covariance(const LogConcaveMeasure& m,
                                 const MomentBudget& budget = {});

// Whitening map T with T(X) centered and of identity covariance, together
// with the transformed measure.
std::pair<AffineMap, LogConcaveMeasure> isotropic_normalize(
    const LogConcaveMeasure& m, const MomentBudget& budget = {});

// L with cov = L^2 I; requires the measure to be centered and isotropic up
// to the given relative tolerance.
double isotropic_constant(const LogConcaveMeasure& m, double rel_tol = 1e-2,
                          const MomentBudget& budget = {});

struct MaxDensity {
  double value = 0.0;
  Eigen::VectorXd argmax;
};
MaxDensity max_density(const LogConcaveMeasure& m);

struct LevelSet {
  double volume = 0.0;
  double radius = 0.0;        // sup |x| over the level set
  double refine_change = 0.0; // relative volume change on grid refinement
};
// K = {density >= exp(-tau) * max density}; radial quadrature from the mode.
LevelSet level_set_volume(const LogConcaveMeasure& m, double tau,
                          int angular_resolution = 0);

// Total variation norm of the directional (Skorohod) derivative along unit
// vector e: 2 \int_{e^perp} max_t density(x + t e) dx, by nested quadrature.
double skorohod_norm(const LogConcaveMeasure& m, const Eigen::VectorXd& e,
                     double tol_rel = 1e-6);

// Smallest c with density(x) <= c exp(-alpha |x|); +inf if no finite c works.
double envelope_fit(const LogConcaveMeasure& m, double alpha);

}  // namespace logconc
