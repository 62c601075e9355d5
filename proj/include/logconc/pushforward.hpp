#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "logconc/measure.hpp"
#include "logconc/polynomial.hpp"
#include "logconc/sampler.hpp"

namespace logconc {

// Sorted scalar sample, the raw material for histogram densities.
struct EmpiricalSample1D {
  std::vector<double> values;  // nondecreasing

  static EmpiricalSample1D from(std::vector<double> v);

  std::size_t count() const { return values.size(); }
  // Interpolated order statistic, p in [0,1].
  double quantile(double p) const;
  double mean() const;
};

// Density of a scalar law on a uniform grid.  Histogram densities carry only
// grid values; analytic densities also carry an exact evaluator, and all
// integral queries (mass, cdf, quantile, Lp norms) prefer the exact route.
// Integrable singularities of the exact density are listed in
// singular_points with local exponents: rho(t) ~ C|t - s|^{-power} near s.
// power = 0 marks a plain discontinuity (split point only).
struct Density1D {
  double left = 0.0;   // first grid node
  double step = 0.0;   // grid spacing, > 0
  std::vector<double> values;
  double support_lo = 0.0, support_hi = 0.0;  // declared support interval
  std::string source;  // "histogram" or an oracle id

  std::function<double(double)> exact;  // null for histograms
  std::vector<double> singular_points;
  std::vector<double> singular_powers;
  double head_mass = 0.0;  // mass below the grid range
  double tail_mass = 0.0;  // mass above the grid range

  int count() const { return static_cast<int>(values.size()); }
  double right() const { return left + step * (count() - 1); }

  // Exact density when available, otherwise linear interpolation between
  // grid nodes; zero outside the declared support.
  double value_at(double t) const;

  // Total mass including head/tail bookkeeping.  Exact densities are
  // integrated by adaptive quadrature with singularity substitutions; grid
  // densities by the trapezoid rule.
  double mass() const;

  double cdf(double t) const;
  // Inverse of cdf by bisection to 1e-9; u must lie in (0,1).
  double quantile(double u) const;
};

struct DensityOptions {
  int bins = 0;          // 0: round(sqrt(count)), clamped to [16, 4096]
  double trim = 0.0005;  // quantile fraction trimmed at each end
};

// Integral of the density over [a, b], clipped to its support.  Exact
// densities use adaptive quadrature with singularity substitutions; grid
// densities integrate the piecewise-linear interpolant.  Head/tail masses
// are not included.
double integrate_density(const Density1D& d, double a, double b,
                         double tol_rel = 1e-9);

// Histogram density on the trimmed quantile range.  Values sit at bin
// centers and are scaled so the trapezoidal mass equals the retained
// fraction; the trimmed fractions are recorded as head/tail mass.
Density1D estimate_density(const EmpiricalSample1D& sample,
                           const DensityOptions& opts = {});

// Closed-form reference densities.
//   gaussian      params: mean, sd
//   chi2_1        law of x^2 under N(0,1)
//   power_image   params: k (integer >= 1); law of x^k under N(0,1)
//   uniform       params: a, b
Density1D analytic_density(const std::string& oracle,
                           const std::map<std::string, double>& params = {},
                           int grid_count = 2001);

// Exact density of the image of a one-dimensional measure under a
// polynomial: rho(t) = sum over real roots x of f(x) = t of
// rho_mu(x)/|f'(x)|.  Critical values of f become singular points.
Density1D image_density_1d(const Polynomial& f, const LogConcaveMeasure& m,
                           int grid_count = 2001);

// Draws `count` points of m and evaluates f on each row.
EmpiricalSample1D image_sample(const Polynomial& f, const LogConcaveMeasure& m,
                               std::size_t count,
                               const SamplerOptions& opts = {});

}  // namespace logconc
