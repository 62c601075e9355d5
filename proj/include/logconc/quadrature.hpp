#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace logconc {

using Fn1 = std::function<double(double)>;
using FnN = std::function<double(const Eigen::VectorXd&)>;

// Adaptive Simpson on [a,b].  `tol` is an absolute tolerance for the whole
// interval; subdivision stops when the Richardson estimate of the local error
// is below the local share of `tol` or `max_depth` is reached.
double adaptive_simpson(const Fn1& f, double a, double b, double tol,
                        int max_depth = 52);

// Adaptive Simpson with a relative target: runs a coarse pass to fix the
// scale, then integrates with tol = tol_rel * (|coarse| + floor).
double integrate(const Fn1& f, double a, double b, double tol_rel = 1e-9,
                 double floor = 1e-300);

// Integral with interior breakpoints (kinks, discontinuities): the domain is
// split at the given points and each piece integrated separately.
double integrate_split(const Fn1& f, double a, double b,
                       const std::vector<double>& breakpoints,
                       double tol_rel = 1e-9);

// Integral over [a,b] of a function with known integrable singularities.
// Each entry of `sing` is (location, beta) with f ~ C|t - s|^{-beta} near s,
// beta < 1; beta = 0 marks a plain split point (kink or jump).  The domain
// is split at every listed location and endpoint singularities are removed
// by power substitutions.
double integrate_singular(const Fn1& f, double a, double b,
                          const std::vector<std::pair<double, double>>& sing,
                          double tol_rel = 1e-9);

// \int_a^b f(t) dt where f(t) ~ C (t-a)^{-beta} as t->a+, 0 <= beta < 1.
// Substitutes s = (t-a)^{1-beta}, which makes the integrand bounded.
double integrate_power_left(const Fn1& f, double a, double b, double beta,
                            double tol_rel = 1e-9);

// Mirror image: singularity of order beta at the right endpoint b.
double integrate_power_right(const Fn1& f, double a, double b, double beta,
                             double tol_rel = 1e-9);

// Nested adaptive quadrature of f over an axis-aligned box, dimensions 1-3.
// Inner dimensions are integrated at a tighter share of the tolerance.
double integrate_box(const FnN& f, const Eigen::VectorXd& lo,
                     const Eigen::VectorXd& hi, double tol_rel = 1e-8);

// Golden-section search for the maximum of a unimodal f on [lo, hi].
// Returns the abscissa; tolerance is absolute in t.
double golden_max(const Fn1& f, double lo, double hi, double tol);

// Expands a bracket around a maximizer of a unimodal function starting from
// t0 with initial half-width step.  f may be -inf outside its domain; the
// expansion shrinks back inside.  lo_bound/hi_bound clip the search.
struct Bracket {
  double lo, hi;
};
Bracket bracket_max(const Fn1& f, double t0, double step, double lo_bound,
                    double hi_bound);

// Largest t in [lo, hi] with pred(t) true, assuming pred is true at lo and
// monotone true -> false.  Plain bisection.
double bisect_boundary(const std::function<bool(double)>& pred, double lo,
                       double hi, double tol);

// Maximum of a function that is concave along [lo, hi] where finite and
// -inf off its domain: coarse scan, bracket expansion, golden section.
// Returns -inf when no finite value is found.
double line_max(const Fn1& f, double lo, double hi, int scan = 32,
                double* argmax = nullptr);

}  // namespace logconc
