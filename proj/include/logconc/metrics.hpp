#pragma once

#include <vector>

#include "logconc/pushforward.hpp"

namespace logconc {

// Total variation distance \int |rho1 - rho2| d(lambda), integrated over the
// union of the two ranges; mutually singular laws give 2.
double tv_distance(const Density1D& a, const Density1D& b);

// L1 distance between the distribution functions, \int |F1 - F2|.  Upper
// bound for the Fortet-Mourier distance.
double w1_distance(const Density1D& a, const Density1D& b);

// Fortet-Mourier distance sup { int phi d(nu1 - nu2) : |phi| <= 1,
// |phi'| <= 1 }, solved as a box-constrained LP on a grid.  The reported
// value is the objective of the recovered test function phi, which is
// feasible for the continuum problem, so the value is a certified lower
// bound of the true distance.
struct FmResult {
  double value = 0.0;
  std::vector<double> grid;  // nodes where phi is defined
  std::vector<double> phi;   // optimal test function at the nodes
  double refine_change = 0.0;  // |value - value at half resolution|
  bool coarse_flag = false;    // refine_change > 1e-3
};

FmResult fm_distance(const Density1D& a, const Density1D& b);
FmResult fm_distance(const EmpiricalSample1D& a, const EmpiricalSample1D& b);

// Shift modulus Delta(h) = \int |rho(t+h) - rho(t)| dt with rho extended by
// zero outside its support.  Grid densities snap h to a multiple of the
// grid step (the snapped value is written to *snapped when given); exact
// densities use h as is.
double shift_modulus(const Density1D& d, double h, double* snapped = nullptr);

// Fit of Delta(h) ~ C h^alpha over a grid of shifts.
struct BesovFit {
  double seminorm = 0.0;  // sup_h Delta(h) / h^alpha
  double slope = 0.0;     // least-squares slope of log Delta vs log h
  double residual = 0.0;  // rms residual of that fit
  std::vector<double> h;
  std::vector<double> delta;
};

// h_grid entries must lie in [grid step, range/4]; at least 6 usable values
// are required.  An empty h_grid selects a log-spaced default based on the
// central width of the density.
BesovFit besov_fit(const Density1D& d, double alpha,
                   std::vector<double> h_grid = {});

// (\int rho^p d(lambda))^{1/p}.  Returns +inf when the integral diverges
// (a singularity of order beta with beta * p >= 1).
double lp_norm(const Density1D& d, double p);

}  // namespace logconc
