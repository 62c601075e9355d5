#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "logconc/rng.hpp"

namespace logconc {

// Explicit constants used by the inequality suites.  Each closed form has a
// *_quad companion that recomputes it by adaptive quadrature so the two
// routes can be cross-checked.  Unknown absolute constants from the
// literature are never produced here; where a formula needs one, it is an
// input argument.

// c_n(tau) = n * \int_1^inf t^{n-1} e^{-tau t} dt + 1, n >= 1, tau > 0.
double c_n_tau(int n, double tau);
double c_n_tau_quad(int n, double tau);

// (1 + 3 d pi) / 2, d >= 2.
double c2_d(int d);

// \int_0^inf (s+1)^{-2} s^{1/(2d-2)} ds = B(1 + b, 1 - b), b = 1/(2d-2).
double c1_integral(int d);
double c1_integral_quad(int d);

// Spherical moment \int_{S^{n-1}} |(e, e1)|^{1/(d-1)} dsigma(e), d >= 2.
double C_nd(int n, int d);
double C_nd_quad(int n, int d);
double C_nd_mc(int n, int d, std::size_t samples, SeededStream stream);

// Absolute moment of the standard gaussian: E|Z|^alpha, alpha > 0.
double gaussian_abs_moment(double alpha);
double gaussian_abs_moment_quad(double alpha);

// (p/(p-1) + p/(d/(d-1) - p))^{1/p} * C^{d(1-1/p)}, for 1 < p < d/(d-1).
double C1_dp(int d, double p, double C);

// 2 + (C_sigma + C_nu) * E|Z|^alpha, alpha in (0,1].
double lemma22_constant(double c_nu, double c_sigma, double alpha);

// 1 + 2 C (sigma_f^{-1/d} + sigma_g^{-1/d}) * E|Z|^{1/d}.
double cor53_constant(double c_hat, double sigma_f, double sigma_g, int d);

// max{ c * d * c1_integral(d) / C_nd(n,d), c2_d(d) } with the caller-supplied
// absolute constant c.
double cor41_constant(int d, int n, double c);

// C1 * (4 c (d-1) + 1): the final composition, evaluated only once the
// caller fixes both the stage-one constant C1 and the absolute constant c.
double thm41_composite(double c1_d, double c, int d);

struct ConstantValue {
  double value = 0.0;
  double crosscheck_error = 0.0;  // |closed form - quadrature|, 0 if none
  bool has_crosscheck = false;
};

// Name-based dispatch for the CLI.  Throws config_error for unknown names or
// missing parameters.
ConstantValue evaluate_constant(const std::string& name,
                                const std::map<std::string, double>& params);

}  // namespace logconc
