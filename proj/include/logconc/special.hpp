#pragma once

#include <cmath>

namespace logconc {

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) * 0.39894228040143267794;
}

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.70710678118654752440);
}

// log Gamma(a)Gamma(b)/Gamma(a+b)
inline double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace logconc
