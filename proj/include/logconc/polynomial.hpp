#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "logconc/rng.hpp"

namespace logconc {

// Sparse real polynomial in variables x1..xN.  Keys of the term map are
// exponent vectors of length dimension(); values are coefficients.  The zero
// polynomial has an empty term map and degree 0 by convention.
class Polynomial {
 public:
  using Terms = std::map<std::vector<int>, double>;

  Polynomial() = default;

  // Grammar: expr := ['-'|'+'] term (('+'|'-') term)*
  //          term := factor ('*' factor)*
  //          factor := real | 'x'k ('^' nonneg-int)?
  // Throws parse_error with the 0-based offset of the offending character.
  static Polynomial parse(std::string_view text);

  static Polynomial zero() { return Polynomial(); }
  static Polynomial constant(double c);
  static Polynomial variable(int index);  // x_index, 1-based
  static Polynomial monomial(std::vector<int> exps, double coef);

  int degree() const;     // total degree; 0 for the zero polynomial
  int dimension() const;  // number of variables spanned
  bool is_zero() const { return terms_.empty(); }
  const Terms& terms() const { return terms_; }

  double operator()(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;

  // Directional derivative <grad f, e> as a polynomial.
  Polynomial directional(const Eigen::VectorXd& e) const;

  // f(A y + b): pullback under an affine map; A has dimension() rows.
  Polynomial substitute_affine(const Eigen::MatrixXd& A,
                               const Eigen::VectorXd& b) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double c) const;

  // Canonical text form; parse(to_string()) reproduces the polynomial
  // exactly (coefficients are printed with round-trip precision).
  std::string to_string() const;

  friend bool operator==(const Polynomial& a, const Polynomial& b);

 private:
  void add_term(std::vector<int> exps, double coef);
  void normalize();

  Terms terms_;
};

class LogConcaveMeasure;

struct PolyMomentOptions {
  std::size_t samples = 200000;
  SeededStream stream{0, 0};
  std::vector<double> q_list = {0.0, 1.0, 2.0, 4.0};
  // Fraction of exact zeros of f above which the geometric-mean norm (q = 0)
  // is reported as undefined.
  double zero_threshold = 1e-4;
};

struct PolyMoments {
  double mean = 0.0, mean_se = 0.0;
  double variance = 0.0, variance_se = 0.0;
  // E|f - Ef|^{1/(d-1)}; meaningful only for degree d >= 2.
  double frac_moment = 0.0, frac_moment_se = 0.0;
  bool frac_defined = false;
  std::map<double, double> q_norms;  // q -> ||f||_q  (q = 0: geometric mean)
  bool q0_defined = true;
  double zero_fraction = 0.0;
  bool analytic_mean_var = false;  // gaussian base, degree <= 2
  std::size_t samples_used = 0;
};

PolyMoments poly_moments(const Polynomial& f, const LogConcaveMeasure& m,
                         const PolyMomentOptions& opts = {});

}  // namespace logconc
