#include "logconc/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "logconc/errors.hpp"

namespace logconc {

namespace {

int total_degree(const std::vector<int>& e) {
  return std::accumulate(e.begin(), e.end(), 0);
}

std::vector<int> padded(const std::vector<int>& e, std::size_t dim) {
  std::vector<int> out(dim, 0);
  std::copy(e.begin(), e.end(), out.begin());
  return out;
}

double int_pow(double x, int k) {
  double r = 1.0;
  while (k > 0) {
    if (k & 1) r *= x;
    x *= x;
    k >>= 1;
  }
  return r;
}

std::string format_coef(double c) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", c);
  return buf;
}

}  // namespace

void Polynomial::add_term(std::vector<int> exps, double coef) {
  while (!exps.empty() && exps.back() == 0) exps.pop_back();
  auto [it, inserted] = terms_.emplace(std::move(exps), coef);
  if (!inserted) it->second += coef;
}

void Polynomial::normalize() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->second == 0.0)
      it = terms_.erase(it);
    else
      ++it;
  }
}

Polynomial Polynomial::constant(double c) {
  Polynomial p;
  if (c != 0.0) p.terms_[{}] = c;
  return p;
}

Polynomial Polynomial::variable(int index) {
  if (index < 1) throw config_error("variable index must be >= 1");
  std::vector<int> e(index, 0);
  e[index - 1] = 1;
  return monomial(std::move(e), 1.0);
}

Polynomial Polynomial::monomial(std::vector<int> exps, double coef) {
  for (int k : exps)
    if (k < 0) throw config_error("monomial exponents must be >= 0");
  Polynomial p;
  p.add_term(std::move(exps), coef);
  p.normalize();
  return p;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
  return d;
}

int Polynomial::dimension() const {
  std::size_t d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e.size());
  return static_cast<int>(d);
}

double Polynomial::operator()(const Eigen::VectorXd& x) const {
  if (x.size() < dimension())
    throw config_error("polynomial eval: point has fewer coordinates than the variable span");
  double acc = 0.0;
  for (const auto& [e, c] : terms_) {
    double m = c;
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i] > 0) m *= int_pow(x[static_cast<Eigen::Index>(i)], e[i]);
    acc += m;
  }
  return acc;
}

Eigen::VectorXd Polynomial::gradient(const Eigen::VectorXd& x) const {
  if (x.size() < dimension())
    throw config_error("polynomial gradient: point has fewer coordinates than the variable span");
  Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
  for (const auto& [e, c] : terms_) {
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      double m = c * e[i];
      for (std::size_t j = 0; j < e.size(); ++j) {
        int k = (j == i) ? e[j] - 1 : e[j];
        if (k > 0) m *= int_pow(x[static_cast<Eigen::Index>(j)], k);
      }
      g[static_cast<Eigen::Index>(i)] += m;
    }
  }
  return g;
}

Polynomial Polynomial::directional(const Eigen::VectorXd& e) const {
  if (e.size() < dimension())
    throw config_error("directional: direction has fewer coordinates than the variable span");
  Polynomial out;
  for (const auto& [exps, c] : terms_) {
    for (std::size_t i = 0; i < exps.size(); ++i) {
      if (exps[i] == 0) continue;
      double coef = c * exps[i] * e[static_cast<Eigen::Index>(i)];
      if (coef == 0.0) continue;
      std::vector<int> de = exps;
      de[i] -= 1;
      out.add_term(std::move(de), coef);
    }
  }
  out.normalize();
  return out;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial out = *this;
  for (const auto& [e, c] : o.terms_) out.add_term(e, c);
  out.normalize();
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  Polynomial out = *this;
  for (const auto& [e, c] : o.terms_) out.add_term(e, -c);
  out.normalize();
  return out;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial out;
  for (const auto& [ea, ca] : terms_) {
    for (const auto& [eb, cb] : o.terms_) {
      std::vector<int> e = padded(ea, std::max(ea.size(), eb.size()));
      for (std::size_t i = 0; i < eb.size(); ++i) e[i] += eb[i];
      out.add_term(std::move(e), ca * cb);
    }
  }
  out.normalize();
  return out;
}

Polynomial Polynomial::operator*(double c) const {
  Polynomial out;
  if (c == 0.0) return out;
  for (const auto& [e, v] : terms_) out.terms_[e] = v * c;
  return out;
}

Polynomial Polynomial::substitute_affine(const Eigen::MatrixXd& A,
                                         const Eigen::VectorXd& b) const {
  int n = dimension();
  if (A.rows() < n || b.size() < n)
    throw config_error("substitute_affine: map does not cover the variable span");
  // Linear images of the old variables.
  std::vector<Polynomial> lin(n);
  for (int i = 0; i < n; ++i) {
    Polynomial li = Polynomial::constant(b[i]);
    for (int j = 0; j < A.cols(); ++j) {
      if (A(i, j) != 0.0) li = li + Polynomial::variable(j + 1) * A(i, j);
    }
    lin[i] = li;
  }
  Polynomial out;
  for (const auto& [e, c] : terms_) {
    Polynomial term = Polynomial::constant(c);
    for (std::size_t i = 0; i < e.size(); ++i)
      for (int k = 0; k < e[i]; ++k) term = term * lin[i];
    out = out + term;
  }
  return out;
}

bool operator==(const Polynomial& a, const Polynomial& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  auto ia = a.terms_.begin();
  auto ib = b.terms_.begin();
  for (; ia != a.terms_.end(); ++ia, ++ib) {
    if (ia->first != ib->first || ia->second != ib->second) return false;
  }
  return true;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  // Graded ordering, highest total degree first; ties broken by the
  // lexicographically larger exponent vector.
  std::vector<const std::pair<const std::vector<int>, double>*> order;
  for (const auto& t : terms_) order.push_back(&t);
  std::sort(order.begin(), order.end(), [](auto* x, auto* y) {
    int dx = total_degree(x->first), dy = total_degree(y->first);
    if (dx != dy) return dx > dy;
    return x->first > y->first;
  });

  std::string out;
  bool first = true;
  for (auto* t : order) {
    double c = t->second;
    const auto& e = t->first;
    std::string mono;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += "x" + std::to_string(i + 1);
      if (e[i] > 1) mono += "^" + std::to_string(e[i]);
    }
    double mag = std::abs(c);
    std::string body;
    if (mono.empty())
      body = format_coef(mag);
    else if (mag == 1.0)
      body = mono;
    else
      body = format_coef(mag) + "*" + mono;

    if (first) {
      out = (c < 0 ? "-" : "") + body;
      first = false;
    } else {
      out += (c < 0 ? " - " : " + ") + body;
    }
  }
  return out;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Polynomial run() {
    skip_ws();
    if (pos_ >= s_.size()) throw parse_error("empty polynomial", pos_);
    Polynomial acc;
    double sign = 1.0;
    if (peek() == '+' || peek() == '-') {
      if (get() == '-') sign = -1.0;
    }
    acc = term() * sign;
    skip_ws();
    while (pos_ < s_.size()) {
      char c = get();
      if (c == '+')
        acc = acc + term();
      else if (c == '-')
        acc = acc - term();
      else
        throw parse_error(std::string("expected '+' or '-', got '") + c + "'",
                          pos_ - 1);
      skip_ws();
    }
    return acc;
  }

 private:
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  char get() { return s_[pos_++]; }
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  Polynomial term() {
    Polynomial acc = factor();
    skip_ws();
    while (pos_ < s_.size() && peek() == '*') {
      ++pos_;
      acc = acc * factor();
      skip_ws();
    }
    return acc;
  }

  Polynomial factor() {
    skip_ws();
    if (pos_ >= s_.size()) throw parse_error("expected a factor", pos_);
    char c = peek();
    if (c == 'x') return variable();
    if ((c >= '0' && c <= '9') || c == '.') return number();
    throw parse_error(std::string("expected a number or variable, got '") + c + "'",
                      pos_);
  }

  Polynomial variable() {
    ++pos_;  // 'x'
    if (pos_ >= s_.size() || peek() < '1' || peek() > '9')
      throw parse_error("variable index must start with 1-9", pos_);
    int idx = 0;
    while (pos_ < s_.size() && peek() >= '0' && peek() <= '9') {
      idx = idx * 10 + (get() - '0');
      if (idx > 1000000) throw parse_error("variable index too large", pos_ - 1);
    }
    int exp = 1;
    if (pos_ < s_.size() && peek() == '^') {
      ++pos_;
      if (pos_ >= s_.size() || peek() < '0' || peek() > '9')
        throw parse_error("expected a nonnegative integer exponent", pos_);
      exp = 0;
      while (pos_ < s_.size() && peek() >= '0' && peek() <= '9') {
        exp = exp * 10 + (get() - '0');
        if (exp > 64) throw parse_error("exponent too large", pos_ - 1);
      }
    }
    if (exp == 0) return Polynomial::constant(1.0);
    std::vector<int> e(idx, 0);
    e[idx - 1] = exp;
    return Polynomial::monomial(std::move(e), 1.0);
  }

  Polynomial number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && peek() >= '0' && peek() <= '9') ++pos_;
    if (pos_ < s_.size() && peek() == '.') {
      ++pos_;
      while (pos_ < s_.size() && peek() >= '0' && peek() <= '9') ++pos_;
    }
    if (pos_ == start || (pos_ == start + 1 && s_[start] == '.'))
      throw parse_error("malformed number", start);
    if (pos_ < s_.size() && (peek() == 'e' || peek() == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < s_.size() && (peek() == '+' || peek() == '-')) ++pos_;
      if (pos_ >= s_.size() || peek() < '0' || peek() > '9') {
        pos_ = mark;  // not an exponent suffix after all
      } else {
        while (pos_ < s_.size() && peek() >= '0' && peek() <= '9') ++pos_;
      }
    }
    return Polynomial::constant(std::stod(std::string(s_.substr(start, pos_ - start))));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial Polynomial::parse(std::string_view text) {
  Parser p(text);
  Polynomial out = p.run();
  out.normalize();
  return out;
}

}  // namespace logconc
