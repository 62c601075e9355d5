#include "logconc/constants.hpp"

#include <cmath>
#include <stdexcept>

#include "logconc/errors.hpp"
#include "logconc/quadrature.hpp"
#include "logconc/special.hpp"

namespace logconc {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require(bool ok, const char* msg) {
  if (!ok) throw config_error(msg);
}

}  // namespace

double c_n_tau(int n, double tau) {
  require(n >= 1, "c_n_tau: n must be >= 1");
  require(tau > 0.0, "c_n_tau: tau must be > 0");
  // n \int_1^inf t^{n-1} e^{-tau t} dt = n! e^{-tau} tau^{-n} sum_{k<n} tau^k/k!
  double sum = 0.0, term = 1.0;
  for (int k = 0; k < n; ++k) {
    sum += term;
    term *= tau / (k + 1);
  }
  double log_nfact = std::lgamma(n + 1.0);
  return std::exp(log_nfact - tau - n * std::log(tau)) * sum + 1.0;
}

double c_n_tau_quad(int n, double tau) {
  require(n >= 1 && tau > 0.0, "c_n_tau_quad: bad arguments");
  auto f = [&](double t) { return n * std::pow(t, n - 1) * std::exp(-tau * t); };
  double hi = 1.0;
  while (f(hi) > 1e-22 && hi < 1e6) hi *= 2.0;
  return integrate(f, 1.0, hi, 1e-12) + 1.0;
}

double c2_d(int d) {
  require(d >= 2, "c2_d: d must be >= 2");
  return 0.5 * (1.0 + 3.0 * d * kPi);
}

double c1_integral(int d) {
  require(d >= 2, "c1_integral: d must be >= 2");
  double b = 1.0 / (2.0 * d - 2.0);
  // B(1+b, 1-b) = Gamma(1+b)Gamma(1-b) = pi b / sin(pi b)
  return kPi * b / std::sin(kPi * b);
}

double c1_integral_quad(int d) {
  require(d >= 2, "c1_integral_quad: d must be >= 2");
  double b = 1.0 / (2.0 * d - 2.0);
  auto f = [&](double s) { return std::pow(s, b) / ((s + 1.0) * (s + 1.0)); };
  // Split at 1 and map the tail to u = 1/s, which turns it into
  // \int_0^1 u^{-b} (u+1)^{-2} du with an integrable endpoint singularity.
  double head = integrate(f, 0.0, 1.0, 1e-12);
  auto g = [&](double u) { return std::pow(u, -b) / ((1.0 + u) * (1.0 + u)); };
  double tail = integrate_power_left(g, 0.0, 1.0, b, 1e-12);
  return head + tail;
}

double C_nd(int n, int d) {
  require(n >= 1, "C_nd: n must be >= 1");
  require(d >= 2, "C_nd: d must be >= 2");
  double b = 1.0 / (d - 1.0);
  // Gamma(n/2) Gamma((b+1)/2) / (sqrt(pi) Gamma((n+b)/2))
  return std::exp(std::lgamma(0.5 * n) + std::lgamma(0.5 * (b + 1.0)) -
                  std::lgamma(0.5 * (n + b))) /
         std::sqrt(kPi);
}

double C_nd_quad(int n, int d) {
  require(n >= 1 && d >= 2, "C_nd_quad: bad arguments");
  double b = 1.0 / (d - 1.0);
  if (n == 1) return 1.0;  // S^0 = {-1, +1}
  if (n == 2) {
    // (e,e1) = cos(theta) with theta uniform on the circle.
    auto f = [&](double th) { return std::pow(std::abs(std::cos(th)), b); };
    return integrate(f, 0.0, 2.0 * kPi, 1e-12) / (2.0 * kPi);
  }
  // Density of u = (e,e1): (1-u^2)^{(n-3)/2} / B(1/2, (n-1)/2) on [-1,1].
  double logB = log_beta(0.5, 0.5 * (n - 1.0));
  auto f = [&](double u) {
    return std::pow(std::abs(u), b) *
           std::pow(std::max(0.0, 1.0 - u * u), 0.5 * (n - 3.0));
  };
  double val;
  if (n == 3) {
    val = integrate(f, -1.0, 1.0, 1e-12);
  } else if (n == 4) {
    // Exponent -1/2 at u = +-1.
    val = integrate_power_left(f, -1.0, 0.0, 0.5, 1e-12) +
          integrate_power_right(f, 0.0, 1.0, 0.5, 1e-12);
  } else {
    val = integrate(f, -1.0, 1.0, 1e-12);
  }
  return val / std::exp(logB);
}

double C_nd_mc(int n, int d, std::size_t samples, SeededStream stream) {
  require(n >= 1 && d >= 2, "C_nd_mc: bad arguments");
  double b = 1.0 / (d - 1.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    double norm2 = 0.0, first = 0.0;
    for (int j = 0; j < n; ++j) {
      double z = stream.normal();
      if (j == 0) first = z;
      norm2 += z * z;
    }
    acc += std::pow(std::abs(first) / std::sqrt(norm2), b);
  }
  return acc / static_cast<double>(samples);
}

double gaussian_abs_moment(double alpha) {
  require(alpha > 0.0, "gaussian_abs_moment: alpha must be > 0");
  return std::exp(0.5 * alpha * std::log(2.0) + std::lgamma(0.5 * (alpha + 1.0))) /
         std::sqrt(kPi);
}

double gaussian_abs_moment_quad(double alpha) {
  require(alpha > 0.0, "gaussian_abs_moment_quad: alpha must be > 0");
  auto f = [&](double t) { return 2.0 * std::pow(t, alpha) * normal_pdf(t); };
  return integrate(f, 0.0, 42.0, 1e-12);
}

double C1_dp(int d, double p, double C) {
  require(d >= 2, "C1_dp: d must be >= 2");
  double pmax = d / (d - 1.0);
  require(p > 1.0 && p < pmax, "C1_dp: need 1 < p < d/(d-1)");
  require(C > 0.0, "C1_dp: C must be > 0");
  double bracket = p / (p - 1.0) + p / (pmax - p);
  return std::pow(bracket, 1.0 / p) * std::pow(C, d * (1.0 - 1.0 / p));
}

double lemma22_constant(double c_nu, double c_sigma, double alpha) {
  require(alpha > 0.0 && alpha <= 1.0, "lemma22_constant: alpha must be in (0,1]");
  require(c_nu >= 0.0 && c_sigma >= 0.0, "lemma22_constant: constants must be >= 0");
  return 2.0 + (c_sigma + c_nu) * gaussian_abs_moment(alpha);
}

double cor53_constant(double c_hat, double sigma_f, double sigma_g, int d) {
  require(d >= 2, "cor53_constant: d must be >= 2");
  require(c_hat >= 0.0, "cor53_constant: C must be >= 0");
  require(sigma_f > 0.0 && sigma_g > 0.0, "cor53_constant: sigmas must be > 0");
  double inv = std::pow(sigma_f, -1.0 / d) + std::pow(sigma_g, -1.0 / d);
  return 1.0 + 2.0 * c_hat * inv * gaussian_abs_moment(1.0 / d);
}

double cor41_constant(int d, int n, double c) {
  require(c > 0.0, "cor41_constant: c must be > 0");
  double a = c * d * c1_integral(d) / C_nd(n, d);
  return std::max(a, c2_d(d));
}

double thm41_composite(double c1_d, double c, int d) {
  require(d >= 2, "thm41_composite: d must be >= 2");
  require(c1_d > 0.0 && c > 0.0, "thm41_composite: constants must be > 0");
  return c1_d * (4.0 * c * (d - 1.0) + 1.0);
}

ConstantValue evaluate_constant(const std::string& name,
                                const std::map<std::string, double>& params) {
  auto get = [&](const char* key) {
    auto it = params.find(key);
    if (it == params.end())
      throw config_error("constant '" + name + "' needs parameter '" + key + "'");
    return it->second;
  };
  auto geti = [&](const char* key) { return static_cast<int>(get(key)); };

  ConstantValue out;
  if (name == "c_n_tau") {
    out.value = c_n_tau(geti("n"), get("tau"));
    out.crosscheck_error = std::abs(out.value - c_n_tau_quad(geti("n"), get("tau")));
    out.has_crosscheck = true;
  } else if (name == "c2_d") {
    out.value = c2_d(geti("d"));
  } else if (name == "c1_integral") {
    out.value = c1_integral(geti("d"));
    out.crosscheck_error = std::abs(out.value - c1_integral_quad(geti("d")));
    out.has_crosscheck = true;
  } else if (name == "C_nd") {
    out.value = C_nd(geti("n"), geti("d"));
    out.crosscheck_error = std::abs(out.value - C_nd_quad(geti("n"), geti("d")));
    out.has_crosscheck = true;
  } else if (name == "gaussian_abs_moment") {
    out.value = gaussian_abs_moment(get("alpha"));
    out.crosscheck_error =
        std::abs(out.value - gaussian_abs_moment_quad(get("alpha")));
    out.has_crosscheck = true;
  } else if (name == "C1_dp") {
    out.value = C1_dp(geti("d"), get("p"), get("C"));
  } else if (name == "lemma22_constant") {
    out.value = lemma22_constant(get("c_nu"), get("c_sigma"), get("alpha"));
  } else if (name == "cor53_constant") {
    out.value = cor53_constant(get("C"), get("sigma_f"), get("sigma_g"), geti("d"));
  } else if (name == "cor41_constant") {
    out.value = cor41_constant(geti("d"), geti("n"), get("c"));
  } else if (name == "thm41_composite") {
    out.value = thm41_composite(get("C1"), get("c"), geti("d"));
  } else {
    throw config_error("unknown constant name: " + name);
  }
  return out;
}

}  // namespace logconc
