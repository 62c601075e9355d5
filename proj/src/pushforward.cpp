#include "logconc/pushforward.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "logconc/errors.hpp"
#include "logconc/quadrature.hpp"
#include "logconc/special.hpp"

namespace logconc {

EmpiricalSample1D EmpiricalSample1D::from(std::vector<double> v) {
  if (v.size() < 2)
    throw config_error("EmpiricalSample1D: need at least 2 values");
  for (double x : v)
    if (!std::isfinite(x))
      throw estimation_error("EmpiricalSample1D: non-finite value in sample");
  std::sort(v.begin(), v.end());
  EmpiricalSample1D s;
  s.values = std::move(v);
  return s;
}

double EmpiricalSample1D::quantile(double p) const {
  if (values.empty()) throw config_error("EmpiricalSample1D: empty sample");
  if (p <= 0.0) return values.front();
  if (p >= 1.0) return values.back();
  double idx = p * static_cast<double>(values.size() - 1);
  std::size_t lo = static_cast<std::size_t>(idx);
  double frac = idx - static_cast<double>(lo);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

double EmpiricalSample1D::mean() const {
  double s = 0.0;
  for (double x : values) s += x;
  return s / static_cast<double>(values.size());
}

namespace {

// Integral of the exact density over [a,b], already support-clipped.
double integrate_exact(const Density1D& d, double a, double b,
                       double tol_rel) {
  std::vector<std::pair<double, double>> sing;  // (location, beta)
  for (std::size_t i = 0; i < d.singular_points.size(); ++i) {
    double beta = i < d.singular_powers.size() ? d.singular_powers[i] : 0.0;
    sing.emplace_back(d.singular_points[i], beta);
  }
  return integrate_singular(d.exact, a, b, sing, tol_rel);
}

// Integral of the piecewise-linear grid interpolant over [a,b], clipped to
// the grid range.
double integrate_grid(const Density1D& d, double a, double b) {
  if (d.count() < 2 || d.step <= 0.0) return 0.0;
  a = std::max(a, d.left);
  b = std::min(b, d.right());
  if (!(a < b)) return 0.0;
  auto node = [&](int i) { return d.left + d.step * i; };
  int i0 = static_cast<int>(std::floor((a - d.left) / d.step));
  i0 = std::max(0, std::min(i0, d.count() - 2));
  double total = 0.0;
  for (int i = i0; i < d.count() - 1; ++i) {
    double t0 = node(i), t1 = node(i + 1);
    if (t0 >= b) break;
    double u0 = std::max(t0, a), u1 = std::min(t1, b);
    if (!(u0 < u1)) continue;
    double v0 = d.values[i], v1 = d.values[i + 1];
    auto lin = [&](double t) {
      return v0 + (v1 - v0) * (t - t0) / d.step;
    };
    total += 0.5 * (lin(u0) + lin(u1)) * (u1 - u0);
  }
  return total;
}

}  // namespace

double Density1D::value_at(double t) const {
  if (exact) {
    if (t < support_lo || t > support_hi) return 0.0;
    return exact(t);
  }
  if (count() < 2 || step <= 0.0) return 0.0;
  if (t < left || t > right()) return 0.0;
  double pos = (t - left) / step;
  int i = static_cast<int>(std::floor(pos));
  if (i >= count() - 1) return values.back();
  double frac = pos - i;
  return values[i] + frac * (values[i + 1] - values[i]);
}

double Density1D::mass() const {
  if (exact) return integrate_exact(*this, support_lo, support_hi, 1e-9);
  double trapz = 0.0;
  for (int i = 0; i + 1 < count(); ++i)
    trapz += 0.5 * (values[i] + values[i + 1]) * step;
  return trapz + head_mass + tail_mass;
}

double integrate_density(const Density1D& d, double a, double b,
                         double tol_rel) {
  a = std::max(a, d.support_lo);
  b = std::min(b, d.support_hi);
  if (!(a < b)) return 0.0;
  if (d.exact) return integrate_exact(d, a, b, tol_rel);
  return integrate_grid(d, a, b);
}

double Density1D::cdf(double t) const {
  if (exact) {
    if (t <= support_lo) return 0.0;
    if (t >= support_hi) return 1.0;
    double v = integrate_exact(*this, support_lo, t, 1e-9);
    return std::min(1.0, std::max(0.0, v));
  }
  // Head/tail masses are carried as atoms at the grid ends.
  if (t < support_lo) return 0.0;
  if (t < left) return head_mass;
  if (t >= right()) return head_mass + integrate_grid(*this, left, right()) + tail_mass;
  return head_mass + integrate_grid(*this, left, t);
}

double Density1D::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0))
    throw config_error("Density1D::quantile: u must lie in (0,1)");
  double lo = exact ? support_lo : left;
  double hi = exact ? support_hi : right();
  if (cdf(lo) >= u) return lo;
  if (cdf(hi) <= u) return hi;
  for (int it = 0; it < 200 && hi - lo > 1e-9; ++it) {
    double mid = 0.5 * (lo + hi);
    if (cdf(mid) < u)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

Density1D estimate_density(const EmpiricalSample1D& sample,
                           const DensityOptions& opts) {
  const auto& v = sample.values;
  std::size_t n = v.size();
  if (n < 1000)
    throw config_error("estimate_density: need at least 1000 samples");
  if (!(opts.trim >= 0.0 && opts.trim < 0.5))
    throw config_error("estimate_density: trim must lie in [0, 0.5)");
  double lo = sample.quantile(opts.trim);
  double hi = sample.quantile(1.0 - opts.trim);
  if (!(hi - lo >= 1e-12))
    throw degeneracy_error(
        "estimate_density: sample range below 1e-12, distribution is "
        "essentially constant");
  int bins = opts.bins;
  if (bins <= 0) bins = static_cast<int>(std::lround(std::sqrt(double(n))));
  bins = std::max(16, std::min(4096, bins));
  double w = (hi - lo) / bins;

  std::size_t below = std::lower_bound(v.begin(), v.end(), lo) - v.begin();
  std::size_t above = v.end() - std::upper_bound(v.begin(), v.end(), hi);
  double head = double(below) / double(n);
  double tail = double(above) / double(n);
  double retained = 1.0 - head - tail;

  std::vector<double> counts(bins, 0.0);
  for (std::size_t k = below; k < n - above; ++k) {
    int b = static_cast<int>((v[k] - lo) / w);
    b = std::max(0, std::min(bins - 1, b));
    counts[b] += 1.0;
  }

  Density1D d;
  d.step = w;
  d.left = lo + 0.5 * w;  // values sit at bin centers
  d.values.resize(bins);
  for (int i = 0; i < bins; ++i)
    d.values[i] = counts[i] / (double(n) * w);
  // Scale so the trapezoidal mass over the node range equals the retained
  // fraction exactly (the trapezoid misses half of each end bin).
  double trapz = 0.0;
  for (int i = 0; i + 1 < bins; ++i)
    trapz += 0.5 * (d.values[i] + d.values[i + 1]) * w;
  if (trapz > 0.0) {
    double scale = retained / trapz;
    for (double& x : d.values) x *= scale;
  }
  d.support_lo = d.left;
  d.support_hi = d.right();
  d.head_mass = head;
  d.tail_mass = tail;
  d.source = "histogram";
  return d;
}

namespace {

void fill_grid(Density1D& d, double lo, double hi, int count) {
  if (count < 2) throw config_error("analytic_density: grid needs >= 2 nodes");
  d.left = lo;
  d.step = (hi - lo) / (count - 1);
  d.values.resize(count);
  for (int i = 0; i < count; ++i) {
    double v = d.exact(d.left + d.step * i);
    d.values[i] = std::isfinite(v) ? v : 0.0;
  }
}

double param(const std::map<std::string, double>& params,
             const std::string& key, const char* oracle) {
  auto it = params.find(key);
  if (it == params.end())
    throw config_error(std::string("analytic_density: oracle '") + oracle +
                       "' needs parameter '" + key + "'");
  return it->second;
}

}  // namespace

Density1D analytic_density(const std::string& oracle,
                           const std::map<std::string, double>& params,
                           int grid_count) {
  Density1D d;
  d.source = oracle;
  if (oracle == "gaussian") {
    double mean = param(params, "mean", "gaussian");
    double sd = param(params, "sd", "gaussian");
    if (!(sd > 0.0)) throw config_error("analytic_density: gaussian sd must be > 0");
    d.exact = [mean, sd](double t) { return normal_pdf((t - mean) / sd) / sd; };
    d.support_lo = mean - 10.0 * sd;
    d.support_hi = mean + 10.0 * sd;
    d.head_mass = d.tail_mass = normal_cdf(-10.0);
    fill_grid(d, d.support_lo, d.support_hi, grid_count);
  } else if (oracle == "chi2_1") {
    d.exact = [](double t) {
      if (t <= 0.0) return 0.0;
      return std::exp(-0.5 * t) / std::sqrt(2.0 * M_PI * t);
    };
    d.support_lo = 0.0;
    d.support_hi = 40.0;
    d.singular_points = {0.0};
    d.singular_powers = {0.5};
    d.tail_mass = 2.0 * normal_cdf(-std::sqrt(40.0));
    // The grid starts one step inside the support so node values stay
    // finite; the skipped sliver is recorded as head mass.
    double step = d.support_hi / grid_count;
    fill_grid(d, step, d.support_hi, grid_count);
    d.head_mass = 2.0 * normal_cdf(std::sqrt(step)) - 1.0;
  } else if (oracle == "power_image") {
    double kd = param(params, "k", "power_image");
    int k = static_cast<int>(std::lround(kd));
    if (k < 1 || std::abs(kd - k) > 1e-9)
      throw config_error("analytic_density: power_image k must be a positive integer");
    bool even = (k % 2 == 0);
    double xmax = 9.0;
    double tmax = std::pow(xmax, k);
    d.exact = [k, even](double t) {
      if (k == 1) return normal_pdf(t);
      if (even && t <= 0.0) return 0.0;
      if (t == 0.0) return 0.0;
      double r = std::pow(std::abs(t), 1.0 / k);
      double jac = r / (k * std::abs(t));  // |dx/dt| = |t|^{1/k - 1}/k
      return (even ? 2.0 : 1.0) * normal_pdf(r) * jac;
    };
    d.support_lo = even ? 0.0 : -tmax;
    d.support_hi = tmax;
    d.tail_mass = normal_cdf(-xmax) * (even ? 2.0 : 1.0);
    d.head_mass = even ? 0.0 : normal_cdf(-xmax);
    if (k >= 2) {
      d.singular_points = {0.0};
      d.singular_powers = {1.0 - 1.0 / k};
    }
    if (k == 1) {
      fill_grid(d, d.support_lo, d.support_hi, grid_count);
    } else if (even) {
      double step = d.support_hi / grid_count;
      fill_grid(d, step, d.support_hi, grid_count);
      d.head_mass = integrate_exact(d, 0.0, step, 1e-9);
    } else {
      // Skip the node nearest zero by choosing an even node count so the
      // grid straddles the singularity.
      int n = grid_count + (grid_count % 2);
      fill_grid(d, -tmax + tmax / n, tmax - tmax / n, n);
    }
  } else if (oracle == "uniform") {
    double a = param(params, "a", "uniform");
    double b = param(params, "b", "uniform");
    if (!(b > a)) throw config_error("analytic_density: uniform needs b > a");
    double h = 1.0 / (b - a);
    d.exact = [a, b, h](double t) { return (t >= a && t <= b) ? h : 0.0; };
    d.support_lo = a;
    d.support_hi = b;
    d.singular_points = {a, b};
    d.singular_powers = {0.0, 0.0};
    fill_grid(d, a, b, grid_count);
  } else {
    throw config_error("analytic_density: unknown oracle '" + oracle + "'");
  }
  return d;
}

namespace {

// Dense coefficients c[0..deg] of a univariate polynomial.
std::vector<double> dense_coeffs(const Polynomial& f) {
  if (f.dimension() > 1)
    throw config_error("image_density_1d: polynomial must be univariate");
  std::vector<double> c(static_cast<std::size_t>(f.degree()) + 1, 0.0);
  for (const auto& [e, coef] : f.terms()) {
    int k = e.empty() ? 0 : e[0];
    c[static_cast<std::size_t>(k)] += coef;
  }
  return c;
}

// Real roots of sum c_k x^k in [xa, xb] via the companion matrix, polished
// by two Newton steps and deduplicated.
std::vector<double> real_roots(std::vector<double> c, double xa, double xb) {
  while (c.size() > 1 && std::abs(c.back()) < 1e-300) c.pop_back();
  int deg = static_cast<int>(c.size()) - 1;
  if (deg < 1) return {};
  if (deg == 1) {
    double r = -c[0] / c[1];
    return (r >= xa && r <= xb) ? std::vector<double>{r} : std::vector<double>{};
  }
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[i] / c[deg];
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  auto eval = [&](double x, double* dp) {
    double p = 0.0, dq = 0.0;
    for (int k = deg; k >= 0; --k) {
      dq = dq * x + p;
      p = p * x + c[k];
    }
    if (dp) *dp = dq;
    return p;
  };
  double span = std::abs(xb - xa) + 1.0;
  std::vector<double> roots;
  for (int i = 0; i < deg; ++i) {
    std::complex<double> z = es.eigenvalues()[i];
    if (std::abs(z.imag()) > 1e-7 * (1.0 + std::abs(z.real()))) continue;
    double r = z.real();
    for (int it = 0; it < 3; ++it) {
      double dp = 0.0, p = eval(r, &dp);
      if (std::abs(dp) < 1e-300) break;
      double stepn = p / dp;
      if (!std::isfinite(stepn) || std::abs(stepn) > 0.1 * span) break;
      r -= stepn;
    }
    if (r < xa - 1e-9 * span || r > xb + 1e-9 * span) continue;
    bool dup = false;
    for (double q : roots)
      if (std::abs(q - r) <= 1e-10 * span) dup = true;
    if (!dup) roots.push_back(r);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace

Density1D image_density_1d(const Polynomial& f, const LogConcaveMeasure& m,
                           int grid_count) {
  if (m.dim() != 1)
    throw config_error("image_density_1d: base measure must be one-dimensional");
  std::vector<double> c = dense_coeffs(f);
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  int deg = static_cast<int>(c.size()) - 1;
  if (deg < 1)
    throw config_error("image_density_1d: polynomial is constant");

  Eigen::VectorXd blo, bhi;
  m.effective_box(blo, bhi);
  double xa = blo[0], xb = bhi[0];

  auto feval = [c, deg](double x) {
    double p = 0.0;
    for (int k = deg; k >= 0; --k) p = p * x + c[static_cast<std::size_t>(k)];
    return p;
  };
  // Range of f over the effective box: endpoints plus interior critical
  // points.
  std::vector<double> dcoef(static_cast<std::size_t>(deg), 0.0);
  for (int k = 1; k <= deg; ++k)
    dcoef[static_cast<std::size_t>(k - 1)] = k * c[static_cast<std::size_t>(k)];
  std::vector<double> crit = real_roots(dcoef, xa, xb);
  double fmin = std::min(feval(xa), feval(xb));
  double fmax = std::max(feval(xa), feval(xb));
  for (double x : crit) {
    fmin = std::min(fmin, feval(x));
    fmax = std::max(fmax, feval(x));
  }
  if (!(fmax - fmin > 0.0))
    throw degeneracy_error("image_density_1d: image range is degenerate");

  LogConcaveMeasure base = m;
  Density1D d;
  d.source = "image";
  d.support_lo = fmin;
  d.support_hi = fmax;
  // f is strictly monotone between consecutive critical points, so each
  // bracketing branch holds exactly one preimage of t, found by a
  // bisection/Newton hybrid.  Keeps density evaluations cheap enough for the
  // adaptive quadrature loops downstream.
  std::vector<double> xs{xa};
  for (double x : crit)
    if (x > xa && x < xb) xs.push_back(x);
  xs.push_back(xb);
  std::vector<double> fxs;
  for (double x : xs) fxs.push_back(feval(x));
  d.exact = [c, base, xs, fxs](double t) {
    const int deg2 = static_cast<int>(c.size()) - 1;
    auto pd = [&](double x, double* dp) {
      double p = 0.0, dq = 0.0;
      for (int k = deg2; k >= 0; --k) {
        dq = dq * x + p;
        p = p * x + c[static_cast<std::size_t>(k)];
      }
      *dp = dq;
      return p - t;
    };
    double total = 0.0;
    Eigen::VectorXd x1(1);
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      double fa = fxs[i] - t, fb = fxs[i + 1] - t;
      if (fa * fb > 0.0) continue;
      double a = xs[i], b = xs[i + 1];
      double x, dp = 0.0;
      if (fa == 0.0) {
        x = a;
      } else if (fb == 0.0) {
        x = b;
      } else {
        // Roots close to a branch end are approached at the geometric rate
        // (deg-1)/deg, so the cap must be generous; the relative-step test
        // exits early once Newton turns quadratic.
        x = 0.5 * (a + b);
        for (int it = 0; it < 400; ++it) {
          double p = pd(x, &dp);
          if (p == 0.0) break;
          if ((p < 0.0) == (fa < 0.0))
            a = x;
          else
            b = x;
          double xn = x - p / dp;
          double xnext =
              (std::isfinite(xn) && xn > a && xn < b) ? xn : 0.5 * (a + b);
          bool done =
              std::abs(xnext - x) <= 2e-16 * (std::abs(x) + 1e-300) ||
              b - a <= 1e-15 * (std::abs(a) + std::abs(b) + 1e-12);
          x = xnext;
          if (done) break;
        }
      }
      pd(x, &dp);
      if (std::abs(dp) < 1e-300) continue;
      x1[0] = x;
      total += base.density(x1) / std::abs(dp);
    }
    return total;
  };
  // Critical values are singular points: near a critical point of order k
  // (f - t_c vanishes to order k) the image density behaves like
  // |t - t_c|^{1/k - 1}.  The order is read off the Taylor coefficients.
  auto deriv_at = [&c](int j, double x) {
    std::vector<double> dc = c;
    for (int r = 0; r < j; ++r) {
      if (dc.size() <= 1) return 0.0;
      for (std::size_t k = 1; k < dc.size(); ++k)
        dc[k - 1] = static_cast<double>(k) * dc[k];
      dc.pop_back();
    }
    double p = 0.0;
    for (int k = static_cast<int>(dc.size()) - 1; k >= 0; --k)
      p = p * x + dc[static_cast<std::size_t>(k)];
    return p;
  };
  for (double x : crit) {
    double tc = feval(x);
    double h = 1e-2 * (1.0 + std::abs(x));
    std::vector<double> g(static_cast<std::size_t>(deg) + 1, 0.0);
    double gmax = 0.0;
    for (int j = 2; j <= deg; ++j) {
      g[static_cast<std::size_t>(j)] = std::abs(deriv_at(j, x)) *
                                       std::pow(h, j) / std::tgamma(j + 1.0);
      gmax = std::max(gmax, g[static_cast<std::size_t>(j)]);
    }
    int order = deg;
    for (int j = 2; j <= deg; ++j) {
      if (g[static_cast<std::size_t>(j)] > 1e-9 * gmax) {
        order = j;
        break;
      }
    }
    bool seen = false;
    for (double s : d.singular_points)
      if (std::abs(s - tc) <= 1e-10 * (1.0 + std::abs(tc))) seen = true;
    if (!seen) {
      d.singular_points.push_back(tc);
      d.singular_powers.push_back(1.0 - 1.0 / order);
    }
  }
  // Boundary image values are discontinuities when the support is bounded.
  if (m.support().kind != SupportKind::AllSpace) {
    for (double tb : {feval(xa), feval(xb)}) {
      bool seen = false;
      for (double s : d.singular_points)
        if (std::abs(s - tb) <= 1e-10 * (1.0 + std::abs(tb))) seen = true;
      if (!seen) {
        d.singular_points.push_back(tb);
        d.singular_powers.push_back(0.0);
      }
    }
  }
  // The grid avoids landing exactly on singular nodes by a half-step shift.
  double step = (fmax - fmin) / (grid_count + 1);
  d.left = fmin + 0.5 * step;
  d.step = step;
  d.values.resize(grid_count + 1);
  for (int i = 0; i <= grid_count; ++i) {
    double v = d.exact(d.left + step * i);
    d.values[static_cast<std::size_t>(i)] = std::isfinite(v) ? v : 0.0;
  }
  d.head_mass = integrate_exact(d, fmin, d.left, 1e-9);
  d.tail_mass = integrate_exact(d, d.right(), fmax, 1e-9);
  return d;
}

EmpiricalSample1D image_sample(const Polynomial& f, const LogConcaveMeasure& m,
                               std::size_t count, const SamplerOptions& opts) {
  SampleResult s = sample(m, count, opts);
  std::vector<double> out(count);
  Eigen::VectorXd row(m.dim());
  for (std::size_t i = 0; i < count; ++i) {
    row = s.points.row(static_cast<Eigen::Index>(i));
    out[i] = f(row);
  }
  return EmpiricalSample1D::from(std::move(out));
}

}  // namespace logconc
