#include "logconc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace logconc {

namespace {

double simpson_rec(const Fn1& f, double a, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double finite_or_zero(double v) { return std::isfinite(v) ? v : 0.0; }

}  // namespace

double adaptive_simpson(const Fn1& f, double a, double b, double tol,
                        int max_depth) {
  if (!(a < b)) return 0.0;
  double m = 0.5 * (a + b);
  double fa = finite_or_zero(f(a));
  double fm = finite_or_zero(f(m));
  double fb = finite_or_zero(f(b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  auto g = [&f](double t) { return finite_or_zero(f(t)); };
  return simpson_rec(g, a, b, fa, fm, fb, whole, tol, max_depth);
}

namespace {

// One Simpson panel with its refined (two-half) estimate.  Children reuse
// the parent's five ordinates, so a split costs four new evaluations.
struct Panel {
  double a, m, b;
  double fa, fm, fb;
  double flm, frm;  // ordinates at the half midpoints
  double s;         // coarse Simpson value
  double s2;        // two-half Simpson value
  double err;       // |s2 - s| / 15
  double value() const { return s2 + (s2 - s) / 15.0; }
};

Panel make_panel(const Fn1& g, double a, double m, double b, double fa,
                 double fm, double fb) {
  Panel p;
  p.a = a;
  p.m = m;
  p.b = b;
  p.fa = fa;
  p.fm = fm;
  p.fb = fb;
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  p.flm = g(lm);
  p.frm = g(rm);
  p.s = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double left = (m - a) / 6.0 * (fa + 4.0 * p.flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * p.frm + fb);
  p.s2 = left + right;
  p.err = std::abs(p.s2 - p.s) / 15.0;
  return p;
}

}  // namespace

// Globally adaptive: panels sit in a max-heap keyed by their local error
// estimate and the worst one is split first, so effort concentrates on the
// few panels that matter even when the mass is a narrow bump inside a long
// interval.
double integrate(const Fn1& f, double a, double b, double tol_rel,
                 double floor) {
  if (!(a < b)) return 0.0;
  auto g = [&f](double t) { return finite_or_zero(f(t)); };

  // Initial partition doubles as the scale pass for the relative tolerance
  // target.  A partition that sees only zeros is retried once at a finer
  // resolution so a bump hiding between scan nodes is not silently dropped.
  std::vector<Panel> heap;
  heap.reserve(256);
  double scale = 0.0;
  for (int n0 : {64, 1024}) {
    heap.clear();
    const double h = (b - a) / n0;
    std::vector<double> ford(2 * n0 + 1);
    for (int i = 0; i <= 2 * n0; ++i) ford[i] = g(a + 0.5 * h * i);
    for (int i = 0; i < n0; ++i) {
      double pa = a + h * i, pb = (i == n0 - 1) ? b : a + h * (i + 1);
      Panel p = make_panel(g, pa, 0.5 * (pa + pb), pb, ford[2 * i],
                           ford[2 * i + 1], ford[2 * i + 2]);
      scale += std::abs(p.s2);
      heap.push_back(p);
    }
    if (scale != 0.0) break;
  }
  auto by_err = [](const Panel& x, const Panel& y) {
    if (x.err != y.err) return x.err < y.err;
    return x.a > y.a;
  };
  std::make_heap(heap.begin(), heap.end(), by_err);

  const double tol = tol_rel * std::max(scale, floor);
  double retired = 0.0;     // panels too narrow to split further
  double retired_err = 0.0;
  double live_err = 0.0;
  for (const Panel& p : heap) live_err += p.err;

  const int max_splits = 200000;
  for (int it = 0; it < max_splits && live_err + retired_err > tol; ++it) {
    if (heap.empty()) break;
    std::pop_heap(heap.begin(), heap.end(), by_err);
    Panel p = heap.back();
    heap.pop_back();
    live_err -= p.err;
    const double min_w = 1e-15 * (std::abs(p.a) + std::abs(p.b) + 1e-300);
    if (p.m - p.a <= min_w || p.b - p.m <= min_w || p.err == 0.0) {
      retired += p.value();
      retired_err += p.err;
      continue;
    }
    Panel l = make_panel(g, p.a, 0.5 * (p.a + p.m), p.m, p.fa, p.flm, p.fm);
    Panel r = make_panel(g, p.m, 0.5 * (p.m + p.b), p.b, p.fm, p.frm, p.fb);
    live_err += l.err + r.err;
    heap.push_back(l);
    std::push_heap(heap.begin(), heap.end(), by_err);
    heap.push_back(r);
    std::push_heap(heap.begin(), heap.end(), by_err);
  }
  double total = retired;
  for (const Panel& p : heap) total += p.value();
  return total;
}

double integrate_split(const Fn1& f, double a, double b,
                       const std::vector<double>& breakpoints,
                       double tol_rel) {
  std::vector<double> pts;
  pts.push_back(a);
  for (double p : breakpoints)
    if (p > a && p < b) pts.push_back(p);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    total += integrate(f, pts[i], pts[i + 1], tol_rel);
  return total;
}

double integrate_singular(const Fn1& f, double a, double b,
                          const std::vector<std::pair<double, double>>& sing,
                          double tol_rel) {
  if (!(a < b)) return 0.0;
  std::vector<std::pair<double, double>> s = sing;
  std::sort(s.begin(), s.end());
  std::vector<double> nodes{a};
  for (const auto& p : s)
    if (p.first > a && p.first < b) nodes.push_back(p.first);
  nodes.push_back(b);
  auto beta_at = [&](double t) {
    double beta = 0.0;
    for (const auto& p : s)
      if (std::abs(p.first - t) <= 1e-12 * (1.0 + std::abs(t)))
        beta = std::max(beta, p.second);
    return beta;
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    double s0 = nodes[i], s1 = nodes[i + 1];
    if (!(s0 < s1)) continue;
    double bl = beta_at(s0), br = beta_at(s1);
    if (bl > 0.0 && br > 0.0) {
      double mid = 0.5 * (s0 + s1);
      total += integrate_power_left(f, s0, mid, bl, tol_rel);
      total += integrate_power_right(f, mid, s1, br, tol_rel);
    } else if (bl > 0.0) {
      total += integrate_power_left(f, s0, s1, bl, tol_rel);
    } else if (br > 0.0) {
      total += integrate_power_right(f, s0, s1, br, tol_rel);
    } else {
      total += integrate(f, s0, s1, tol_rel);
    }
  }
  return total;
}

double integrate_power_left(const Fn1& f, double a, double b, double beta,
                            double tol_rel) {
  if (!(a < b)) return 0.0;
  if (beta <= 0.0) return integrate(f, a, b, tol_rel);
  if (beta >= 1.0) throw std::invalid_argument("integrate_power_left: beta must be < 1");
  double q = 1.0 / (1.0 - beta);
  double smax = std::pow(b - a, 1.0 - beta);
  auto h = [&](double s) {
    double t = a + std::pow(s, q);
    double v = f(t);
    if (!std::isfinite(v)) return 0.0;
    return v * q * std::pow(s, q - 1.0);
  };
  // Skip an infinitesimal left sliver where f(a) itself may be +inf; the
  // transformed integrand is bounded there, so the omitted mass is ~ h(0)*d.
  double d = smax * 1e-13;
  return integrate(h, d, smax, tol_rel) + h(d) * d;
}

// Not implemented by reversing integrate_power_left: composing t = a + s^q
// with the reflection a + b - t computes the distance to the singularity as
// a difference of large numbers and the roundoff (ulp of |a| + |b|) swamps
// s^q near the endpoint.  Anchoring the substitution at b keeps that
// distance exact.
double integrate_power_right(const Fn1& f, double a, double b, double beta,
                             double tol_rel) {
  if (!(a < b)) return 0.0;
  if (beta <= 0.0) return integrate(f, a, b, tol_rel);
  if (beta >= 1.0)
    throw std::invalid_argument("integrate_power_right: beta must be < 1");
  double q = 1.0 / (1.0 - beta);
  double smax = std::pow(b - a, 1.0 - beta);
  auto h = [&](double s) {
    double t = b - std::pow(s, q);
    double v = f(t);
    if (!std::isfinite(v)) return 0.0;
    return v * q * std::pow(s, q - 1.0);
  };
  double d = smax * 1e-13;
  return integrate(h, d, smax, tol_rel) + h(d) * d;
}

double integrate_box(const FnN& f, const Eigen::VectorXd& lo,
                     const Eigen::VectorXd& hi, double tol_rel) {
  int n = static_cast<int>(lo.size());
  if (n < 1 || n > 3 || hi.size() != n)
    throw std::invalid_argument("integrate_box: dimension must be 1, 2 or 3");
  if (n == 1) {
    return integrate([&](double x) { return f(Eigen::VectorXd::Constant(1, x)); },
                     lo[0], hi[0], tol_rel);
  }
  if (n == 2) {
    Eigen::VectorXd p(2);
    return integrate(
        [&](double y) {
          return integrate(
              [&](double x) {
                p[0] = x;
                p[1] = y;
                return f(p);
              },
              lo[0], hi[0], tol_rel * 0.25);
        },
        lo[1], hi[1], tol_rel);
  }
  Eigen::VectorXd p(3);
  return integrate(
      [&](double z) {
        return integrate(
            [&](double y) {
              return integrate(
                  [&](double x) {
                    p[0] = x;
                    p[1] = y;
                    p[2] = z;
                    return f(p);
                  },
                  lo[0], hi[0], tol_rel * 0.0625);
            },
            lo[1], hi[1], tol_rel * 0.25);
      },
      lo[2], hi[2], tol_rel);
}

double golden_max(const Fn1& f, double lo, double hi, double tol) {
  const double invphi = 0.6180339887498948482;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  int guard = 200;
  while (b - a > tol && guard-- > 0) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

Bracket bracket_max(const Fn1& f, double t0, double step, double lo_bound,
                    double hi_bound) {
  auto clip = [&](double t) { return std::min(hi_bound, std::max(lo_bound, t)); };
  double c = clip(t0);
  double fc = f(c);
  // If the start is outside the domain, creep toward the middle of the
  // bounds until a finite value appears.
  int guard = 200;
  while (!std::isfinite(fc) && guard-- > 0) {
    c = 0.5 * (c + 0.5 * (lo_bound + hi_bound));
    fc = f(c);
  }
  if (!std::isfinite(fc))
    throw std::runtime_error("bracket_max: no finite starting value");

  double lo = c, hi = c;
  double s = step;
  guard = 400;
  // Grow left end until f decreases (or the bound / domain edge is hit).
  while (guard-- > 0) {
    double cand = clip(lo - s);
    if (cand == lo) break;
    double fv = f(cand);
    if (!std::isfinite(fv)) {
      // Domain edge between cand and lo: halve the step until inside.
      s *= 0.5;
      if (s < 1e-14 * (1.0 + std::abs(lo))) break;
      continue;
    }
    lo = cand;
    if (fv < fc) break;
    fc = fv;
    s *= 2.0;
  }
  s = step;
  double fhi = f(hi);
  guard = 400;
  while (guard-- > 0) {
    double cand = clip(hi + s);
    if (cand == hi) break;
    double fv = f(cand);
    if (!std::isfinite(fv)) {
      s *= 0.5;
      if (s < 1e-14 * (1.0 + std::abs(hi))) break;
      continue;
    }
    hi = cand;
    if (fv < fhi) break;
    fhi = fv;
    s *= 2.0;
  }
  return {lo, hi};
}

double bisect_boundary(const std::function<bool(double)>& pred, double lo,
                       double hi, double tol) {
  if (pred(hi)) return hi;
  int guard = 200;
  while (hi - lo > tol && guard-- > 0) {
    double m = 0.5 * (lo + hi);
    (pred(m) ? lo : hi) = m;
  }
  return 0.5 * (lo + hi);
}

double line_max(const Fn1& f, double lo, double hi, int scan, double* argmax) {
  const double inf = std::numeric_limits<double>::infinity();
  if (!(lo < hi)) {
    double v = f(lo);
    if (argmax) *argmax = lo;
    return std::isfinite(v) ? v : -inf;
  }
  double best = -inf, tb = 0.5 * (lo + hi);
  for (int i = 0; i <= scan; ++i) {
    double t = lo + (hi - lo) * i / scan;
    double v = f(t);
    if (std::isfinite(v) && v > best) {
      best = v;
      tb = t;
    }
  }
  if (!std::isfinite(best)) {
    if (argmax) *argmax = tb;
    return -inf;
  }
  auto g = [&f, inf](double t) {
    double v = f(t);
    return std::isfinite(v) ? v : -inf;
  };
  Bracket br = bracket_max(g, tb, (hi - lo) / scan, lo, hi);
  double t = golden_max(g, br.lo, br.hi, 1e-10 * (1.0 + br.hi - br.lo));
  double v = g(t);
  if (v > best) {
    best = v;
    tb = t;
  }
  if (argmax) *argmax = tb;
  return best;
}

}  // namespace logconc
