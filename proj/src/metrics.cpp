#include "logconc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "logconc/errors.hpp"
#include "logconc/quadrature.hpp"

namespace logconc {

namespace {

const double kGlX[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                        0.5384693101056831, 0.9061798459386640};
const double kGlW[5] = {0.2369268850561891, 0.4786286704993665,
                        0.5688888888888889, 0.4786286704993665,
                        0.2369268850561891};

double gl5(const Fn1& f, double a, double b) {
  double c = 0.5 * (a + b), r = 0.5 * (b - a), s = 0.0;
  for (int k = 0; k < 5; ++k) s += kGlW[k] * f(c + r * kGlX[k]);
  return s * r;
}

// Integration range used for common grids: the grid span for histograms and
// a quantile-trimmed window for exact densities (whose declared support can
// be much wider than where the mass lives).
void grid_range(const Density1D& d, double& lo, double& hi) {
  if (!d.exact) {
    lo = d.left;
    hi = d.right();
    return;
  }
  lo = d.quantile(1e-8);
  hi = d.quantile(1.0 - 1e-8);
  if (!(hi > lo)) {
    lo = d.support_lo;
    hi = d.support_hi;
  }
}

std::vector<std::pair<double, double>> singular_list(const Density1D& d) {
  std::vector<std::pair<double, double>> s;
  for (std::size_t i = 0; i < d.singular_points.size(); ++i) {
    double beta = i < d.singular_powers.size() ? d.singular_powers[i] : 0.0;
    s.emplace_back(d.singular_points[i], beta);
  }
  s.emplace_back(d.support_lo, 0.0);
  s.emplace_back(d.support_hi, 0.0);
  return s;
}

bool has_event_near(const std::vector<std::pair<double, double>>& events,
                    double u0, double u1) {
  double pad = 1e-9 * (1.0 + u1 - u0);
  for (const auto& e : events)
    if (e.first >= u0 - pad && e.first <= u1 + pad) return true;
  return false;
}

// Mass of d over [u0, u1].  Grid densities integrate the interpolant
// exactly; exact densities use GL5 away from singular points.
double cell_mass(const Density1D& d,
                 const std::vector<std::pair<double, double>>& events,
                 double u0, double u1) {
  double lo = d.exact ? d.support_lo : d.left;
  double hi = d.exact ? d.support_hi : d.right();
  u0 = std::max(u0, lo);
  u1 = std::min(u1, hi);
  if (!(u0 < u1)) return 0.0;
  if (!d.exact) return integrate_density(d, u0, u1);
  if (has_event_near(events, u0, u1)) return integrate_density(d, u0, u1);
  return gl5([&](double t) { return d.exact(t); }, u0, u1);
}

}  // namespace

double tv_distance(const Density1D& a, const Density1D& b) {
  auto g = [&](double t) { return std::abs(a.value_at(t) - b.value_at(t)); };
  if (a.exact && b.exact) {
    std::vector<std::pair<double, double>> sing = singular_list(a);
    for (const auto& s : singular_list(b)) sing.push_back(s);
    double lo = std::min(a.support_lo, b.support_lo);
    double hi = std::max(a.support_hi, b.support_hi);
    return integrate_singular(g, lo, hi, sing, 1e-10);
  }
  if (!a.exact && !b.exact) {
    // Both piecewise linear: integrate |difference| exactly, splitting each
    // union-grid segment at its sign crossing.
    std::vector<double> nodes;
    for (int i = 0; i < a.count(); ++i) nodes.push_back(a.left + i * a.step);
    for (int i = 0; i < b.count(); ++i) nodes.push_back(b.left + i * b.step);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      double t0 = nodes[i], t1 = nodes[i + 1];
      if (!(t1 > t0)) continue;
      // Each density jumps to zero at its grid ends, so sample strictly
      // inside the segment and extrapolate the (linear) difference to the
      // segment endpoints.
      double del = 1e-7 * (t1 - t0);
      double da = a.value_at(t0 + del) - b.value_at(t0 + del);
      double db = a.value_at(t1 - del) - b.value_at(t1 - del);
      double slope = (db - da) / (t1 - t0 - 2.0 * del);
      double d0 = da - slope * del, d1 = db + slope * del;
      if (d0 * d1 < 0.0) {
        double r = t0 + (t1 - t0) * d0 / (d0 - d1);
        total += 0.5 * std::abs(d0) * (r - t0) + 0.5 * std::abs(d1) * (t1 - r);
      } else {
        total += 0.5 * (std::abs(d0) + std::abs(d1)) * (t1 - t0);
      }
    }
    return total;
  }
  // Mixed exact/grid pair: cellwise GL5 on a fine union grid, with adaptive
  // fallbacks near singular points.
  const Density1D& ex = a.exact ? a : b;
  const Density1D& gr = a.exact ? b : a;
  double lo_e, hi_e, lo_g, hi_g;
  grid_range(ex, lo_e, hi_e);
  grid_range(gr, lo_g, hi_g);
  double lo = std::min(lo_e, lo_g), hi = std::max(hi_e, hi_g);
  int n = std::max(64, std::min(8192, 4 * gr.count()));
  double h = (hi - lo) / n;
  std::vector<std::pair<double, double>> events = singular_list(ex);
  events.emplace_back(gr.left, 0.0);
  events.emplace_back(gr.right(), 0.0);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double u0 = lo + i * h, u1 = lo + (i + 1) * h;
    if (has_event_near(events, u0, u1))
      total += integrate_singular(g, u0, u1, events, 1e-9);
    else
      total += gl5(g, u0, u1);
  }
  return total;
}

double w1_distance(const Density1D& a, const Density1D& b) {
  double lo_a, hi_a, lo_b, hi_b;
  grid_range(a, lo_a, hi_a);
  grid_range(b, lo_b, hi_b);
  double lo = std::min(lo_a, lo_b), hi = std::max(hi_a, hi_b);
  int n = 4096;
  double h = (hi - lo) / n;
  auto ev_a = singular_list(a);
  auto ev_b = singular_list(b);
  double ha = a.exact ? 0.0 : a.head_mass;
  double hb = b.exact ? 0.0 : b.head_mass;
  double ta = a.exact ? 0.0 : a.tail_mass;
  double tb = b.exact ? 0.0 : b.tail_mass;
  double fa = 0.0, fb = 0.0, total = 0.0;
  auto full = [&](const Density1D& d, double cum, double head, double tail,
                  double t) {
    double v = cum;
    if (!d.exact) {
      if (t >= d.left) v += head;
      if (t >= d.right()) v += tail;
    }
    return v;
  };
  double prev = std::abs(full(a, fa, ha, ta, lo) - full(b, fb, hb, tb, lo));
  for (int i = 0; i < n; ++i) {
    double u0 = lo + i * h, u1 = lo + (i + 1) * h;
    fa += cell_mass(a, ev_a, u0, u1);
    fb += cell_mass(b, ev_b, u0, u1);
    double cur = std::abs(full(a, fa, ha, ta, u1) - full(b, fb, hb, tb, u1));
    total += 0.5 * (prev + cur) * h;
    prev = cur;
  }
  return total;
}

namespace {

// Concave piecewise-linear function on [-1,1], the DP value function of the
// grid LP.  Breakpoints are strictly increasing; values are concave.
struct ConcavePL {
  std::vector<double> x, y;

  void init(double w0) {
    x = {-1.0, 1.0};
    y = {-w0, w0};
  }

  std::pair<int, int> plateau_idx() const {
    int im = 0;
    for (int i = 1; i < (int)y.size(); ++i)
      if (y[i] > y[im]) im = i;
    double tol = 1e-14 * (1.0 + std::abs(y[im]));
    int a = im, b = im;
    while (a > 0 && std::abs(y[a - 1] - y[im]) <= tol) --a;
    while (b + 1 < (int)y.size() && std::abs(y[b + 1] - y[im]) <= tol) ++b;
    return {a, b};
  }

  double interp(const std::vector<double>& px, const std::vector<double>& py,
                double t) const {
    if (t <= px.front()) return py.front();
    if (t >= px.back()) return py.back();
    auto it = std::upper_bound(px.begin(), px.end(), t);
    std::size_t j = it - px.begin();
    double t0 = px[j - 1], t1 = px[j];
    double f = (t - t0) / (t1 - t0);
    return py[j - 1] + f * (py[j] - py[j - 1]);
  }

  // V(phi) <- max over |psi - phi| <= h of V(psi), clipped back to [-1,1].
  void window_max(double h) {
    auto [ia, ib] = plateau_idx();
    std::vector<double> nx, ny;
    nx.reserve(x.size() + 2);
    ny.reserve(x.size() + 2);
    for (int j = 0; j <= ia; ++j) {
      nx.push_back(x[j] - h);
      ny.push_back(y[j]);
    }
    for (int j = ib; j < (int)x.size(); ++j) {
      nx.push_back(x[j] + h);
      ny.push_back(y[j]);
    }
    double vA = interp(nx, ny, -1.0), vB = interp(nx, ny, 1.0);
    std::vector<double> cx{-1.0}, cy{vA};
    for (std::size_t j = 0; j < nx.size(); ++j) {
      if (nx[j] > -1.0 + 1e-15 && nx[j] < 1.0 - 1e-15) {
        if (nx[j] - cx.back() > 1e-15) {
          cx.push_back(nx[j]);
          cy.push_back(ny[j]);
        }
      }
    }
    if (1.0 - cx.back() > 1e-15) {
      cx.push_back(1.0);
      cy.push_back(vB);
    } else {
      cy.back() = vB;
    }
    x = std::move(cx);
    y = std::move(cy);
  }

  void add_linear(double w) {
    for (std::size_t j = 0; j < x.size(); ++j) y[j] += w * x[j];
  }

  double max_value() const {
    double m = y[0];
    for (double v : y) m = std::max(m, v);
    return m;
  }
};

struct LumpedDiff {
  std::vector<double> nodes;  // N+1 positions
  std::vector<double> w;      // signed weights nu_a - nu_b at the nodes
  double h = 0.0;
};

// DP over the node chain: maximize sum w_i phi_i subject to |phi_i| <= 1,
// |phi_{i+1} - phi_i| <= h.  Returns the optimum and a maximizing phi
// recovered from the stored per-step argmax plateaus.
FmResult fm_dp(const LumpedDiff& L) {
  int n = (int)L.w.size();
  FmResult r;
  r.grid = L.nodes;
  r.phi.assign(n, 0.0);
  if (n == 0) return r;
  ConcavePL V;
  V.init(L.w[0]);
  std::vector<std::pair<double, double>> plateaus(n);
  {
    auto [a0, b0] = V.plateau_idx();
    plateaus[0] = {V.x[a0], V.x[b0]};
  }
  for (int i = 1; i < n; ++i) {
    V.window_max(L.h);
    V.add_linear(L.w[i]);
    auto [pa, pb] = V.plateau_idx();
    plateaus[i] = {V.x[pa], V.x[pb]};
  }
  r.value = V.max_value();
  double phi = 0.5 * (plateaus[n - 1].first + plateaus[n - 1].second);
  r.phi[n - 1] = phi;
  for (int i = n - 2; i >= 0; --i) {
    double target = std::min(std::max(phi, plateaus[i].first), plateaus[i].second);
    phi = std::min(std::max(target, phi - L.h), phi + L.h);
    r.phi[i] = phi;
  }
  return r;
}

LumpedDiff lump_densities(const Density1D& a, const Density1D& b, int ncell) {
  double lo_a, hi_a, lo_b, hi_b;
  grid_range(a, lo_a, hi_a);
  grid_range(b, lo_b, hi_b);
  double lo = std::min(lo_a, lo_b), hi = std::max(hi_a, hi_b);
  LumpedDiff L;
  L.h = (hi - lo) / ncell;
  L.nodes.resize(ncell + 1);
  for (int i = 0; i <= ncell; ++i) L.nodes[i] = lo + i * L.h;
  L.w.assign(ncell + 1, 0.0);
  auto ev_a = singular_list(a);
  auto ev_b = singular_list(b);
  for (int i = 0; i < ncell; ++i) {
    double u0 = L.nodes[i], u1 = L.nodes[i + 1];
    double mid = 0.5 * (u0 + u1);
    L.w[i] += cell_mass(a, ev_a, u0, mid) - cell_mass(b, ev_b, u0, mid);
    L.w[i + 1] += cell_mass(a, ev_a, mid, u1) - cell_mass(b, ev_b, mid, u1);
  }
  // Trimmed head/tail fractions of histograms enter as atoms at the nearest
  // node.
  auto add_atom = [&](double pos, double mass) {
    int j = (int)std::lround((pos - lo) / L.h);
    j = std::max(0, std::min(ncell, j));
    L.w[(std::size_t)j] += mass;
  };
  if (!a.exact) {
    add_atom(a.left, a.head_mass);
    add_atom(a.right(), a.tail_mass);
  }
  if (!b.exact) {
    add_atom(b.left, -b.head_mass);
    add_atom(b.right(), -b.tail_mass);
  }
  return L;
}

LumpedDiff lump_samples(const EmpiricalSample1D& a, const EmpiricalSample1D& b,
                        int ncell) {
  double trim = 1e-4;
  double lo = std::min(a.quantile(trim), b.quantile(trim));
  double hi = std::max(a.quantile(1.0 - trim), b.quantile(1.0 - trim));
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  LumpedDiff L;
  L.h = (hi - lo) / ncell;
  L.nodes.resize(ncell + 1);
  for (int i = 0; i <= ncell; ++i) L.nodes[i] = lo + i * L.h;
  L.w.assign(ncell + 1, 0.0);
  // Atoms snap to the nearest node; outliers clamp into the end nodes.
  auto add = [&](const std::vector<double>& v, double unit) {
    for (double t : v) {
      int j = (int)std::lround((t - lo) / L.h);
      j = std::max(0, std::min(ncell, j));
      L.w[(std::size_t)j] += unit;
    }
  };
  add(a.values, 1.0 / double(a.values.size()));
  add(b.values, -1.0 / double(b.values.size()));
  return L;
}

FmResult fm_with_refine(const std::function<LumpedDiff(int)>& build,
                        int ncell) {
  FmResult full = fm_dp(build(ncell));
  FmResult half = fm_dp(build(ncell / 2));
  full.refine_change = std::abs(full.value - half.value);
  full.coarse_flag = full.refine_change > 1e-3;
  return full;
}

}  // namespace

FmResult fm_distance(const Density1D& a, const Density1D& b) {
  return fm_with_refine(
      [&](int n) { return lump_densities(a, b, n); }, 4096);
}

FmResult fm_distance(const EmpiricalSample1D& a, const EmpiricalSample1D& b) {
  std::size_t total = a.values.size() + b.values.size();
  int n = (int)std::lround(std::sqrt(double(total)));
  n = std::max(256, std::min(4096, n));
  return fm_with_refine(
      [&](int m) { return lump_samples(a, b, m); }, n);
}

double shift_modulus(const Density1D& d, double h, double* snapped) {
  double habs = std::abs(h);
  if (d.exact) {
    if (snapped) *snapped = habs;
    if (habs == 0.0) return 0.0;
    auto g = [&](double t) {
      return std::abs(d.value_at(t + habs) - d.value_at(t));
    };
    std::vector<std::pair<double, double>> sing = singular_list(d);
    std::size_t m = sing.size();
    for (std::size_t i = 0; i < m; ++i)
      sing.emplace_back(sing[i].first - habs, sing[i].second);
    double lo = d.support_lo - habs, hi = d.support_hi;
    return integrate_singular(g, lo, hi, sing, 1e-9);
  }
  if (d.step <= 0.0 || d.count() < 2) return 0.0;
  long k = std::lround(habs / d.step);
  if (snapped) *snapped = double(k) * d.step;
  if (k == 0) return 0.0;
  int n = d.count();
  auto val = [&](long i) {
    return (i >= 0 && i < n) ? d.values[(std::size_t)i] : 0.0;
  };
  double s = 0.0;
  for (long j = -k; j < n; ++j) s += std::abs(val(j + k) - val(j));
  return s * d.step;
}

BesovFit besov_fit(const Density1D& d, double alpha,
                   std::vector<double> h_grid) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw config_error("besov_fit: alpha must lie in (0,1]");
  double range = d.exact ? (d.support_hi - d.support_lo)
                         : (d.right() - d.left);
  if (h_grid.empty()) {
    double q16 = d.quantile(0.16), q84 = d.quantile(0.84);
    double s = q84 - q16;
    if (!(s > 0.0)) s = range;
    double lo = d.exact ? 1e-3 * s : d.step;
    double hi = std::min(0.1 * s, 0.25 * range);
    // A histogram of a peaked law with long trimmed tails can leave
    // 0.1 * s below a handful of grid steps; stretch so the snapped shifts
    // still hit enough distinct bin multiples for the fit.
    if (!d.exact) hi = std::min(std::max(0.1 * s, 8.0 * d.step), 0.25 * range);
    if (!(hi > lo)) hi = 0.25 * range;
    int m = 9;
    for (int i = 0; i < m; ++i)
      h_grid.push_back(lo * std::pow(hi / lo, double(i) / (m - 1)));
  }
  BesovFit fit;
  for (double h : h_grid) {
    double snapped = h;
    if (!d.exact) {
      long k = std::lround(h / d.step);
      if (k < 1) continue;
      snapped = double(k) * d.step;
    }
    if (snapped > 0.25 * range + 1e-12 * range) continue;
    bool dup = false;
    for (double hh : fit.h)
      if (std::abs(hh - snapped) <= 1e-12 * (1.0 + snapped)) dup = true;
    if (dup) continue;
    double delta = shift_modulus(d, snapped);
    if (!(delta > 0.0)) continue;
    fit.h.push_back(snapped);
    fit.delta.push_back(delta);
  }
  if (fit.h.size() < 6)
    throw config_error("besov_fit: fewer than 6 usable shift values");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = fit.h.size();
  for (std::size_t i = 0; i < m; ++i) {
    double lx = std::log(fit.h[i]), ly = std::log(fit.delta[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    fit.seminorm = std::max(fit.seminorm,
                            fit.delta[i] / std::pow(fit.h[i], alpha));
  }
  double denom = double(m) * sxx - sx * sx;
  fit.slope = (double(m) * sxy - sx * sy) / denom;
  double icpt = (sy - fit.slope * sx) / double(m);
  double rss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double res = std::log(fit.delta[i]) -
                 (icpt + fit.slope * std::log(fit.h[i]));
    rss += res * res;
  }
  fit.residual = std::sqrt(rss / double(m));
  return fit;
}

double lp_norm(const Density1D& d, double p) {
  if (!(p >= 1.0)) throw config_error("lp_norm: need p >= 1");
  if (d.exact) {
    std::vector<std::pair<double, double>> sing;
    for (std::size_t i = 0; i < d.singular_points.size(); ++i) {
      double beta = i < d.singular_powers.size() ? d.singular_powers[i] : 0.0;
      if (beta * p >= 1.0) return std::numeric_limits<double>::infinity();
      sing.emplace_back(d.singular_points[i], beta * p);
    }
    auto g = [&](double t) {
      double v = d.value_at(t);
      return v > 0.0 ? std::pow(v, p) : 0.0;
    };
    double ip = integrate_singular(g, d.support_lo, d.support_hi, sing, 1e-9);
    return std::pow(ip, 1.0 / p);
  }
  double s = 0.0;
  for (int i = 0; i + 1 < d.count(); ++i) {
    double v0 = std::pow(std::max(0.0, d.values[(std::size_t)i]), p);
    double v1 = std::pow(std::max(0.0, d.values[(std::size_t)i + 1]), p);
    s += 0.5 * (v0 + v1) * d.step;
  }
  return std::pow(s, 1.0 / p);
}

}  // namespace logconc
