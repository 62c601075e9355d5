#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "logconc/errors.hpp"
#include "logconc/measure.hpp"
#include "logconc/quadrature.hpp"
#include "logconc/sampler.hpp"

namespace logconc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& msg) {
  if (!ok) throw config_error(msg);
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
void legendre_rule(int k, std::vector<double>& x, std::vector<double>& w) {
  x.assign(k, 0.0);
  w.assign(k, 0.0);
  for (int i = 0; i < (k + 1) / 2; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (k + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int j = 2; j <= k; ++j) {
        double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = k * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = -t;
    x[k - 1 - i] = t;
    double ww = 2.0 / ((1.0 - t * t) * dp * dp);
    w[i] = ww;
    w[k - 1 - i] = ww;
  }
}

}  // namespace

// -------------------------------------------------------------- moments

MomentResult mean_and_covariance(const LogConcaveMeasure& m,
                                 const MomentBudget& budget) {
  int n = m.dim();
  auto method = budget.method;
  if (method == MomentBudget::Method::Auto) {
    if (m.has_analytic_moments())
      method = MomentBudget::Method::Analytic;
    else if (m.normalized() && n <= 3)
      method = MomentBudget::Method::Quadrature;
    else
      method = MomentBudget::Method::MonteCarlo;
  }

  MomentResult r;
  r.mean_se = Eigen::VectorXd::Zero(n);

  if (method == MomentBudget::Method::Analytic) {
    require(m.has_analytic_moments(),
            "moments: analytic route requested for a custom measure");
    r.mean = m.analytic_mean();
    r.cov = m.analytic_cov();
    r.method = "analytic";
    return r;
  }

  if (method == MomentBudget::Method::Quadrature) {
    require(m.normalized() && n <= 3,
            "moments: quadrature route needs a normalized measure of dimension <= 3");
    Eigen::VectorXd lo, hi;
    m.effective_box(lo, hi);
    r.mean.resize(n);
    for (int i = 0; i < n; ++i)
      r.mean[i] = integrate_box(
          [&](const Eigen::VectorXd& x) { return x[i] * m.density(x); }, lo,
          hi, 1e-8);
    r.cov.resize(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double v = integrate_box(
            [&](const Eigen::VectorXd& x) {
              return (x[i] - r.mean[i]) * (x[j] - r.mean[j]) * m.density(x);
            },
            lo, hi, 1e-8);
        r.cov(i, j) = r.cov(j, i) = v;
      }
    r.method = "quadrature";
    return r;
  }

  SamplerOptions so;
  so.stream = budget.stream;
  so.workers = budget.workers;
  SampleResult s = sample(m, budget.samples, so);
  std::size_t count = budget.samples;
  r.mean = s.points.colwise().mean().transpose();
  Eigen::MatrixXd centered = s.points.rowwise() - r.mean.transpose();
  r.cov = centered.transpose() * centered / double(count - 1);

  // Batch standard errors for both the mean and the covariance entries.
  std::size_t bs = count / 32;
  if (bs < 2)
    throw estimation_error(
        "moments: sample budget too small for batch error estimates "
        "(need at least 64 samples)");
  {
    Eigen::MatrixXd bm(32, n);
    std::vector<Eigen::MatrixXd> bc(32);
    for (int b = 0; b < 32; ++b) {
      auto block = s.points.middleRows(b * bs, bs);
      bm.row(b) = block.colwise().mean();
      Eigen::MatrixXd cb = block.rowwise() - bm.row(b);
      bc[b] = cb.transpose() * cb / double(bs - 1);
    }
    for (int j = 0; j < n; ++j) {
      double mu = bm.col(j).mean();
      double v = (bm.col(j).array() - mu).square().sum() / 31.0;
      r.mean_se[j] = std::sqrt(v / 32.0);
    }
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double mu = 0.0;
        for (int b = 0; b < 32; ++b) mu += bc[b](i, j) / 32.0;
        double v = 0.0;
        for (int b = 0; b < 32; ++b)
          v += (bc[b](i, j) - mu) * (bc[b](i, j) - mu) / 31.0;
        worst = std::max(worst, std::sqrt(v / 32.0));
      }
    r.cov_se = worst;
  }
  r.method = "monte_carlo";

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r.cov);
  double emin = eig.eigenvalues().minCoeff();
  if (!(emin > 0.0) || emin <= 4.0 * r.cov_se)
    throw estimation_error(
        "moments: covariance is not resolved at this sample budget; "
        "increase the sample count");
  return r;
}

std::pair<AffineMap, LogConcaveMeasure> isotropic_normalize(
    const LogConcaveMeasure& m, const MomentBudget& budget) {
  MomentResult r = mean_and_covariance(m, budget);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r.cov);
  double emax = eig.eigenvalues().maxCoeff();
  double emin = eig.eigenvalues().minCoeff();
  if (!(emin > 1e-12 * emax))
    throw degeneracy_error(
        "isotropic_normalize: covariance is numerically singular; the "
        "measure concentrates near a lower-dimensional affine subspace");
  Eigen::VectorXd isqrt = eig.eigenvalues().array().rsqrt();
  Eigen::MatrixXd A =
      eig.eigenvectors() * isqrt.asDiagonal() * eig.eigenvectors().transpose();
  AffineMap T{A, -(A * r.mean)};
  return {T, pushforward(m, T)};
}

double isotropic_constant(const LogConcaveMeasure& m, double rel_tol,
                          const MomentBudget& budget) {
  MomentResult r = mean_and_covariance(m, budget);
  int n = m.dim();
  double L2 = r.cov.trace() / n;
  double L = std::sqrt(L2);
  double dev =
      (r.cov - L2 * Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  double mean_dev = r.mean.cwiseAbs().maxCoeff();
  double mean_slack = r.mean_se.size() ? 4.0 * r.mean_se.maxCoeff() : 0.0;
  if (dev > rel_tol * L2 + 4.0 * r.cov_se || mean_dev > rel_tol * L + mean_slack)
    throw invalid_measure_error(
        "isotropic_constant: the measure is not centered isotropic at the "
        "requested tolerance; apply isotropic_normalize first");
  return L;
}

// ------------------------------------------------------------ max density

MaxDensity max_density(const LogConcaveMeasure& m) {
  MaxDensity out;
  out.argmax = detail::minimize_potential(m);
  out.value = m.density(out.argmax);  // throws if not normalized
  if (!(out.value > 0.0) || !std::isfinite(out.value))
    throw estimation_error("max_density: mode search did not find a finite maximum");
  return out;
}

// -------------------------------------------------------- level set volume

namespace {

// Distance from `base` along `u` to the boundary of {log-density >= thresh}.
double level_radius(const LogConcaveMeasure& m, const Eigen::VectorXd& base,
                    const Eigen::VectorXd& u, double thresh, double scale) {
  auto ok = [&](double t) { return m.log_density(base + t * u) >= thresh; };
  auto chord = support_chord(m.support(), base, u);
  double tmax = std::min(chord.second, 1e12);
  if (tmax <= 0.0) return 0.0;
  double t = std::min(0.5 * scale, 0.5 * tmax);
  int guard = 200;
  while (ok(t) && guard-- > 0) {
    if (t >= tmax * (1.0 - 1e-13)) return tmax;  // level set reaches support edge
    t = std::min(2.0 * t, tmax);
  }
  if (guard <= 0)
    throw estimation_error("level_set_volume: radial expansion did not terminate");
  double lo = ok(t) ? t : 0.0, hi = ok(t) ? tmax : t;
  int it = 100;
  while (hi - lo > 1e-11 * (1.0 + hi) && it-- > 0) {
    double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

LevelSet level_set_volume(const LogConcaveMeasure& m, double tau,
                          int angular_resolution) {
  int n = m.dim();
  require(tau > 0.0, "level_set_volume: tau must be positive");
  require(n <= 3, "level_set_volume: only dimensions 1 to 3 are supported");
  MaxDensity md = max_density(m);
  double thresh = std::log(md.value) - tau;
  double scale = m.length_scale();
  LevelSet out;

  if (n == 1) {
    Eigen::VectorXd up = Eigen::VectorXd::Ones(1), dn = -up;
    double rp = level_radius(m, md.argmax, up, thresh, scale);
    double rm = level_radius(m, md.argmax, dn, thresh, scale);
    out.volume = rp + rm;
    out.radius = std::max(std::abs(md.argmax[0] + rp), std::abs(md.argmax[0] - rm));
    out.refine_change = 0.0;
    return out;
  }

  if (n == 2) {
    int N = angular_resolution > 0 ? angular_resolution : 1024;
    if (N % 2) ++N;
    std::vector<double> r(N);
    double radius = 0.0;
    for (int k = 0; k < N; ++k) {
      double th = 2.0 * M_PI * k / N;
      Eigen::VectorXd u(2);
      u << std::cos(th), std::sin(th);
      r[k] = level_radius(m, md.argmax, u, thresh, scale);
      radius = std::max(radius, (md.argmax + r[k] * u).norm());
    }
    double v_full = 0.0, v_half = 0.0;
    for (int k = 0; k < N; ++k) {
      v_full += 0.5 * r[k] * r[k] * (2.0 * M_PI / N);
      if (k % 2 == 0) v_half += 0.5 * r[k] * r[k] * (2.0 * M_PI / (N / 2));
    }
    out.volume = v_full;
    out.radius = radius;
    out.refine_change = std::abs(v_full - v_half) / std::max(v_full, 1e-300);
    if (out.refine_change > 0.01)
      throw estimation_error(
          "level_set_volume: angular grid is too coarse for this level set");
    return out;
  }

  int K = angular_resolution > 0 ? angular_resolution : 48;
  auto sweep = [&](int k, double& radius) {
    std::vector<double> xs, ws;
    legendre_rule(k, xs, ws);
    int nphi = 2 * k;
    double vol = 0.0;
    for (int i = 0; i < k; ++i) {
      double c = xs[i], s = std::sqrt(std::max(0.0, 1.0 - c * c));
      for (int j = 0; j < nphi; ++j) {
        double ph = 2.0 * M_PI * (j + 0.5) / nphi;
        Eigen::VectorXd u(3);
        u << s * std::cos(ph), s * std::sin(ph), c;
        double r = level_radius(m, md.argmax, u, thresh, scale);
        radius = std::max(radius, (md.argmax + r * u).norm());
        vol += ws[i] * (2.0 * M_PI / nphi) * r * r * r / 3.0;
      }
    }
    return vol;
  };
  double radius = 0.0;
  double v_full = sweep(K, radius);
  double dummy = 0.0;
  double v_half = sweep(K / 2, dummy);
  out.volume = v_full;
  out.radius = radius;
  out.refine_change = std::abs(v_full - v_half) / std::max(v_full, 1e-300);
  if (out.refine_change > 0.01)
    throw estimation_error(
        "level_set_volume: angular grid is too coarse for this level set");
  return out;
}

// ------------------------------------------------------------ skorohod norm

double skorohod_norm(const LogConcaveMeasure& m, const Eigen::VectorXd& e,
                     double tol_rel) {
  int n = m.dim();
  require(e.size() == n, "skorohod_norm: direction has the wrong dimension");
  double enorm = e.norm();
  require(enorm > 0.0, "skorohod_norm: direction must be nonzero");
  Eigen::VectorXd u = e / enorm;

  if (n == 1) return 2.0 * max_density(m).value;
  require(n <= 3, "skorohod_norm: only dimensions 1 to 3 are supported");

  // Orthonormal basis with u as the first column.
  Eigen::MatrixXd U(n, 1);
  U.col(0) = u;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(U);
  Eigen::MatrixXd Q = qr.householderQ();
  if (Q.col(0).dot(u) < 0.0) Q = -Q;

  Eigen::VectorXd base = detail::minimize_potential(m);
  Eigen::VectorXd lo, hi;
  m.effective_box(lo, hi);
  double diam = (hi - lo).norm();

  // Integration half-ranges along the transverse basis vectors, from the
  // projection of the effective box.
  std::vector<double> half(n - 1), offset(n - 1);
  Eigen::VectorXd boxc = 0.5 * (lo + hi), boxw = 0.5 * (hi - lo);
  for (int j = 1; j < n; ++j) {
    double h = 0.0;
    for (int i = 0; i < n; ++i) h += std::abs(Q(i, j)) * boxw[i];
    half[j - 1] = h;
    offset[j - 1] = Q.col(j).dot(boxc - base);
  }

  auto profile = [&](const Eigen::VectorXd& y) {
    Eigen::VectorXd x0 = base;
    for (int j = 1; j < n; ++j) x0 += y[j - 1] * Q.col(j);
    auto chord = support_chord(m.support(), x0, u);
    double a = std::max(chord.first, -diam), b = std::min(chord.second, diam);
    if (!(a < b)) return 0.0;  // the line misses the support
    double v = line_max([&](double t) { return m.log_density(x0 + t * u); }, a, b);
    return std::isfinite(v) ? std::exp(v) : 0.0;
  };

  double I = 0.0;
  if (n == 2) {
    I = integrate(
        [&](double y) {
          Eigen::VectorXd yy(1);
          yy << y;
          return profile(yy);
        },
        offset[0] - half[0], offset[0] + half[0], tol_rel);
  } else {
    I = integrate(
        [&](double z) {
          return integrate(
              [&](double y) {
                Eigen::VectorXd yy(2);
                yy << y, z;
                return profile(yy);
              },
              offset[0] - half[0], offset[0] + half[0], tol_rel * 0.25);
        },
        offset[1] - half[1], offset[1] + half[1], tol_rel);
  }
  return 2.0 * I;
}

// ------------------------------------------------------------ envelope fit

double envelope_fit(const LogConcaveMeasure& m, double alpha) {
  int n = m.dim();
  require(alpha > 0.0, "envelope_fit: alpha must be positive");
  require(n <= 3, "envelope_fit: only dimensions 1 to 3 are supported");

  Eigen::VectorXd lo, hi;
  m.effective_box(lo, hi);
  double rcap = 1.5 * std::max((hi - lo).norm(), 1e-6) +
                lo.cwiseAbs().maxCoeff() + hi.cwiseAbs().maxCoeff();

  auto ray_value = [&](const Eigen::VectorXd& u, double* arg) {
    auto chord = support_chord(m.support(), Eigen::VectorXd::Zero(n), u);
    double rhi = std::min({chord.second, rcap, 1e12});
    if (rhi <= 0.0) return -kInf;
    double a = std::max(chord.first, 0.0);
    return line_max(
        [&](double r) { return m.log_density(r * u) + alpha * r; }, a, rhi, 48,
        arg);
  };
  auto diverges = [&](const Eigen::VectorXd& u) {
    // Unbounded directions only: compare the objective near the cap.
    auto chord = support_chord(m.support(), Eigen::VectorXd::Zero(n), u);
    if (chord.second < 1e11) return false;
    auto phi = [&](double r) { return m.log_density(r * u) + alpha * r; };
    double v1 = phi(0.8 * rcap), v2 = phi(rcap);
    // Strictly increasing at the cap: the supremum runs away to infinity.
    // (At the critical decay rate the objective is asymptotically flat and
    // the supremum is finite, so equality does not count.)
    return std::isfinite(v2) && v2 > v1 + 1e-9 * (1.0 + std::abs(v2)) &&
           v2 > -700.0;
  };

  std::vector<Eigen::VectorXd> dirs;
  if (n == 1) {
    dirs.push_back(Eigen::VectorXd::Constant(1, 1.0));
    dirs.push_back(Eigen::VectorXd::Constant(1, -1.0));
  } else if (n == 2) {
    for (int k = 0; k < 512; ++k) {
      double th = 2.0 * M_PI * k / 512;
      Eigen::VectorXd u(2);
      u << std::cos(th), std::sin(th);
      dirs.push_back(u);
    }
  } else {
    // Fibonacci sphere
    int K = 1024;
    double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < K; ++k) {
      double z = 1.0 - 2.0 * (k + 0.5) / K;
      double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
      double th = golden * k;
      Eigen::VectorXd u(3);
      u << rad * std::cos(th), rad * std::sin(th), z;
      dirs.push_back(u);
    }
  }

  double best = -kInf;
  Eigen::VectorXd best_u;
  for (const auto& u : dirs) {
    if (diverges(u)) return kInf;
    double v = ray_value(u, nullptr);
    if (v > best) {
      best = v;
      best_u = u;
    }
  }
  if (!std::isfinite(best))
    throw estimation_error("envelope_fit: no finite density values found");

  // Angular polish around the best direction.
  if (n == 2) {
    double th0 = std::atan2(best_u[1], best_u[0]);
    double w = 2.0 * M_PI / 512;
    auto val = [&](double th) {
      Eigen::VectorXd u(2);
      u << std::cos(th), std::sin(th);
      return ray_value(u, nullptr);
    };
    double th = golden_max(val, th0 - w, th0 + w, 1e-10);
    best = std::max(best, val(th));
  } else if (n == 3) {
    double th0 = std::atan2(best_u[1], best_u[0]);
    double ph0 = std::acos(std::clamp(best_u[2], -1.0, 1.0));
    double w = 2.0 * std::sqrt(4.0 * M_PI / 1024);
    auto val = [&](double th, double ph) {
      Eigen::VectorXd u(3);
      u << std::sin(ph) * std::cos(th), std::sin(ph) * std::sin(th), std::cos(ph);
      return ray_value(u, nullptr);
    };
    double th = th0, ph = ph0;
    for (int round = 0; round < 4; ++round) {
      th = golden_max([&](double t) { return val(t, ph); }, th - w, th + w, 1e-9);
      ph = golden_max([&](double p) { return val(th, p); }, ph - w, ph + w, 1e-9);
      w *= 0.35;
    }
    best = std::max(best, val(th, ph));
  }
  return std::exp(best);
}

}  // namespace logconc
