#include "logconc/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "logconc/errors.hpp"
#include "logconc/quadrature.hpp"

namespace logconc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& msg) {
  if (!ok) throw config_error(msg);
}

double log_ball_volume(int n, double r) {
  return n * std::log(r) + 0.5 * n * std::log(M_PI) - std::lgamma(0.5 * n + 1.0);
}

}  // namespace

std::pair<double, double> support_chord(const Support& s,
                                        const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& d) {
  const double big = 1e12;
  double lo = -big, hi = big;
  if (s.kind == SupportKind::Box) {
    for (int i = 0; i < x.size(); ++i) {
      double a = s.center[i] - s.half_widths[i] - x[i];
      double b = s.center[i] + s.half_widths[i] - x[i];
      if (d[i] == 0.0) {
        if (x[i] < s.center[i] - s.half_widths[i] ||
            x[i] > s.center[i] + s.half_widths[i])
          return {0.0, 0.0};
        continue;
      }
      double t0 = a / d[i], t1 = b / d[i];
      if (t0 > t1) std::swap(t0, t1);
      lo = std::max(lo, t0);
      hi = std::min(hi, t1);
    }
  } else if (s.kind == SupportKind::Ball) {
    Eigen::VectorXd u = x - s.center;
    double a = d.squaredNorm();
    double b = 2.0 * d.dot(u);
    double c = u.squaredNorm() - s.radius * s.radius;
    if (a == 0.0) return c <= 0.0 ? std::make_pair(-big, big) : std::make_pair(0.0, 0.0);
    double disc = b * b - 4.0 * a * c;
    if (disc <= 0.0) return {0.0, 0.0};
    double sq = std::sqrt(disc);
    lo = (-b - sq) / (2.0 * a);
    hi = (-b + sq) / (2.0 * a);
  }
  if (lo > hi) return {0.0, 0.0};
  return {lo, hi};
}

// ---------------------------------------------------------------- AffineMap

AffineMap AffineMap::inverse() const {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible())
    throw degeneracy_error("affine map is singular and cannot be inverted");
  Eigen::MatrixXd Ainv = lu.inverse();
  return {Ainv, -(Ainv * b)};
}

AffineMap AffineMap::after(const AffineMap& inner) const {
  return {A * inner.A, A * inner.b + b};
}

double AffineMap::log_abs_det() const {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible())
    throw degeneracy_error("affine map is singular");
  double s = 0.0;
  for (int i = 0; i < A.rows(); ++i)
    s += std::log(std::abs(lu.matrixLU()(i, i)));
  return s;
}

AffineMap AffineMap::identity(int n) {
  return {Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Zero(n)};
}

// ------------------------------------------------------------------ Support

Support Support::box(Eigen::VectorXd center, Eigen::VectorXd half_widths) {
  require(center.size() == half_widths.size(),
          "support box: center and half_widths must have equal length");
  require((half_widths.array() > 0.0).all(),
          "support box: half widths must be positive");
  Support s;
  s.kind = SupportKind::Box;
  s.center = std::move(center);
  s.half_widths = std::move(half_widths);
  return s;
}

Support Support::ball(Eigen::VectorXd center, double radius) {
  require(radius > 0.0, "support ball: radius must be positive");
  Support s;
  s.kind = SupportKind::Ball;
  s.center = std::move(center);
  s.radius = radius;
  return s;
}

bool Support::contains(const Eigen::VectorXd& x) const {
  switch (kind) {
    case SupportKind::AllSpace:
      return true;
    case SupportKind::Box:
      return ((x - center).array().abs() <= half_widths.array() * (1.0 + 1e-15) + 1e-300)
          .all();
    case SupportKind::Ball:
      return (x - center).norm() <= radius * (1.0 + 1e-15);
  }
  return false;
}

// -------------------------------------------------------------- factories

LogConcaveMeasure LogConcaveMeasure::standard_gaussian(int dim) {
  return gaussian(Eigen::VectorXd::Zero(dim),
                  Eigen::MatrixXd::Identity(dim, dim));
}

LogConcaveMeasure LogConcaveMeasure::gaussian(Eigen::VectorXd mean,
                                              Eigen::MatrixXd cov) {
  int n = static_cast<int>(mean.size());
  require(n >= 1 && n <= 16, "gaussian: dimension must be between 1 and 16");
  require(cov.rows() == n && cov.cols() == n,
          "gaussian: covariance shape does not match the mean");
  double scale = std::max(1e-300, cov.cwiseAbs().maxCoeff());
  require((cov - cov.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
          "gaussian: covariance must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw degeneracy_error("gaussian: covariance is not positive definite");

  LogConcaveMeasure m;
  m.dim_ = n;
  m.family_ = Family::Gaussian;
  m.mean_ = std::move(mean);
  m.cov_ = std::move(cov);
  m.chol_ = llt.matrixL();
  m.cov_inv_ = llt.solve(Eigen::MatrixXd::Identity(n, n));
  double logdet = 0.0;
  for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(m.chol_(i, i));
  m.gauss_log_norm_ = 0.5 * (n * std::log(2.0 * M_PI) + logdet);
  m.interior_ = m.mean_;
  return m;
}

LogConcaveMeasure LogConcaveMeasure::uniform_box(Eigen::VectorXd center,
                                                 Eigen::VectorXd half_widths) {
  int n = static_cast<int>(center.size());
  require(n >= 1 && n <= 16, "uniform_box: dimension must be between 1 and 16");
  LogConcaveMeasure m;
  m.dim_ = n;
  m.family_ = Family::UniformBox;
  m.support_ = Support::box(center, half_widths);
  m.log_volume_ = (2.0 * m.support_.half_widths.array()).log().sum();
  m.interior_ = m.support_.center;
  return m;
}

LogConcaveMeasure LogConcaveMeasure::uniform_cube(int dim, double side) {
  require(side > 0.0, "uniform_cube: side must be positive");
  return uniform_box(Eigen::VectorXd::Zero(dim),
                     Eigen::VectorXd::Constant(dim, 0.5 * side));
}

LogConcaveMeasure LogConcaveMeasure::uniform_ball(int dim,
                                                  Eigen::VectorXd center,
                                                  double radius) {
  require(dim >= 1 && dim <= 16, "uniform_ball: dimension must be between 1 and 16");
  require(center.size() == dim, "uniform_ball: center has the wrong length");
  LogConcaveMeasure m;
  m.dim_ = dim;
  m.family_ = Family::UniformBall;
  m.support_ = Support::ball(std::move(center), radius);
  m.log_volume_ = log_ball_volume(dim, radius);
  m.interior_ = m.support_.center;
  return m;
}

LogConcaveMeasure LogConcaveMeasure::product_exponential(Eigen::VectorXd rates) {
  int n = static_cast<int>(rates.size());
  require(n >= 1 && n <= 16,
          "product_exponential: dimension must be between 1 and 16");
  require((rates.array() > 0.0).all(),
          "product_exponential: rates must be positive");
  LogConcaveMeasure m;
  m.dim_ = n;
  m.family_ = Family::ProductExponential;
  m.rates_ = std::move(rates);
  m.interior_ = Eigen::VectorXd::Zero(n);
  return m;
}

// ---------------------------------------------------------------- potential

double LogConcaveMeasure::potential(const Eigen::VectorXd& x) const {
  if (x.size() != dim_)
    throw config_error("potential: point has the wrong dimension");
  if (!support_.contains(x)) return kInf;
  switch (family_) {
    case Family::Gaussian: {
      Eigen::VectorXd u = x - mean_;
      return 0.5 * u.dot(cov_inv_ * u) + gauss_log_norm_;
    }
    case Family::UniformBox:
    case Family::UniformBall:
      return log_volume_;
    case Family::ProductExponential: {
      double v = 0.0;
      for (int i = 0; i < dim_; ++i)
        v += rates_[i] * std::abs(x[i]) - std::log(0.5 * rates_[i]);
      return v;
    }
    case Family::Custom:
      return potential_fn_(x);
  }
  return kInf;
}

double LogConcaveMeasure::log_density(const Eigen::VectorXd& x) const {
  if (!has_log_norm_)
    throw config_error(
        "density values are unavailable: the measure is not normalized "
        "(custom potentials are only normalized up to dimension 3)");
  return -potential(x) - log_norm_;
}

double LogConcaveMeasure::density(const Eigen::VectorXd& x) const {
  double l = log_density(x);
  return std::isfinite(l) ? std::exp(l) : 0.0;
}

// --------------------------------------------------------- analytic moments

Eigen::VectorXd LogConcaveMeasure::analytic_mean() const {
  switch (family_) {
    case Family::Gaussian:
      return mean_;
    case Family::UniformBox:
    case Family::UniformBall:
      return support_.center;
    case Family::ProductExponential:
      return Eigen::VectorXd::Zero(dim_);
    case Family::Custom:
      break;
  }
  throw config_error("analytic moments are unavailable for custom measures");
}

Eigen::MatrixXd LogConcaveMeasure::analytic_cov() const {
  switch (family_) {
    case Family::Gaussian:
      return cov_;
    case Family::UniformBox:
      return (support_.half_widths.array().square() / 3.0)
          .matrix()
          .asDiagonal();
    case Family::UniformBall:
      return (support_.radius * support_.radius / (dim_ + 2.0)) *
             Eigen::MatrixXd::Identity(dim_, dim_);
    case Family::ProductExponential:
      return (2.0 / rates_.array().square()).matrix().asDiagonal();
    case Family::Custom:
      break;
  }
  throw config_error("analytic moments are unavailable for custom measures");
}

// -------------------------------------------------------------- geometry

void LogConcaveMeasure::effective_box(Eigen::VectorXd& lo,
                                      Eigen::VectorXd& hi) const {
  switch (family_) {
    case Family::Gaussian: {
      Eigen::VectorXd sd = cov_.diagonal().array().sqrt();
      lo = mean_ - 13.5 * sd;
      hi = mean_ + 13.5 * sd;
      return;
    }
    case Family::UniformBox:
      lo = support_.center - support_.half_widths;
      hi = support_.center + support_.half_widths;
      return;
    case Family::UniformBall:
      lo = support_.center.array() - support_.radius;
      hi = support_.center.array() + support_.radius;
      return;
    case Family::ProductExponential:
      lo = -45.0 / rates_.array();
      hi = 45.0 / rates_.array();
      return;
    case Family::Custom:
      lo = quad_lo_;
      hi = quad_hi_;
      return;
  }
}

double LogConcaveMeasure::length_scale() const {
  switch (family_) {
    case Family::Gaussian:
      return std::sqrt(cov_.diagonal().maxCoeff());
    case Family::UniformBox:
      return support_.half_widths.maxCoeff() / std::sqrt(3.0);
    case Family::UniformBall:
      return support_.radius / std::sqrt(dim_ + 2.0);
    case Family::ProductExponential:
      return std::sqrt(2.0) / rates_.minCoeff();
    case Family::Custom:
      return std::max((quad_hi_ - quad_lo_).maxCoeff() / 20.0, 1e-12);
  }
  return 1.0;
}

// -------------------------------------------------------------- accessors

const Eigen::VectorXd& LogConcaveMeasure::gaussian_mean() const {
  require(family_ == Family::Gaussian, "not a gaussian measure");
  return mean_;
}
const Eigen::MatrixXd& LogConcaveMeasure::gaussian_cov() const {
  require(family_ == Family::Gaussian, "not a gaussian measure");
  return cov_;
}
const Eigen::MatrixXd& LogConcaveMeasure::gaussian_chol() const {
  require(family_ == Family::Gaussian, "not a gaussian measure");
  return chol_;
}
const Eigen::VectorXd& LogConcaveMeasure::exp_rates() const {
  require(family_ == Family::ProductExponential,
          "not a product exponential measure");
  return rates_;
}

// ------------------------------------------------------------------ custom

namespace {

// Cyclic coordinate maximization of -V from the interior point.  Assumes the
// potential is convex (coordinate-wise smooth or separable at kinks).
Eigen::VectorXd locate_mode(const std::function<double(const Eigen::VectorXd&)>& V,
                            const Support& sup, Eigen::VectorXd x) {
  int n = static_cast<int>(x.size());
  std::vector<double> step(n, 1.0);
  double best = -V(x);
  for (int cycle = 0; cycle < 80; ++cycle) {
    bool improved = false;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd d = Eigen::VectorXd::Unit(n, i);
      auto g = [&](double t) {
        Eigen::VectorXd y = x + t * d;
        if (!sup.contains(y)) return -kInf;
        double v = V(y);
        return std::isfinite(v) ? -v : -kInf;
      };
      auto [tlo, thi] = support_chord(sup, x, d);
      if (tlo == thi) continue;
      Bracket br = bracket_max(g, 0.0, step[i], tlo, thi);
      double span = std::max(br.hi - br.lo, 1e-14);
      double t = golden_max(g, br.lo, br.hi, 1e-10 * (1.0 + span));
      double v = g(t);
      if (v > best + 1e-13 * (1.0 + std::abs(best))) {
        best = v;
        x += t * d;
        improved = true;
      }
      step[i] = std::clamp(std::abs(t) * 2.0 + 0.25 * step[i], 1e-9, 1e6);
    }
    if (!improved) break;
  }
  return x;
}

}  // namespace

LogConcaveMeasure LogConcaveMeasure::custom(
    int dim, std::function<double(const Eigen::VectorXd&)> potential,
    Eigen::VectorXd interior_point, Support support, bool validate_convexity) {
  require(dim >= 1 && dim <= 16, "custom: dimension must be between 1 and 16");
  require(static_cast<int>(interior_point.size()) == dim,
          "custom: interior point has the wrong length");
  if (support.kind != SupportKind::AllSpace)
    require(static_cast<int>(support.center.size()) == dim,
            "custom: support dimension mismatch");
  require(support.contains(interior_point),
          "custom: interior point lies outside the support");
  double v0 = potential(interior_point);
  require(std::isfinite(v0),
          "custom: potential must be finite at the interior point");

  LogConcaveMeasure m;
  m.dim_ = dim;
  m.family_ = Family::Custom;
  m.support_ = std::move(support);
  m.potential_fn_ = std::move(potential);
  m.interior_ = interior_point;
  m.has_log_norm_ = false;

  const auto& V = m.potential_fn_;
  Eigen::VectorXd mode = locate_mode(V, m.support_, interior_point);
  double vmin = V(mode);

  // Per-axis extent: where the potential has risen by 60 (density factor
  // exp(-60)), or the support boundary, whichever comes first.
  m.quad_lo_.resize(dim);
  m.quad_hi_.resize(dim);
  for (int i = 0; i < dim; ++i) {
    Eigen::VectorXd d = Eigen::VectorXd::Unit(dim, i);
    for (int sgn : {-1, 1}) {
      auto chord = support_chord(m.support_, mode, sgn * d);
      double tmax = std::max(chord.second, 0.0);
      double t = 1.0, reached = tmax;
      bool rose = false;
      while (t <= tmax) {
        Eigen::VectorXd y = mode + sgn * t * d;
        double v = m.support_.contains(y) ? V(y) : kInf;
        if (v >= vmin + 60.0) {
          reached = t;
          rose = true;
          break;
        }
        t *= 2.0;
      }
      if (!rose && tmax >= 1e9)
        throw config_error(
            "custom: potential grows too slowly along an axis; the measure "
            "does not appear normalizable");
      double ext = rose ? reached : tmax;
      (sgn < 0 ? m.quad_lo_[i] : m.quad_hi_[i]) = mode[i] + sgn * ext;
    }
  }

  if (dim <= 3) {
    // Expand the box until the potential is large on all corners and face
    // centers, so mass outside the box is negligible for quadrature.
    bool ok = false;
    for (int round = 0; round < 60 && !ok; ++round) {
      ok = true;
      std::vector<Eigen::VectorXd> probes;
      int corners = 1 << dim;
      for (int c = 0; c < corners; ++c) {
        Eigen::VectorXd p(dim);
        for (int i = 0; i < dim; ++i)
          p[i] = (c >> i) & 1 ? m.quad_hi_[i] : m.quad_lo_[i];
        probes.push_back(p);
      }
      for (int i = 0; i < dim; ++i) {
        Eigen::VectorXd p = 0.5 * (m.quad_lo_ + m.quad_hi_);
        p[i] = m.quad_lo_[i];
        probes.push_back(p);
        p[i] = m.quad_hi_[i];
        probes.push_back(p);
      }
      for (const auto& p : probes) {
        double v = m.support_.contains(p) ? V(p) : kInf;
        if (v < vmin + 50.0) {
          ok = false;
          break;
        }
      }
      if (!ok) {
        Eigen::VectorXd lo = m.quad_lo_, hi = m.quad_hi_;
        m.quad_lo_ = mode - 1.6 * (mode - lo);
        m.quad_hi_ = mode + 1.6 * (hi - mode);
        if (m.support_.kind == SupportKind::Box) {
          m.quad_lo_ = m.quad_lo_.cwiseMax(m.support_.center - m.support_.half_widths);
          m.quad_hi_ = m.quad_hi_.cwiseMin(m.support_.center + m.support_.half_widths);
        }
      }
    }
    if (!ok)
      throw config_error(
          "custom: density mass does not concentrate in a bounded box; the "
          "potential may not be normalizable");
  }

  if (validate_convexity) {
    SeededStream st(0x5eedf00dULL, 7);
    int checked = 0;
    for (int k = 0; k < 96 && checked < 48; ++k) {
      Eigen::VectorXd a(dim), b(dim);
      for (int i = 0; i < dim; ++i) {
        a[i] = m.quad_lo_[i] + st.uniform01() * (m.quad_hi_[i] - m.quad_lo_[i]);
        b[i] = m.quad_lo_[i] + st.uniform01() * (m.quad_hi_[i] - m.quad_lo_[i]);
      }
      if (!m.support_.contains(a) || !m.support_.contains(b)) continue;
      double va = V(a), vb = V(b);
      if (!std::isfinite(va) || !std::isfinite(vb)) continue;
      ++checked;
      for (double t : {0.25, 0.5, 0.75}) {
        double lhs = V(t * a + (1.0 - t) * b);
        double rhs = t * va + (1.0 - t) * vb;
        if (lhs > rhs + 1e-8 * (1.0 + std::abs(va) + std::abs(vb)))
          throw invalid_measure_error(
              "custom: potential failed a midpoint convexity probe");
      }
    }
  }

  if (dim <= 3) {
    auto g = [&](const Eigen::VectorXd& x) {
      double v = m.support_.contains(x) ? V(x) : kInf;
      return std::isfinite(v) ? std::exp(-(v - vmin)) : 0.0;
    };
    double I = integrate_box(g, m.quad_lo_, m.quad_hi_, 1e-9);
    if (!(I > 0.0) || !std::isfinite(I))
      throw config_error("custom: normalization integral did not converge");
    m.log_norm_ = std::log(I) - vmin;
    m.has_log_norm_ = true;
  }
  return m;
}

namespace detail {

Eigen::VectorXd minimize_potential(const LogConcaveMeasure& m) {
  if (m.has_analytic_moments()) return m.analytic_mean();
  auto V = [&m](const Eigen::VectorXd& x) { return m.potential(x); };
  return locate_mode(V, m.support(), m.interior_point());
}

}  // namespace detail

// ------------------------------------------------------------- pushforward

LogConcaveMeasure pushforward(const LogConcaveMeasure& m, const AffineMap& T) {
  int n = m.dim();
  require(T.A.rows() == n && T.A.cols() == n && T.b.size() == n,
          "pushforward: affine map shape does not match the measure");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(T.A);
  if (!lu.isInvertible())
    throw degeneracy_error("pushforward: affine map is singular");
  double logdet = 0.0;
  for (int i = 0; i < n; ++i)
    logdet += std::log(std::abs(lu.matrixLU()(i, i)));

  double amax = T.A.cwiseAbs().maxCoeff();
  bool diag = true;
  for (int i = 0; i < n && diag; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && std::abs(T.A(i, j)) > 1e-14 * amax) {
        diag = false;
        break;
      }

  switch (m.family()) {
    case Family::Gaussian:
      return LogConcaveMeasure::gaussian(
          T(m.gaussian_mean()), T.A * m.gaussian_cov() * T.A.transpose());
    case Family::UniformBox:
      if (diag) {
        Eigen::VectorXd w = T.A.diagonal().cwiseAbs().cwiseProduct(
            m.support().half_widths);
        return LogConcaveMeasure::uniform_box(T(m.support().center), w);
      }
      break;
    case Family::UniformBall: {
      Eigen::MatrixXd gram = T.A.transpose() * T.A;
      double s2 = gram.trace() / n;
      if ((gram - s2 * Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <=
          1e-12 * std::max(s2, 1e-300)) {
        return LogConcaveMeasure::uniform_ball(n, T(m.support().center),
                                               std::sqrt(s2) * m.support().radius);
      }
      break;
    }
    case Family::ProductExponential:
      if (diag && T.b.cwiseAbs().maxCoeff() == 0.0) {
        Eigen::VectorXd r =
            m.exp_rates().cwiseQuotient(T.A.diagonal().cwiseAbs());
        return LogConcaveMeasure::product_exponential(r);
      }
      break;
    case Family::Custom:
      break;
  }

  // Generic path: transport the potential through the inverse map.
  AffineMap Tinv = T.inverse();
  LogConcaveMeasure orig = m;  // capture a private copy
  LogConcaveMeasure out;
  out.dim_ = n;
  out.family_ = Family::Custom;
  out.support_ = Support::all_space();
  out.potential_fn_ = [orig, Tinv, logdet](const Eigen::VectorXd& y) {
    return orig.potential(Tinv(y)) + logdet;
  };
  out.interior_ = T(m.interior_point());

  Eigen::VectorXd mlo, mhi;
  m.effective_box(mlo, mhi);
  out.quad_lo_.resize(n);
  out.quad_hi_.resize(n);
  for (int i = 0; i < n; ++i) {
    double lo = T.b[i], hi = T.b[i];
    for (int j = 0; j < n; ++j) {
      double a = T.A(i, j) * mlo[j], b = T.A(i, j) * mhi[j];
      lo += std::min(a, b);
      hi += std::max(a, b);
    }
    out.quad_lo_[i] = lo;
    out.quad_hi_[i] = hi;
  }
  out.has_log_norm_ = m.normalized();
  out.log_norm_ = m.family() == Family::Custom && m.normalized() ? m.log_norm_ : 0.0;
  return out;
}

}  // namespace logconc
