#include <algorithm>
#include <cmath>

#include "logconc/errors.hpp"
#include "logconc/measure.hpp"
#include "logconc/polynomial.hpp"
#include "logconc/sampler.hpp"

namespace logconc {

namespace {

// Mean and variance of x^T Q x + b^T x + c under N(mu, Sigma).
void gaussian_quadratic_moments(const Eigen::MatrixXd& Q,
                                const Eigen::VectorXd& b, double c,
                                const Eigen::VectorXd& mu,
                                const Eigen::MatrixXd& S, double& mean,
                                double& var) {
  Eigen::MatrixXd QS = Q * S;
  mean = QS.trace() + mu.dot(Q * mu) + b.dot(mu) + c;
  Eigen::VectorXd g = 2.0 * (Q * mu) + b;
  var = 2.0 * (QS * QS).trace() + g.dot(S * g);
}

struct BatchStats {
  double value = 0.0, se = 0.0;
};

BatchStats batch_mean(const Eigen::VectorXd& v) {
  std::size_t n = v.size(), bs = n / 32;
  BatchStats s;
  s.value = v.mean();
  Eigen::VectorXd bm(32);
  for (int b = 0; b < 32; ++b) bm[b] = v.segment(b * bs, bs).mean();
  double mu = bm.mean();
  s.se = std::sqrt((bm.array() - mu).square().sum() / 31.0 / 32.0);
  return s;
}

}  // namespace

PolyMoments poly_moments(const Polynomial& f, const LogConcaveMeasure& m,
                         const PolyMomentOptions& opts) {
  if (f.dimension() > m.dim())
    throw config_error("poly_moments: polynomial uses more variables than the measure has");
  if (opts.samples < 64)
    throw config_error("poly_moments: need at least 64 samples for batch errors");

  PolyMoments out;
  out.samples_used = opts.samples;
  int d = f.degree();
  int n = m.dim();

  if (m.family() == Family::Gaussian && d <= 2) {
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    double c = 0.0;
    for (const auto& [e, coef] : f.terms()) {
      int total = 0;
      for (int ei : e) total += ei;
      if (total == 0) {
        c += coef;
      } else if (total == 1) {
        for (std::size_t i = 0; i < e.size(); ++i)
          if (e[i] == 1) b[i] += coef;
      } else {
        int i = -1, j = -1;
        for (std::size_t k = 0; k < e.size(); ++k) {
          if (e[k] == 2) i = j = static_cast<int>(k);
          if (e[k] == 1) (i < 0 ? i : j) = static_cast<int>(k);
        }
        if (i == j) {
          Q(i, i) += coef;
        } else {
          Q(i, j) += 0.5 * coef;
          Q(j, i) += 0.5 * coef;
        }
      }
    }
    gaussian_quadratic_moments(Q, b, c, m.gaussian_mean(), m.gaussian_cov(),
                               out.mean, out.variance);
    out.analytic_mean_var = true;
  }

  SamplerOptions so;
  so.stream = opts.stream;
  SampleResult s = sample(m, opts.samples, so);
  Eigen::VectorXd v(opts.samples);
  for (std::size_t i = 0; i < opts.samples; ++i)
    v[i] = f(s.points.row(i).transpose());

  if (!out.analytic_mean_var) {
    BatchStats mb = batch_mean(v);
    out.mean = mb.value;
    out.mean_se = mb.se;
    std::size_t bs = opts.samples / 32;
    Eigen::VectorXd bv(32);
    for (int b = 0; b < 32; ++b) {
      auto seg = v.segment(b * bs, bs);
      double mu = seg.mean();
      bv[b] = (seg.array() - mu).square().sum() / double(bs - 1);
    }
    out.variance = (v.array() - out.mean).square().sum() / double(opts.samples - 1);
    double mu = bv.mean();
    out.variance_se = std::sqrt((bv.array() - mu).square().sum() / 31.0 / 32.0);
  }

  if (d >= 2) {
    double p = 1.0 / (d - 1.0);
    Eigen::VectorXd w =
        (v.array() - out.mean).abs().pow(p).matrix();
    BatchStats fb = batch_mean(w);
    out.frac_moment = fb.value;
    out.frac_moment_se = fb.se;
    out.frac_defined = true;
  }

  double rms = std::sqrt(v.array().square().mean());
  double thr = opts.zero_threshold * (rms > 0.0 ? rms : 1.0);
  std::size_t near_zero = 0, exact_zero = 0;
  for (std::size_t i = 0; i < opts.samples; ++i) {
    if (std::abs(v[i]) < thr) ++near_zero;
    if (v[i] == 0.0) ++exact_zero;
  }
  out.zero_fraction = double(near_zero) / double(opts.samples);

  for (double q : opts.q_list) {
    if (q < 0.0) throw config_error("poly_moments: q must be nonnegative");
    if (q == 0.0) {
      if (exact_zero > 0) {
        out.q0_defined = false;
        continue;
      }
      out.q_norms[0.0] = std::exp(v.array().abs().log().mean());
    } else {
      out.q_norms[q] = std::pow(v.array().abs().pow(q).mean(), 1.0 / q);
    }
  }
  return out;
}

}  // namespace logconc
