#include "logconc/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "logconc/errors.hpp"
#include "logconc/parallel.hpp"
#include "logconc/quadrature.hpp"

namespace logconc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Inverse CDF of the density proportional to exp(slope * t) on [a, b],
// written to survive slope * (b - a) far outside exp() range.
double exp_segment_quantile(double a, double b, double slope, double u) {
  double tau = b - a;
  double mt = slope * tau;
  if (mt > 40.0) return b + std::log(u) / slope;
  if (mt < -40.0) return a + std::log(u) / slope;
  if (std::abs(mt) < 1e-12) return a + u * tau;
  return a + std::log1p(u * std::expm1(mt)) / slope;
}

double log_exp_segment_mass(double a, double b, double slope, double icpt) {
  double va = slope * a + icpt, vb = slope * b + icpt;
  double tau = b - a;
  double mt = slope * tau;
  if (mt > 40.0) return vb - std::log(slope);
  if (mt < -40.0) return va - std::log(-slope);
  if (std::abs(mt) < 1e-12) return va + std::log(tau * (1.0 + 0.5 * mt));
  return va + std::log(std::expm1(mt) / slope);
}

}  // namespace

// -------------------------------------------------------------- LineSampler

LineSampler::LineSampler(std::function<double(double)> logdens, double lo,
                         double hi, double mode_guess, double scale)
    : f_(std::move(logdens)), lo_(lo), hi_(hi) {
  if (!(lo_ < hi_)) throw config_error("line sampler: empty interval");
  auto g = [this](double t) {
    ++evals_;
    double v = f_(t);
    return std::isfinite(v) ? v : -kInf;
  };
  double step = std::max(scale, 1e-12);
  Bracket br = bracket_max(g, mode_guess, step, lo_, hi_);
  double span = std::max({br.hi - br.lo, 1e-9});
  double tstar = golden_max(g, br.lo, br.hi, 1e-3 * span);
  double d = 0.35 * span;

  std::set<double> pts;
  for (double off : {-3.0 * d, -d, 0.0, d, 3.0 * d})
    pts.insert(std::clamp(tstar + off, lo_, hi_));
  if (pts.size() < 3) {
    pts.clear();
    for (int i = 0; i <= 4; ++i) pts.insert(lo_ + (hi_ - lo_) * i / 4.0);
  }
  for (double t : pts) {
    double h = g(t);
    // Walk toward the located mode until the value is finite.
    int guard = 80;
    while (!std::isfinite(h) && guard-- > 0) {
      t = 0.5 * (t + tstar);
      h = g(t);
    }
    if (std::isfinite(h)) insert_point_nocheck(t, h);
  }
  if (t_.size() < 3)
    throw estimation_error("line sampler: could not seed the envelope");

  // Unbounded sides need a strictly decaying outermost pair, or the envelope
  // mass diverges.
  for (int side = 0; side < 2; ++side) {
    bool left = side == 0;
    bool unbounded = left ? lo_ < -1e11 : hi_ > 1e11;
    if (!unbounded) continue;
    int guard = 60;
    while (guard-- > 0) {
      std::size_t k = t_.size();
      double outer = left ? h_[0] : h_[k - 1];
      double inner = left ? h_[1] : h_[k - 2];
      if (outer < inner - 1e-9) break;
      double gap = left ? t_[1] - t_[0] : t_[k - 1] - t_[k - 2];
      double t = left ? t_[0] - 4.0 * std::max(gap, step)
                      : t_[k - 1] + 4.0 * std::max(gap, step);
      double h = g(t);
      if (!std::isfinite(h))
        throw invalid_measure_error("line sampler: density vanishes abruptly on an unbounded side");
      insert_point_nocheck(t, h);
    }
    if (guard <= 0)
      throw invalid_measure_error(
          "line sampler: log-density does not decay along an unbounded direction");
  }
  rebuild();
}

void LineSampler::insert_point_nocheck(double t, double h) {
  auto it = std::lower_bound(t_.begin(), t_.end(), t);
  std::size_t idx = it - t_.begin();
  if (it != t_.end() && std::abs(*it - t) <= 1e-13 * (1.0 + std::abs(t))) return;
  if (idx > 0 && std::abs(t_[idx - 1] - t) <= 1e-13 * (1.0 + std::abs(t))) return;
  t_.insert(it, t);
  h_.insert(h_.begin() + idx, h);
}

void LineSampler::insert(double t, double h) {
  if (t_.size() >= 64) return;
  insert_point_nocheck(t, h);
  rebuild();
}

void LineSampler::rebuild() {
  std::size_t k = t_.size();
  segs_.clear();
  auto secant_slope = [&](std::size_t i) {
    return (h_[i + 1] - h_[i]) / (t_[i + 1] - t_[i]);
  };
  auto push = [&](double a, double b, double slope, double icpt) {
    if (!(b > a)) return;
    segs_.push_back({a, b, slope, icpt, log_exp_segment_mass(a, b, slope, icpt)});
  };

  if (lo_ < t_[0]) {
    double s = secant_slope(0);
    if (lo_ < -1e11 && s <= 0.0)
      throw invalid_measure_error("line sampler: envelope mass diverges on the left");
    push(lo_, t_[0], s, h_[0] - s * t_[0]);
  }
  for (std::size_t i = 0; i + 1 < k; ++i) {
    double a = t_[i], b = t_[i + 1];
    bool has_l = i >= 1;            // secant(i-1) extended to the right
    bool has_r = i + 2 <= k - 1;    // secant(i+1) extended to the left
    if (!has_l && !has_r) {
      // Too few points to bound this gap from above; a chord plus a flat cap
      // at the larger endpoint is still valid only for monotone pieces, so
      // refuse instead of sampling from a wrong envelope.
      throw estimation_error("line sampler: envelope needs at least 3 points");
    }
    double sl = 0.0, il = 0.0, sr = 0.0, ir = 0.0;
    if (has_l) {
      sl = secant_slope(i - 1);
      il = h_[i - 1] - sl * t_[i - 1];
    }
    if (has_r) {
      sr = secant_slope(i + 1);
      ir = h_[i + 1] - sr * t_[i + 1];
    }
    if (has_l && has_r) {
      double denom = sl - sr;
      if (std::abs(denom) < 1e-14 * (std::abs(sl) + std::abs(sr) + 1e-300)) {
        // Parallel: either line works; take the lower one at the midpoint.
        double mid = 0.5 * (a + b);
        bool use_l = sl * mid + il <= sr * mid + ir;
        push(a, b, use_l ? sl : sr, use_l ? il : ir);
      } else {
        double z = (ir - il) / denom;
        if (z <= a) {
          bool use_l = sl * b + il <= sr * b + ir;
          push(a, b, use_l ? sl : sr, use_l ? il : ir);
        } else if (z >= b) {
          bool use_l = sl * a + il <= sr * a + ir;
          push(a, b, use_l ? sl : sr, use_l ? il : ir);
        } else {
          bool l_first = sl * a + il <= sr * a + ir;
          push(a, z, l_first ? sl : sr, l_first ? il : ir);
          push(z, b, l_first ? sr : sl, l_first ? ir : il);
        }
      }
    } else if (has_l) {
      push(a, b, sl, il);
    } else {
      push(a, b, sr, ir);
    }
  }
  if (hi_ > t_[k - 1]) {
    double s = secant_slope(k - 2);
    if (hi_ > 1e11 && s >= 0.0)
      throw invalid_measure_error("line sampler: envelope mass diverges on the right");
    push(t_[k - 1], hi_, s, h_[k - 1] - s * t_[k - 1]);
  }
  if (segs_.empty())
    throw estimation_error("line sampler: empty envelope");

  double mx = -kInf;
  for (const auto& s : segs_) mx = std::max(mx, s.logmass);
  double sum = 0.0;
  for (const auto& s : segs_) sum += std::exp(s.logmass - mx);
  logtotal_ = mx + std::log(sum);
}

double LineSampler::draw(SeededStream& rng) {
  for (int iter = 0; iter < 400; ++iter) {
    // Pick a segment proportionally to its envelope mass.
    double u = rng.uniform_open();
    double acc = 0.0;
    const Seg* chosen = &segs_.back();
    for (const auto& s : segs_) {
      acc += std::exp(s.logmass - logtotal_);
      if (u <= acc) {
        chosen = &s;
        break;
      }
    }
    double t = exp_segment_quantile(chosen->a, chosen->b, chosen->slope,
                                    rng.uniform_open());
    t = std::clamp(t, lo_, hi_);
    double hull = chosen->slope * t + chosen->icpt;
    double logu = std::log(rng.uniform_open());

    // Squeeze: the chord between neighbouring support points lies below the
    // log-density, so acceptance under it needs no evaluation.
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    if (it != t_.begin() && it != t_.end()) {
      std::size_t i = (it - t_.begin()) - 1;
      double s = (h_[i + 1] - h_[i]) / (t_[i + 1] - t_[i]);
      double squeeze = h_[i] + s * (t - t_[i]);
      if (logu <= squeeze - hull) return t;
    }

    ++evals_;
    double h = f_(t);
    if (!std::isfinite(h)) h = -kInf;
    if (h > hull + 1e-6 * (1.0 + std::abs(h)))
      throw invalid_measure_error(
          "line sampler: evaluation pierced the secant envelope; the "
          "log-density is not concave along this line");
    bool accept = logu <= h - hull;
    if (!frozen_ && std::isfinite(h)) insert(t, h);
    if (accept) return t;
  }
  throw estimation_error("line sampler: acceptance loop did not terminate");
}

void LineSampler::refine(int inserts) {
  for (int k = 0; k < inserts && t_.size() < 60; ++k) {
    const Seg* widest = &segs_.front();
    for (const auto& s : segs_)
      if (s.logmass > widest->logmass) widest = &s;
    double t = exp_segment_quantile(widest->a, widest->b, widest->slope, 0.5);
    t = std::clamp(t, lo_, hi_);
    double h = f_(t);
    ++evals_;
    if (!std::isfinite(h)) break;
    double hull = widest->slope * t + widest->icpt;
    if (h > hull + 1e-6 * (1.0 + std::abs(h)))
      throw invalid_measure_error(
          "line sampler: evaluation pierced the secant envelope; the "
          "log-density is not concave along this line");
    std::size_t before = t_.size();
    insert(t, h);
    if (t_.size() == before) break;  // duplicate; envelope already tight
  }
}

// ------------------------------------------------------------------ sample

namespace {

void direct_rows(const LogConcaveMeasure& m, Eigen::MatrixXd& pts,
                 const SamplerOptions& opts) {
  int n = m.dim();
  std::size_t count = static_cast<std::size_t>(pts.rows());
  parallel_for(count, opts.workers, [&](std::size_t b, std::size_t e) {
    Eigen::VectorXd z(n);
    for (std::size_t i = b; i < e; ++i) {
      SeededStream rs = opts.stream.substream(i);
      switch (m.family()) {
        case Family::Gaussian: {
          for (int j = 0; j < n; ++j) z[j] = rs.normal();
          pts.row(i) = (m.gaussian_mean() + m.gaussian_chol() * z).transpose();
          break;
        }
        case Family::UniformBox: {
          const auto& s = m.support();
          for (int j = 0; j < n; ++j)
            pts(i, j) = s.center[j] + s.half_widths[j] * (2.0 * rs.uniform01() - 1.0);
          break;
        }
        case Family::UniformBall: {
          const auto& s = m.support();
          double r2 = 0.0;
          for (int j = 0; j < n; ++j) {
            z[j] = rs.normal();
            r2 += z[j] * z[j];
          }
          double r = s.radius * std::pow(rs.uniform_open(), 1.0 / n) /
                     std::max(std::sqrt(r2), 1e-300);
          pts.row(i) = (s.center + r * z).transpose();
          break;
        }
        case Family::ProductExponential: {
          for (int j = 0; j < n; ++j) pts(i, j) = rs.laplace(m.exp_rates()[j]);
          break;
        }
        case Family::Custom:
          break;  // not handled here
      }
    }
  });
}

void custom_1d_rows(const LogConcaveMeasure& m, Eigen::MatrixXd& pts,
                    const SamplerOptions& opts) {
  Eigen::VectorXd lo, hi;
  m.effective_box(lo, hi);
  auto chord = support_chord(m.support(), m.interior_point(),
                             Eigen::VectorXd::Ones(1));
  double a = std::max(chord.first + m.interior_point()[0], -1e12);
  double b = std::min(chord.second + m.interior_point()[0], 1e12);
  auto g = [&m](double t) {
    return -m.potential(Eigen::VectorXd::Constant(1, t));
  };
  LineSampler ls(g, a, b, m.interior_point()[0], m.length_scale());
  ls.refine(28);
  ls.freeze();
  std::size_t count = static_cast<std::size_t>(pts.rows());
  parallel_for(count, opts.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      SeededStream rs = opts.stream.substream(i);
      pts(i, 0) = ls.draw(rs);
    }
  });
}

void hit_and_run_rows(const LogConcaveMeasure& m, Eigen::MatrixXd& pts,
                      std::size_t burnin, std::size_t thin, int chains,
                      const SamplerOptions& opts) {
  int n = m.dim();
  std::size_t count = static_cast<std::size_t>(pts.rows());
  double scale = m.length_scale();
  parallel_for(static_cast<std::size_t>(chains), opts.workers,
               [&](std::size_t cb, std::size_t ce) {
    for (std::size_t c = cb; c < ce; ++c) {
      SeededStream rs = opts.stream.substream(c);
      Eigen::VectorXd x = m.interior_point();
      if (c > 0) {
        // Mildly overdispersed starts, pulled back inside if needed.
        Eigen::VectorXd jitter(n);
        for (int j = 0; j < n; ++j) jitter[j] = rs.normal();
        double f = 0.3 * scale;
        for (int tries = 0; tries < 60; ++tries) {
          Eigen::VectorXd cand = m.interior_point() + f * jitter;
          if (m.support().contains(cand) && std::isfinite(m.potential(cand))) {
            x = cand;
            break;
          }
          f *= 0.5;
        }
      }
      std::size_t rows_c = count / chains + (c < count % chains ? 1 : 0);
      if (rows_c == 0) continue;
      std::size_t total_steps = burnin + 1 + (rows_c - 1) * thin;
      std::size_t written = 0;
      for (std::size_t step = 0; step < total_steps; ++step) {
        Eigen::VectorXd d(n);
        double norm2 = 0.0;
        for (int j = 0; j < n; ++j) {
          d[j] = rs.normal();
          norm2 += d[j] * d[j];
        }
        d /= std::max(std::sqrt(norm2), 1e-300);
        auto chord = support_chord(m.support(), x, d);
        double a = std::max(chord.first, -1e12), b = std::min(chord.second, 1e12);
        if (!(a < b)) continue;
        auto g = [&](double t) { return -m.potential(x + t * d); };
        LineSampler ls(g, a, b, 0.0, scale);
        x += ls.draw(rs) * d;
        if (step >= burnin && (step - burnin) % thin == 0 && written < rows_c) {
          pts.row(c + written * chains) = x.transpose();
          ++written;
        }
      }
      if (written != rows_c)
        throw estimation_error("hit-and-run: chain produced too few samples");
    }
  });
}

}  // namespace

SampleResult sample(const LogConcaveMeasure& m, std::size_t count,
                    const SamplerOptions& opts) {
  if (count == 0) throw config_error("sample: count must be positive");
  if (count > 50'000'000) throw config_error("sample: count is too large");
  SampleResult out;
  out.points.resize(count, m.dim());
  if (m.family() != Family::Custom) {
    direct_rows(m, out.points, opts);
    out.method = "direct";
    return out;
  }
  if (m.dim() == 1) {
    custom_1d_rows(m, out.points, opts);
    out.method = "direct";
    return out;
  }
  std::size_t burnin = opts.burnin ? opts.burnin : 1000 * m.dim();
  std::size_t thin = opts.thin ? opts.thin : m.dim();
  int chains = std::clamp(opts.chains, 1, 64);
  chains = static_cast<int>(std::min<std::size_t>(chains, count));
  hit_and_run_rows(m, out.points, burnin, thin, chains, opts);
  out.method = "hit_and_run";
  out.burnin = burnin;
  out.thin = thin;
  return out;
}

Expectation expect(const LogConcaveMeasure& m,
                   const std::function<double(const Eigen::VectorXd&)>& g,
                   std::size_t count, const SamplerOptions& opts) {
  SampleResult s = sample(m, count, opts);
  Eigen::VectorXd vals(count);
  for (std::size_t i = 0; i < count; ++i) vals[i] = g(s.points.row(i).transpose());
  Expectation e;
  e.count = count;
  e.value = vals.mean();
  std::size_t bs = count / 32;
  if (bs >= 1) {
    double mean_of_means = 0.0;
    Eigen::VectorXd bm(32);
    for (int b = 0; b < 32; ++b) {
      bm[b] = vals.segment(b * bs, bs).mean();
      mean_of_means += bm[b] / 32.0;
    }
    double var = (bm.array() - mean_of_means).square().sum() / 31.0;
    e.stderror = std::sqrt(var / 32.0);
  } else {
    double var = (vals.array() - e.value).square().sum() / std::max<std::size_t>(count - 1, 1);
    e.stderror = std::sqrt(var / count);
  }
  return e;
}

}  // namespace logconc
