#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "logconc/measure.hpp"
#include "logconc/rng.hpp"

namespace logconc {

struct SamplerOptions {
  SeededStream stream{0, 0};
  int workers = 1;
  // 0 means automatic: 1000 * dim burn-in and thinning of dim for the
  // hit-and-run path; ignored for direct (iid) families.
  std::size_t burnin = 0;
  std::size_t thin = 0;
  int chains = 8;
};

struct SampleResult {
  Eigen::MatrixXd points;  // count x dim, row-major order fixed by the stream
  std::string method;      // "direct" or "hit_and_run"
  std::size_t burnin = 0;  // values actually used (0 for direct)
  std::size_t thin = 0;
};

// Draws `count` points.  Gaussian, box, ball and product-exponential
// measures are sampled directly; one-dimensional custom measures by adaptive
// rejection; higher-dimensional custom measures by hit-and-run.  The output
// depends only on (measure, count, stream, burnin, thin, chains), never on
// the worker count.
SampleResult sample(const LogConcaveMeasure& m, std::size_t count,
                    const SamplerOptions& opts = {});

struct Expectation {
  double value = 0.0;
  double stderror = 0.0;  // from 32 equal sample batches
  std::size_t count = 0;
};

Expectation expect(const LogConcaveMeasure& m,
                   const std::function<double(const Eigen::VectorXd&)>& g,
                   std::size_t count, const SamplerOptions& opts = {});

// Adaptive rejection sampler for an unnormalized concave log-density on
// [lo, hi] (either side may be infinite if the tails decay).  Derivative
// free: upper hulls are built from secants.  Throws invalid_measure_error
// when evaluations pierce the hull, i.e. the function is not concave.
class LineSampler {
 public:
  LineSampler(std::function<double(double)> logdens, double lo, double hi,
              double mode_guess, double scale);
  double draw(SeededStream& rng);
  // Pre-inserts support points at the heaviest envelope segments, so a
  // frozen sampler still accepts quickly.
  void refine(int inserts);
  // Stops envelope adaptation; draws become independent of each other, which
  // makes per-row substream sampling order-free.
  void freeze() { frozen_ = true; }
  int evaluations() const { return evals_; }

 private:
  void rebuild();
  void insert(double t, double h);
  void insert_point_nocheck(double t, double h);

  std::function<double(double)> f_;
  double lo_, hi_;
  bool frozen_ = false;
  std::vector<double> t_, h_;  // support points, sorted
  struct Seg {
    double a, b, slope, icpt, logmass;
  };
  std::vector<Seg> segs_;
  double logtotal_ = 0.0;
  std::atomic<int> evals_{0};
};

}  // namespace logconc
