#pragma once

#include <cmath>
#include <cstdint>

namespace logconc {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  // SplitMix64 finalizer.
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Counter-based random stream.  A stream is identified by (seed, index); the
// k-th draw is a pure function of (seed, index, k), so equal identifiers give
// identical sequences and disjoint indices give independent ones.  Draws can
// therefore be split across workers without changing the output.
class SeededStream {
 public:
  explicit SeededStream(std::uint64_t seed = 0, std::uint64_t index = 0)
      : seed_(seed), index_(index) {
    std::uint64_t a = detail::mix64(seed ^ 0x8f1bbcdcbfa53e0bULL);
    std::uint64_t b = detail::mix64(index ^ 0x2b7e151628aed2a6ULL);
    key_ = detail::mix64(a + 0x9e3779b97f4a7c15ULL * b);
  }

  // Child stream derived from this stream's identity; used to give every
  // sample row / batch / chain its own independent sequence.
  SeededStream substream(std::uint64_t child) const {
    return SeededStream(key_, child + 1);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t index() const { return index_; }
  std::uint64_t drawn() const { return counter_; }

  std::uint64_t next_u64() {
    return detail::mix64(key_ + 0x9e3779b97f4a7c15ULL * (++counter_));
  }

  // Uniform on [0,1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0,1); never returns 0 (safe for logs).
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller.  Two uniforms per draw, no cached spare:
  // the draw count per variate is then fixed, which keeps substream plans
  // reproducible.
  double normal() {
    double u1 = uniform_open();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  double exponential(double rate) { return -std::log(uniform_open()) / rate; }

  // Laplace (two-sided exponential) via inverse CDF, one uniform per draw.
  double laplace(double rate) {
    double u = uniform_open();
    return u < 0.5 ? std::log(2.0 * u) / rate : -std::log(2.0 * (1.0 - u)) / rate;
  }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t seed_ = 0;
  std::uint64_t index_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace logconc
