#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace logconc {

// Bad inputs: unsupported dimension, invalid family parameters, malformed JSON.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Statistical budget too small to resolve the requested quantity.
class estimation_error : public std::runtime_error {
 public:
  explicit estimation_error(const std::string& what) : std::runtime_error(what) {}
};

// Degenerate geometry: singular covariance, zero-range sample, empty support.
class degeneracy_error : public std::runtime_error {
 public:
  explicit degeneracy_error(const std::string& what) : std::runtime_error(what) {}
};

// A measure violated the assumptions of the routine (e.g. non-convex potential
// detected while sampling, or a measure that is not in isotropic position).
class invalid_measure_error : public std::runtime_error {
 public:
  explicit invalid_measure_error(const std::string& what) : std::runtime_error(what) {}
};

// Polynomial text rejected; `position` is the 0-based offset of the offending
// character.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)),
        position(position) {}
  std::size_t position;
};

}  // namespace logconc
