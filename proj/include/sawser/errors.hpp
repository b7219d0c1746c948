#pragma once

#include <stdexcept>

namespace sawser {

/// Violated precondition on a plain argument.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Degenerate or out-of-domain geometric input.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model functions that break the regularity assumptions
/// (non-monotone time change, non-positive scale, failed inversion).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sawser
