#pragma once

#include <stdexcept>
#include <string>

namespace steric {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: invariant violations, bad configuration, non-finite data.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// The problem is well formed but has no solution under the stated hypotheses
/// (e.g. Neumann data with nonzero mean, constant charge outside the
/// saturation window).
class Unsolvable : public Error {
 public:
  using Error::Error;
};

/// An iterative method failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace steric
