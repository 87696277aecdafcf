#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "steric/errors.hpp"

namespace steric::detail {

struct ValueSlope {
  double value;
  double slope;
};

// Newton iteration for an increasing scalar function, kept inside [lo, hi]
// by bisection. The caller guarantees value(lo) <= 0 <= value(hi). Stops when
// |value| <= tol or when the bracket has shrunk to a few ulps, in which case
// the best point seen is returned.
template <class Fn>
double safeguarded_newton(Fn&& fn, double lo, double hi, double x0, double tol,
                          const char* what, int max_iter = 400) {
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ConvergenceError(std::string(what) + ": invalid bracket");
  }
  double x = std::isfinite(x0) ? std::fmin(std::fmax(x0, lo), hi) : 0.5 * (lo + hi);
  double best_x = x;
  double best_abs = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    const ValueSlope vs = fn(x);
    if (std::isnan(vs.value)) throw ConvergenceError(std::string(what) + ": NaN residual");
    const double a = std::fabs(vs.value);
    if (a < best_abs) {
      best_abs = a;
      best_x = x;
    }
    if (a <= tol) return x;
    if (vs.value > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double scale = std::fmax(std::fabs(lo), std::fabs(hi));
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::fmax(scale, 1e-300)) {
      return best_x;
    }
    double next = x - vs.value / vs.slope;
    if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
    if (next == x) return best_x;
    x = next;
  }
  throw ConvergenceError(std::string(what) + ": iteration cap exceeded");
}

}  // namespace steric::detail
