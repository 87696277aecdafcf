#include "steric/spectral_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "steric/errors.hpp"

namespace steric {

LegendreValue legendre(std::size_t order, double x) {
  if (order == 0) return {1.0, 0.0};
  double p_prev = 1.0;
  double p = x;
  for (std::size_t n = 2; n <= order; ++n) {
    const double next = ((2.0 * n - 1.0) * x * p - (n - 1.0) * p_prev) / n;
    p_prev = p;
    p = next;
  }
  const double l = static_cast<double>(order);
  double dp;
  if (std::fabs(x) == 1.0) {
    // P′_L(±1) = (±1)^{L+1} L(L+1)/2
    dp = 0.5 * l * (l + 1.0) * ((order % 2 == 1 || x > 0.0) ? 1.0 : -1.0);
  } else {
    dp = l * (x * p - p_prev) / (x * x - 1.0);
  }
  return {p, dp};
}

SpectralGrid build_grid(std::size_t order) {
  if (order < 2) throw InvalidInput("spectral grid: order must be at least 2");
  const std::size_t n = order + 1;
  const double l = static_cast<double>(order);
  SpectralGrid g;
  g.order = order;
  g.nodes.resize(n);
  g.weights.resize(n);
  g.nodes.front() = -1.0;
  g.nodes.back() = 1.0;

  // Interior nodes: Newton on P′_L, with P″_L from the Legendre equation
  // (1−x²)P″ = 2xP′ − L(L+1)P, started from Chebyshev–Gauss–Lobatto points.
  for (std::size_t k = 1; k < order; ++k) {
    double x = -std::cos(std::numbers::pi * static_cast<double>(k) / l);
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      const LegendreValue v = legendre(order, x);
      const double ddp = (2.0 * x * v.dp - l * (l + 1.0) * v.p) / (1.0 - x * x);
      const double step = v.dp / ddp;
      x -= step;
      if (std::fabs(step) <= 1e-16) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      // A final correction at the 1-ulp level is acceptable; anything larger
      // means the iteration left the basin.
      const LegendreValue v = legendre(order, x);
      const double ddp = (2.0 * x * v.dp - l * (l + 1.0) * v.p) / (1.0 - x * x);
      if (!(std::fabs(v.dp / ddp) <= 1e-14)) {
        throw ConvergenceError("spectral grid: Newton failed for node " + std::to_string(k));
      }
    }
    g.nodes[k] = x;
  }
  // Enforce exact symmetry x_k = −x_{L−k}.
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double half = 0.5 * (g.nodes[n - 1 - k] - g.nodes[k]);
    g.nodes[k] = -half;
    g.nodes[n - 1 - k] = half;
  }
  if (n % 2 == 1) g.nodes[n / 2] = 0.0;

  for (std::size_t k = 0; k < n; ++k) {
    const double p = legendre(order, g.nodes[k]).p;
    g.weights[k] = 2.0 / (l * (l + 1.0) * p * p);
  }

  // Barycentric weights 1/∏(x_j − x_k), kept as log-magnitude and sign.
  std::vector<double> log_w(n, 0.0);
  std::vector<double> sign_w(n, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      const double d = g.nodes[j] - g.nodes[k];
      log_w[j] -= std::log(std::fabs(d));
      if (d < 0.0) sign_w[j] = -sign_w[j];
    }
  }
  double log_max = log_w[0];
  for (double v : log_w) log_max = std::max(log_max, v);
  g.bary.resize(n);
  for (std::size_t j = 0; j < n; ++j) g.bary[j] = sign_w[j] * std::exp(log_w[j] - log_max);

  g.diff = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double ratio = sign_w[i] * sign_w[j] * std::exp(log_w[j] - log_w[i]);
      const double d = ratio / (g.nodes[i] - g.nodes[j]);
      g.diff(i, j) = d;
      row += d;
    }
    g.diff(i, i) = -row;
  }
  return g;
}

Eigen::MatrixXd second_derivative(const SpectralGrid& grid) { return grid.diff * grid.diff; }

double max_norm_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInput("max_norm_diff: size mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::fmax(m, std::fabs(a[k] - b[k]));
  return m;
}

double integrate(const SpectralGrid& grid, std::span<const double> values) {
  if (values.size() != grid.size()) throw InvalidInput("integrate: size mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) s += grid.weights[k] * values[k];
  return s;
}

double interpolate(const SpectralGrid& grid, std::span<const double> values, double x) {
  if (values.size() != grid.size()) throw InvalidInput("interpolate: size mismatch");
  if (!(x >= -1.0 && x <= 1.0)) throw InvalidInput("interpolate: point outside [-1, 1]");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double d = x - grid.nodes[j];
    if (d == 0.0) return values[j];
    const double t = grid.bary[j] / d;
    num += t * values[j];
    den += t;
  }
  return num / den;
}

}  // namespace steric
