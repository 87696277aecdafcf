#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace steric {

/// Legendre–Gauss–Lobatto collocation on [−1, 1] with L+1 nodes.
struct SpectralGrid {
  std::size_t order = 0;         // L
  std::vector<double> nodes;     // −1 = x_0 < … < x_L = 1
  std::vector<double> weights;   // LGL quadrature weights
  Eigen::MatrixXd diff;          // (L+1)×(L+1) differentiation matrix
  std::vector<double> bary;      // barycentric weights, scaled to max |w| = 1

  std::size_t size() const noexcept { return nodes.size(); }
};

/// Nodes are the roots of (1−x²)P′_L(x); requires L ≥ 2.
SpectralGrid build_grid(std::size_t order);

/// D·D.
Eigen::MatrixXd second_derivative(const SpectralGrid& grid);

/// max_k |a_k − b_k|.
double max_norm_diff(std::span<const double> a, std::span<const double> b);

/// Σ_k w_k v_k, the LGL approximation of ∫₋₁¹ v dx.
double integrate(const SpectralGrid& grid, std::span<const double> values);

/// Value at x ∈ [−1, 1] of the degree-L interpolant through nodal values.
double interpolate(const SpectralGrid& grid, std::span<const double> values, double x);

/// Nodal samples of a function.
template <class Fn>
std::vector<double> sample(const SpectralGrid& grid, Fn&& fn) {
  std::vector<double> out(grid.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = fn(grid.nodes[k]);
  return out;
}

/// P_L(x) and P′_L(x) by the three-term recurrence.
struct LegendreValue {
  double p;
  double dp;
};
LegendreValue legendre(std::size_t order, double x);

}  // namespace steric
