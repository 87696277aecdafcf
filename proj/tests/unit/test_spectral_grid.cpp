#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "steric/errors.hpp"
#include "steric/spectral_grid.hpp"

using namespace steric;

namespace {

double legendre_p(std::size_t n, double x) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) return p0;
  for (std::size_t k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

// Closed-form LGL differentiation entries.
double lgl_entry(const std::vector<double>& x, std::size_t i, std::size_t j) {
  const std::size_t n = x.size() - 1;
  const double nn = static_cast<double>(n * (n + 1));
  if (i != j) return legendre_p(n, x[i]) / (legendre_p(n, x[j]) * (x[i] - x[j]));
  if (i == 0) return -nn / 4.0;
  if (i == n) return nn / 4.0;
  return 0.0;
}

std::vector<double> mat_vec(const Eigen::MatrixXd& m, const std::vector<double>& v) {
  const Eigen::Map<const Eigen::VectorXd> in(v.data(), static_cast<Eigen::Index>(v.size()));
  const Eigen::VectorXd out = m * in;
  return {out.data(), out.data() + out.size()};
}

}  // namespace

TEST_CASE("lowest order grid") {
  const SpectralGrid g = build_grid(2);
  REQUIRE(g.size() == 3);
  CHECK(g.nodes[0] == -1.0);
  CHECK(std::fabs(g.nodes[1]) <= 1e-15);
  CHECK(g.nodes[2] == 1.0);
  CHECK(g.weights[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(g.weights[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(g.weights[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("closed-form nodes and weights for L = 4 and 5") {
  const SpectralGrid g4 = build_grid(4);
  const double a = std::sqrt(3.0 / 7.0);
  const std::vector<double> x4{-1.0, -a, 0.0, a, 1.0};
  const std::vector<double> w4{0.1, 49.0 / 90.0, 32.0 / 45.0, 49.0 / 90.0, 0.1};
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(std::fabs(g4.nodes[k] - x4[k]) <= 1e-14);
    CHECK(std::fabs(g4.weights[k] - w4[k]) <= 1e-14);
  }
  const SpectralGrid g5 = build_grid(5);
  const double s7 = std::sqrt(7.0);
  const double outer = std::sqrt((7.0 + 2.0 * s7) / 21.0);
  const double inner = std::sqrt((7.0 - 2.0 * s7) / 21.0);
  const std::vector<double> x5{-1.0, -outer, -inner, inner, outer, 1.0};
  const std::vector<double> w5{1.0 / 15.0,          (14.0 - s7) / 30.0, (14.0 + s7) / 30.0,
                               (14.0 + s7) / 30.0, (14.0 - s7) / 30.0, 1.0 / 15.0};
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(std::fabs(g5.nodes[k] - x5[k]) <= 1e-14);
    CHECK(std::fabs(g5.weights[k] - w5[k]) <= 1e-14);
  }
}

TEST_CASE("differentiation matrix matches the closed form") {
  for (std::size_t L : {3u, 8u, 17u, 32u}) {
    const SpectralGrid g = build_grid(L);
    double scale = 0.0;
    double err = 0.0;
    for (std::size_t i = 0; i <= L; ++i) {
      for (std::size_t j = 0; j <= L; ++j) {
        const double e = lgl_entry(g.nodes, i, j);
        scale = std::max(scale, std::fabs(e));
        err = std::max(err, std::fabs(g.diff(i, j) - e));
      }
    }
    CHECK(err <= 1e-12 * scale);
  }
}

TEST_CASE("grid structure invariants") {
  for (std::size_t L : {2u, 7u, 16u, 64u, 128u}) {
    const SpectralGrid g = build_grid(L);
    REQUIRE(g.size() == L + 1);
    double wsum = 0.0;
    for (double w : g.weights) {
      CHECK(w > 0.0);
      wsum += w;
    }
    CHECK(std::fabs(wsum - 2.0) <= 1e-13);
    for (std::size_t k = 0; k <= L; ++k) {
      CHECK(std::fabs(g.nodes[k] + g.nodes[L - k]) <= 1e-14);
      CHECK(std::fabs(g.weights[k] - g.weights[L - k]) <= 1e-14);
      if (k > 0) CHECK(g.nodes[k] > g.nodes[k - 1]);
    }
    const double n = static_cast<double>(L);
    const double rowscale = n * (n + 1.0) / 4.0;
    for (Eigen::Index i = 0; i < g.diff.rows(); ++i) {
      CHECK(std::fabs(g.diff.row(i).sum()) <= 1e-12 * std::max(1.0, rowscale));
    }
  }
}

TEST_CASE("quadrature is exact for even monomials") {
  const SpectralGrid g = build_grid(16);
  for (int k = 0; k <= 15; ++k) {
    const auto v = sample(g, [k](double x) { return std::pow(x, 2 * k); });
    CHECK(integrate(g, v) == doctest::Approx(2.0 / (2 * k + 1)).epsilon(1e-13));
  }
}

TEST_CASE("derivatives of polynomials and smooth functions") {
  SUBCASE("cubic") {
    const SpectralGrid g = build_grid(16);
    const auto d = mat_vec(g.diff, sample(g, [](double x) { return x * x * x; }));
    CHECK(max_norm_diff(d, sample(g, [](double x) { return 3.0 * x * x; })) <= 1e-10);
  }
  SUBCASE("second derivative") {
    const SpectralGrid g = build_grid(12);
    const Eigen::MatrixXd d2 = second_derivative(g);
    const auto quad = mat_vec(d2, sample(g, [](double x) { return x * x; }));
    for (double v : quad) CHECK(std::fabs(v - 2.0) <= 1e-10);
    const auto zero = mat_vec(d2, std::vector<double>(g.size(), 1.0));
    for (double v : zero) CHECK(std::fabs(v) <= 1e-10);
  }
  SUBCASE("all monomials up to the grid order") {
    const SpectralGrid g = build_grid(16);
    for (int m = 1; m <= 16; ++m) {
      const auto d = mat_vec(g.diff, sample(g, [m](double x) { return std::pow(x, m); }));
      CHECK(max_norm_diff(d, sample(g, [m](double x) { return m * std::pow(x, m - 1); })) <= 1e-10);
    }
  }
  SUBCASE("second derivative of sine") {
    const SpectralGrid g = build_grid(32);
    const double pi = std::numbers::pi;
    const auto d2 = mat_vec(second_derivative(g), sample(g, [pi](double x) { return std::sin(pi * x); }));
    CHECK(max_norm_diff(d2, sample(g, [pi](double x) { return -pi * pi * std::sin(pi * x); })) < 1e-8);
  }
  SUBCASE("sine") {
    const SpectralGrid g = build_grid(32);
    const double pi = std::numbers::pi;
    const auto d = mat_vec(g.diff, sample(g, [pi](double x) { return std::sin(pi * x); }));
    CHECK(max_norm_diff(d, sample(g, [pi](double x) { return pi * std::cos(pi * x); })) < 1e-8);
  }
}

TEST_CASE("max norm difference") {
  const std::vector<double> a{1.0, -2.0, 3.5};
  const std::vector<double> b{1.0, 2.0, 3.0};
  CHECK(max_norm_diff(a, b) == 4.0);
  CHECK(max_norm_diff(a, a) == 0.0);
  auto bumped = b;
  bumped[1] += 0.125;
  CHECK(max_norm_diff(bumped, b) == 0.125);
  const std::vector<double> short_vec(1, 1.0);
  CHECK_THROWS_AS(max_norm_diff(a, short_vec), InvalidInput);

  std::mt19937 rng(3);
  std::normal_distribution<double> gauss;
  std::vector<double> x(50);
  std::vector<double> y(50);
  for (int trial = 0; trial < 20; ++trial) {
    for (std::size_t k = 0; k < x.size(); ++k) {
      x[k] = gauss(rng);
      y[k] = gauss(rng);
    }
    std::vector<double> diffs;
    for (std::size_t k = 0; k < x.size(); ++k) diffs.push_back(std::fabs(x[k] - y[k]));
    std::shuffle(diffs.begin(), diffs.end(), rng);
    CHECK(max_norm_diff(x, y) == *std::max_element(diffs.begin(), diffs.end()));
  }
}

TEST_CASE("interpolation reproduces smooth functions between nodes") {
  const SpectralGrid g = build_grid(24);
  const auto v = sample(g, [](double x) { return std::exp(x) * std::cos(2.0 * x); });
  for (int k = 0; k <= 100; ++k) {
    const double x = -1.0 + 0.02 * k;
    CHECK(std::fabs(interpolate(g, v, x) - std::exp(x) * std::cos(2.0 * x)) <= 1e-12);
  }
  CHECK(interpolate(g, v, g.nodes[5]) == v[5]);
  const auto cubic = sample(g, [](double x) { return x * x * x - x; });
  CHECK(interpolate(g, cubic, 0.3) == doctest::Approx(0.027 - 0.3).epsilon(1e-13));
  CHECK_THROWS_AS(interpolate(g, v, 1.5), InvalidInput);
}

TEST_CASE("legendre values") {
  CHECK(legendre(3, 0.5).p == doctest::Approx(legendre_p(3, 0.5)).epsilon(1e-15));
  CHECK(legendre(6, 1.0).p == doctest::Approx(1.0));
  CHECK(legendre(6, 1.0).dp == doctest::Approx(21.0));
}

TEST_CASE("too small grids are rejected") {
  CHECK_THROWS_AS(build_grid(1), InvalidInput);
  CHECK_THROWS_AS(build_grid(0), InvalidInput);
}
