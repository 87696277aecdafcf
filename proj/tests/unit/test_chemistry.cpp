#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "steric/chemistry.hpp"
#include "steric/errors.hpp"

using namespace steric;

namespace {

// Canonical setups: (μ̄₀, μ̂₀) = (1, 1) matches the reference values; (0, 0) is the
// strict-definition variant.
std::vector<IonSystem> reference_systems() {
  return {reference_system_a(1.0, 1.0), reference_system_b(1.0, 1.0),
          reference_system_a(0.0, 0.0), reference_system_b(0.0, 0.0)};
}

IonSystem negated(IonSystem s) {
  for (double& z : s.valence) z = -z;
  return s;
}

}  // namespace

TEST_CASE("solvent root at zero coupling is exp(mu_hat0)") {
  for (const IonSystem& s : reference_systems()) {
    for (double phi : {-3.0, 0.0, 2.5}) {
      CHECK(solve_c0_lambda(phi, s, 0.0) == doctest::Approx(std::exp(s.mu_hat0)).epsilon(1e-15));
    }
  }
}

TEST_CASE("solvent root matches bisection oracle") {
  for (const IonSystem& s : reference_systems()) {
    for (double lambda : {1.0, 10.0, 1e3}) {
      for (double phi : {-2.0, 0.0, 1.5}) {
        const double got = solve_c0_lambda(phi, s, lambda);
        CHECK(std::fabs(got - oracle::c0_lambda(s, phi, lambda)) <= 1e-10);
        CHECK(std::fabs(oracle::h1(s, got, phi, lambda)) <= 1e-10);
      }
    }
  }
}

TEST_CASE("solvent root obeys the uniform upper bound when above one") {
  for (const IonSystem& s : {reference_system_a(0.0, 0.0), reference_system_b(0.0, 0.5)}) {
    const double l0 = s.steric_weight[0];
    for (double lambda : {1.0, 10.0, 100.0, 1e4}) {
      for (int k = 0; k <= 40; ++k) {
        const double phi = -5.0 + 0.25 * k;
        const double c0 = solve_c0_lambda(phi, s, lambda);
        CHECK(c0 > 0.0);
        if (c0 > 1.0) CHECK(c0 <= s.mu_tilde0 / l0 + s.mu_hat0 / (lambda * l0 * l0) + 1e-12);
      }
    }
  }
}

TEST_CASE("zero coupling concentrations are Boltzmann factors") {
  for (const IonSystem& s : reference_systems()) {
    for (double phi : {-1.0, 0.3, 4.0}) {
      const auto c = concentrations_lambda(phi, s, 0.0);
      for (std::size_t i = 1; i < c.size(); ++i) {
        const double expect = std::exp(s.exponent(i) * s.mu_hat0 + s.mu_bar[i] - s.valence[i] * phi);
        CHECK(c[i] == doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("concentrations satisfy the steady-state chemical balance") {
  for (const IonSystem& s : reference_systems()) {
    for (double lambda : {0.5, 10.0, 1e3, 1e5}) {
      for (double phi : {-4.0, -0.7, 0.0, 2.2, 5.0}) {
        const auto c = concentrations_lambda(phi, s, lambda);
        double occupied = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) occupied += s.steric_weight[j] * c[j];
        for (std::size_t i = 0; i < c.size(); ++i) {
          // ln cᵢ + zᵢφ + Λλᵢ Σ λⱼcⱼ − μᵢ with μᵢ = Λλᵢμ̃₀ + μ̄ᵢ + (λᵢ/λ₀)μ̂₀,
          // grouped so the O(Λ) parts cancel before rounding.
          const double res = (std::log(c[i]) + s.valence[i] * phi - s.mu_bar[i] -
                              s.steric_weight[i] / s.steric_weight[0] * s.mu_hat0) +
                             lambda * s.steric_weight[i] * (occupied - s.mu_tilde0);
          CHECK(std::fabs(res) <= 1e-10);
        }
      }
    }
  }
}

TEST_CASE("f_lambda profiles for moderate coupling are ordered toward f*") {
  const IonSystem s = reference_system_a();
  double prev_gap = 1e300;
  for (double lambda : {10.0, 20.0, 40.0}) {
    double gap = 0.0;
    double prev = 1e300;
    for (int k = 0; k <= 120; ++k) {
      const double phi = -3.0 + 0.05 * k;
      const double f = f_lambda(phi, s, lambda);
      CHECK(f < prev);
      prev = f;
      gap = std::max(gap, std::fabs(f - f_star(phi, s)));
    }
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("f_lambda symmetric binary vanishes at zero") {
  for (double lambda : {0.0, 1.0, 1e4}) {
    CHECK(std::fabs(f_lambda(0.0, symmetric_binary(), lambda)) <= 1e-14);
    CHECK(std::fabs(f_lambda(0.0, symmetric_binary(1.7, -0.4), lambda)) <= 1e-14);
  }
}

TEST_CASE("f_lambda is strictly decreasing and unbounded in sign") {
  for (const IonSystem& s : reference_systems()) {
    for (double lambda : {1.0, 10.0, 1e5}) {
      double prev = 1e300;
      for (int k = 0; k < 100; ++k) {
        const double phi = -3.0 + 6.0 * k / 99.0;
        const double f = f_lambda(phi, s, lambda);
        CHECK(f < prev);
        prev = f;
      }
    }
  }
  CHECK(f_lambda(-20.0, reference_system_a(), 1.0) > 0.0);
  CHECK(f_lambda(20.0, reference_system_a(), 1.0) < 0.0);
}

TEST_CASE("df_lambda is negative and matches central differences") {
  for (const IonSystem& s : reference_systems()) {
    for (double lambda : {1.0, 10.0, 1e5}) {
      for (double phi : {-2.0, 0.0, 3.0}) {
        const double d = df_lambda(phi, s, lambda);
        CHECK(d < 0.0);
        const double fd = oracle::central_difference(
            [&](double x) { return f_lambda(x, s, lambda, 1e-15); }, phi);
        CHECK(std::fabs(d - fd) <= 1e-6 * std::fabs(fd));
      }
    }
  }
}

TEST_CASE("df_lambda at zero coupling is minus the second charge moment") {
  const IonSystem s = reference_system_b();
  for (double phi : {-1.0, 0.5}) {
    const auto c = concentrations_lambda(phi, s, 0.0);
    double z2 = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) z2 += s.valence[i] * s.valence[i] * c[i];
    CHECK(df_lambda(phi, s, 0.0) == -z2);
  }
}

TEST_CASE("solvent-only system has a constant limit root") {
  IonSystem s{{0.0}, {2.0}, {0.3}, 1.5, 0.0};
  for (double phi : {-10.0, 0.0, 7.0}) {
    CHECK(solve_c0_star(phi, s) == doctest::Approx(1.5 / 2.0 * std::exp(-0.3)).epsilon(1e-14));
  }
}

TEST_CASE("limit solvent root matches bisection oracle") {
  for (const IonSystem& s : reference_systems()) {
    for (double phi : {-3.0, 0.0, 2.0}) {
      const double got = solve_c0_star(phi, s);
      CHECK(std::fabs(got - oracle::c0_star(s, phi)) <= 1e-10);
      CHECK(std::fabs(oracle::h2(s, got, phi)) <= 1e-12);
    }
  }
}

TEST_CASE("limit solvent root decays for large positive potential") {
  CHECK(solve_c0_star(40.0, reference_system_a()) < 1e-8);
  CHECK(solve_c0_star(40.0, reference_system_b()) < 1e-8);
}

TEST_CASE("limit concentrations fill the available volume") {
  for (const IonSystem& s : reference_systems()) {
    for (int k = 0; k < 50; ++k) {
      const double phi = -5.0 + 10.0 * k / 49.0;
      const auto c = concentrations_star(phi, s);
      double occupied = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) {
        occupied += s.steric_weight[i] * c[i];
        CHECK(c[i] > 0.0);
        CHECK(c[i] < s.mu_tilde0 / s.steric_weight[i]);
      }
      CHECK(std::fabs(occupied - s.mu_tilde0) <= 10 * kDefaultChemTol);
    }
  }
}

TEST_CASE("equal-size limit concentrations are a softmax") {
  IonSystem s = reference_system_a(0.4, 0.0);
  s.mu_bar = {0.4, 1.0, -0.5, 0.2};
  for (double phi : {-2.0, 0.0, 1.3}) {
    const auto c = concentrations_star(phi, s);
    double denom = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) denom += std::exp(s.mu_bar[j] - s.valence[j] * phi);
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double expect = s.mu_tilde0 / s.steric_weight[0] *
                            std::exp(s.mu_bar[i] - s.valence[i] * phi) / denom;
      CHECK(std::fabs(c[i] - expect) <= 1e-10);
    }
  }
}

TEST_CASE("symmetric binary limit concentrations are balanced at zero") {
  const auto c = concentrations_star(0.0, symmetric_binary(1.3, 0.2));
  CHECK(c[1] == doctest::Approx(c[2]).epsilon(1e-14));
  CHECK(std::fabs(f_star(0.0, symmetric_binary())) <= 1e-14);
}

TEST_CASE("f_star is bounded and strictly decreasing") {
  for (const IonSystem& s : reference_systems()) {
    double bound = 0.0;
    for (std::size_t i = 1; i < s.valence.size(); ++i) {
      bound += s.mu_tilde0 * std::fabs(s.valence[i]) / s.steric_weight[i];
    }
    double prev = 1e300;
    for (int k = 0; k < 100; ++k) {
      const double phi = -10.0 + 20.0 * k / 99.0;
      const double f = f_star(phi, s);
      CHECK(std::fabs(f) <= bound);
      CHECK(f < prev);
      prev = f;
    }
  }
}

TEST_CASE("df_star is negative and matches central differences") {
  for (const IonSystem& s : reference_systems()) {
    for (double phi : {-4.0, -2.0, 0.0, 3.0, 6.0}) {
      const double d = df_star(phi, s);
      CHECK(d < 0.0);
      const double fd =
          oracle::central_difference([&](double x) { return f_star(x, s, 1e-15); }, phi);
      CHECK(std::fabs(d - fd) <= 1e-6 * std::fabs(fd));
    }
  }
  const IonSystem sb = symmetric_binary(1.0, 0.5);
  const auto c = concentrations_star(0.0, sb);
  CHECK(df_star(0.0, sb) == doctest::Approx(-2.0 * c[1]).epsilon(1e-13));
}

TEST_CASE("saturation limits bracket f_star") {
  SUBCASE("symmetric binary is antisymmetric") {
    const SaturationLimits lim = saturation_limits(symmetric_binary());
    CHECK(lim.M_star == doctest::Approx(-lim.m_star).epsilon(1e-12));
  }
  SUBCASE("reference systems agree with the reduced-system oracle") {
    for (const IonSystem& s : reference_systems()) {
      const SaturationLimits lim = saturation_limits(s);
      CHECK(lim.m_star < 0.0);
      CHECK(lim.M_star > 0.0);
      const double f0 = f_star(0.0, s);
      CHECK(lim.m_star < f0);
      CHECK(f0 < lim.M_star);
      CHECK(std::fabs(lim.m_star - oracle::reduced_saturation(s, +1)) <= 1e-10);
      CHECK(std::fabs(lim.M_star - oracle::reduced_saturation(s, -1)) <= 1e-10);
    }
  }
  SUBCASE("same-sign species are rejected") {
    IonSystem s{{0.0, 1.0, 2.0}, {1.0, 1.0, 1.0}, {0.0, 1.0, 1.0}, 1.0, 0.0};
    CHECK_THROWS_AS(saturation_limits(s), InvalidInput);
  }
}

TEST_CASE("charge reversal mirrors both nonlinearities") {
  for (const IonSystem& s : {reference_system_a(), reference_system_b(0.0, 0.0)}) {
    const IonSystem r = negated(s);
    for (double phi : {-3.0, -0.5, 1.0, 4.0}) {
      for (double lambda : {1.0, 100.0}) {
        CHECK(f_lambda(-phi, r, lambda) == doctest::Approx(-f_lambda(phi, s, lambda)).epsilon(1e-11));
      }
      CHECK(f_star(-phi, r) == doctest::Approx(-f_star(phi, s)).epsilon(1e-11));
    }
  }
}

TEST_CASE("finite-coupling concentrations converge to the limit") {
  const IonSystem s = reference_system_a();
  double first_f = 0.0;
  double prev = 1e300;
  double prev_f = 1e300;
  for (double lambda : {1e1, 1e2, 1e3, 1e4, 1e5}) {
    double gap = 0.0;
    double gap_f = 0.0;
    for (int k = 0; k <= 200; ++k) {
      const double phi = -3.0 + 6.0 * k / 200.0;
      const auto c = concentrations_lambda(phi, s, lambda);
      const auto cs = concentrations_star(phi, s);
      for (std::size_t i = 0; i < c.size(); ++i) gap = std::max(gap, std::fabs(c[i] - cs[i]));
      gap_f = std::max(gap_f, std::fabs(f_lambda(phi, s, lambda) - f_star(phi, s)));
    }
    if (lambda == 1e1) first_f = gap_f;
    // Last decade shows the first-order rate.
    if (lambda == 1e5) CHECK(gap / prev == doctest::Approx(0.1).epsilon(0.1));
    CHECK(gap < prev);
    CHECK(gap_f < prev_f);
    prev = gap;
    prev_f = gap_f;
  }
  CHECK(prev_f < 1e-3 * first_f);
}

TEST_CASE("random electrolytes satisfy the chemistry invariants") {
  std::mt19937 rng(20240611);
  std::uniform_real_distribution<double> pot(-5.0, 5.0);
  for (int trial = 0; trial < 40; ++trial) {
    const IonSystem s = oracle::random_system(rng);
    for (int k = 0; k < 5; ++k) {
      const double phi = pot(rng);
      for (double lambda : {0.0, 1.0, 100.0, 1e5}) {
        const double c0 = solve_c0_lambda(phi, s, lambda);
        CHECK(c0 > 0.0);
        CHECK(std::fabs(oracle::h1(s, c0, phi, lambda)) <= 1e-10);
        CHECK(df_lambda(phi, s, lambda) < 0.0);
      }
      const double cs = solve_c0_star(phi, s);
      CHECK(std::fabs(oracle::h2(s, cs, phi)) <= 1e-10);
      CHECK(df_star(phi, s) < 0.0);
    }
  }
}

TEST_CASE("invalid chemistry inputs are rejected") {
  const IonSystem s = reference_system_a();
  CHECK_THROWS_AS(solve_c0_lambda(std::nan(""), s, 1.0), InvalidInput);
  CHECK_THROWS_AS(solve_c0_lambda(0.0, s, -1.0), InvalidInput);
  CHECK_THROWS_AS(solve_c0_lambda(0.0, s, 1.0, 0.0), InvalidInput);
  CHECK_THROWS_AS(f_star(std::numeric_limits<double>::infinity(), s), InvalidInput);
  IonSystem bad = s;
  bad.steric_weight[2] = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = s;
  bad.valence[0] = 1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
}
