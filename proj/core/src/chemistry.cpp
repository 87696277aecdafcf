#include "steric/chemistry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "root_finding.hpp"
#include "steric/errors.hpp"

namespace steric {
namespace {

// log Σⱼ λⱼ exp(rⱼu + μ̄ⱼ − zⱼφ) and its u-derivative, with a max shift so
// that large |φ| neither overflows nor underflows the individual terms. The
// exponents reach |e| ≈ 10 in normal use and rounding in e is amplified by
// Λ in h₁, so the sum is accumulated in extended precision.
struct LogSum {
  long double log_sum;
  double dlog_du;
};

LogSum log_weighted_sum(const IonSystem& sys, double phi, double u) {
  const std::size_t n = sys.valence.size();
  auto exponent = [&](std::size_t j) {
    return std::log(static_cast<long double>(sys.steric_weight[j])) +
           static_cast<long double>(sys.steric_weight[j]) / sys.steric_weight[0] * u +
           sys.mu_bar[j] - static_cast<long double>(sys.valence[j]) * phi;
  };
  long double shift = -std::numeric_limits<long double>::infinity();
  for (std::size_t j = 0; j < n; ++j) shift = std::max(shift, exponent(j));
  long double sum = 0.0L;
  long double dsum = 0.0L;
  for (std::size_t j = 0; j < n; ++j) {
    const long double w = std::exp(exponent(j) - shift);
    sum += w;
    dsum += sys.exponent(j) * w;
  }
  return {shift + std::log(sum), static_cast<double>(dsum / sum)};
}

void check_phi(double phi) {
  if (!std::isfinite(phi)) throw InvalidInput("chemistry: non-finite potential");
}

void check_tol(double tol) {
  if (!(tol > 0.0)) throw InvalidInput("chemistry: tolerance must be positive");
}

// Bracket for the limit root in u = ln t: every term is at most μ̃₀ at the root
// and the largest is at least μ̃₀/(N+1).
std::pair<double, double> star_bracket(const IonSystem& sys, double phi) {
  const double target = std::log(sys.mu_tilde0);
  const double spread = std::log(static_cast<double>(sys.valence.size()));
  double lo = std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < sys.valence.size(); ++j) {
    const double b = std::log(sys.steric_weight[j]) + sys.mu_bar[j] - sys.valence[j] * phi;
    const double r = sys.exponent(j);
    hi = std::min(hi, (target - b) / r);
    lo = std::min(lo, (target - spread - b) / r);
  }
  return {lo, hi};
}

double initial_guess(const IonSystem& sys, double phi) {
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < sys.valence.size(); ++j) {
    shift = std::max(shift, std::log(sys.steric_weight[j]) + sys.mu_bar[j] - sys.valence[j] * phi);
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < sys.valence.size(); ++j) {
    sum += std::exp(std::log(sys.steric_weight[j]) + sys.mu_bar[j] - sys.valence[j] * phi - shift);
  }
  return std::log(sys.mu_tilde0) - shift - std::log(sum);
}

// One Newton correction evaluated in extended precision. The bracketed solve
// leaves u accurate to an ulp of u, which at large Λ is worth ~|u|·Λ·ε in h₁;
// the correction removes that before u is exponentiated.
long double polish(double u, long double h, long double slope) {
  const long double step = h / slope;
  if (!std::isfinite(static_cast<double>(step)) ||
      std::fabs(static_cast<double>(step)) > 1e-8 * std::max(1.0, std::fabs(u))) {
    return u;
  }
  return u - step;
}

long double solve_log_star(double phi, const IonSystem& sys, double tol) {
  const auto [lo, hi] = star_bracket(sys, phi);
  auto h2 = [&](double u) {
    const LogSum ls = log_weighted_sum(sys, phi, u);
    const long double s = std::exp(ls.log_sum);
    return detail::ValueSlope{static_cast<double>(s - sys.mu_tilde0),
                              static_cast<double>(s) * ls.dlog_du};
  };
  const double u =
      detail::safeguarded_newton(h2, lo, hi, initial_guess(sys, phi), tol, "limit solvent root");
  const LogSum ls = log_weighted_sum(sys, phi, u);
  const long double s = std::exp(ls.log_sum);
  return polish(u, s - sys.mu_tilde0, s * ls.dlog_du);
}

long double solve_log_lambda(double phi, const IonSystem& sys, double lambda, double tol) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidInput("chemistry: Lambda must be finite and nonnegative");
  }
  if (lambda == 0.0) return sys.mu_hat0;
  // At u = u* (limit root) the coupling term vanishes; at u = μ̂₀ the log term
  // does. Both terms share the sign of (u − their zero), so the root lies
  // between the two.
  const double u_star = static_cast<double>(solve_log_star(phi, sys, tol));
  const double lo = std::min(u_star, sys.mu_hat0);
  const double hi = std::max(u_star, sys.mu_hat0);
  if (lo == hi) return lo;
  const double coupling = lambda * sys.steric_weight[0];
  auto h1 = [&](double u) {
    const LogSum ls = log_weighted_sum(sys, phi, u);
    const long double s = std::exp(ls.log_sum);
    return detail::ValueSlope{
        static_cast<double>((u - sys.mu_hat0) + coupling * (s - sys.mu_tilde0)),
        1.0 + coupling * static_cast<double>(s) * ls.dlog_du};
  };
  const double u = detail::safeguarded_newton(
      h1, lo, hi, std::fmin(std::fmax(initial_guess(sys, phi), lo), hi), tol,
      "finite-Lambda solvent root");
  const LogSum ls = log_weighted_sum(sys, phi, u);
  const long double s = std::exp(ls.log_sum);
  return polish(u, (u - sys.mu_hat0) + coupling * (s - sys.mu_tilde0),
                1.0L + coupling * s * ls.dlog_du);
}

std::vector<double> concentrations_from_log(const IonSystem& sys, double phi, long double u) {
  std::vector<double> c(sys.valence.size());
  for (std::size_t j = 0; j < c.size(); ++j) {
    const long double r = static_cast<long double>(sys.steric_weight[j]) / sys.steric_weight[0];
    c[j] = static_cast<double>(
        std::exp(r * u + sys.mu_bar[j] - static_cast<long double>(sys.valence[j]) * phi));
  }
  return c;
}

// Σ zᵢcᵢ, Σ zᵢ²cᵢ, Σ zᵢλᵢcᵢ, Σ λᵢ²cᵢ over all species.
struct Moments {
  double charge = 0.0;
  double z2 = 0.0;
  double zl = 0.0;
  double l2 = 0.0;
};

Moments moments(const IonSystem& sys, const std::vector<double>& c) {
  Moments m;
  for (std::size_t j = 0; j < c.size(); ++j) {
    const double z = sys.valence[j];
    const double l = sys.steric_weight[j];
    m.charge += z * c[j];
    m.z2 += z * z * c[j];
    m.zl += z * l * c[j];
    m.l2 += l * l * c[j];
  }
  return m;
}

double slope_lambda(const Moments& m, double lambda) {
  if (lambda == 0.0) return -m.z2;
  return -(m.z2 - m.zl * m.zl / (1.0 / lambda + m.l2));
}

double slope_star(const Moments& m) { return m.zl * m.zl / m.l2 - m.z2; }

}  // namespace

double solve_c0_lambda(double phi, const IonSystem& sys, double lambda, double tol) {
  check_phi(phi);
  check_tol(tol);
  return static_cast<double>(std::exp(solve_log_lambda(phi, sys, lambda, tol)));
}

std::vector<double> concentrations_lambda(double phi, const IonSystem& sys, double lambda,
                                          double tol) {
  check_phi(phi);
  check_tol(tol);
  return concentrations_from_log(sys, phi, solve_log_lambda(phi, sys, lambda, tol));
}

double f_lambda(double phi, const IonSystem& sys, double lambda, double tol) {
  return moments(sys, concentrations_lambda(phi, sys, lambda, tol)).charge;
}

double df_lambda(double phi, const IonSystem& sys, double lambda, double tol) {
  return slope_lambda(moments(sys, concentrations_lambda(phi, sys, lambda, tol)), lambda);
}

double solve_c0_star(double phi, const IonSystem& sys, double tol) {
  check_phi(phi);
  check_tol(tol);
  return static_cast<double>(std::exp(solve_log_star(phi, sys, tol)));
}

std::vector<double> concentrations_star(double phi, const IonSystem& sys, double tol) {
  check_phi(phi);
  check_tol(tol);
  return concentrations_from_log(sys, phi, solve_log_star(phi, sys, tol));
}

double f_star(double phi, const IonSystem& sys, double tol) {
  return moments(sys, concentrations_star(phi, sys, tol)).charge;
}

double df_star(double phi, const IonSystem& sys, double tol) {
  return slope_star(moments(sys, concentrations_star(phi, sys, tol)));
}

ChargeDensity charge_density(double phi, const IonSystem& sys, const Regime& regime, double tol) {
  if (const auto* fl = std::get_if<FiniteLambda>(&regime)) {
    const Moments m = moments(sys, concentrations_lambda(phi, sys, fl->value, tol));
    return {m.charge, slope_lambda(m, fl->value)};
  }
  const Moments m = moments(sys, concentrations_star(phi, sys, tol));
  return {m.charge, slope_star(m)};
}

SaturationLimits saturation_limits(const IonSystem& sys, double tol) {
  check_tol(tol);
  if (!sys.has_mixed_valences()) {
    throw InvalidInput("saturation limits: need charged species of both signs");
  }
  constexpr int kMaxDoublings = 40;
  // Root noise must sit well below the saturation threshold.
  const double inner = tol * 1e-3;
  auto saturate = [&](double sign) {
    double phi = sign;
    double f1 = f_star(phi, sys, inner);
    double f2 = f_star(2.0 * phi, sys, inner);
    double f4 = f_star(4.0 * phi, sys, inner);
    for (int k = 0; k < kMaxDoublings; ++k) {
      if (std::fabs(f2 - f1) < tol && std::fabs(f4 - f2) < tol) return f4;
      phi *= 2.0;
      f1 = f2;
      f2 = f4;
      f4 = f_star(4.0 * phi, sys, inner);
    }
    throw ConvergenceError("saturation limits: f* did not saturate");
  };
  return {saturate(1.0), saturate(-1.0)};
}

}  // namespace steric
