#include "steric/mpb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "steric/errors.hpp"

namespace steric {

namespace {

void check_params(const MpbParams& p) {
  const std::size_t n = p.volume.size();
  if (n == 0 || p.beta_q.size() != n || p.beta_mu.size() != n) {
    throw InvalidInput("mpb parameters: mismatched lengths");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(p.volume[i] > 0.0) || !std::isfinite(p.volume[i])) {
      throw InvalidInput("mpb parameters: volumes must be positive");
    }
    if (!std::isfinite(p.beta_q[i]) || !std::isfinite(p.beta_mu[i])) {
      throw InvalidInput("mpb parameters: non-finite entry");
    }
  }
}

}  // namespace

MpbParams mpb_translate(const IonSystem& sys) {
  sys.validate();
  const std::size_t n = sys.valence.size();
  MpbParams p{std::vector<double>(n), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) p.volume[i] = sys.steric_weight[i] / sys.mu_tilde0;
  const double log_v0 = std::log(p.volume[0]);
  for (std::size_t i = 1; i < n; ++i) {
    const double ratio = p.volume[i] / p.volume[0];
    p.beta_q[i] = sys.valence[i];
    p.beta_mu[i] = sys.mu_bar[i] - ratio * sys.mu_bar[0] - ratio * log_v0 + std::log(p.volume[i]);
  }
  return p;
}

IonSystem mpb_untranslate(const MpbParams& p, double mu_tilde0, double mu_hat0, double mu_bar0) {
  check_params(p);
  const std::size_t n = p.volume.size();
  if (!(mu_tilde0 > 0.0)) throw InvalidInput("mpb parameters: mu_tilde0 must be positive");
  IonSystem sys;
  sys.valence.assign(n, 0.0);
  sys.steric_weight.resize(n);
  sys.mu_bar.assign(n, 0.0);
  sys.mu_tilde0 = mu_tilde0;
  sys.mu_hat0 = mu_hat0;
  const double log_v0 = std::log(p.volume[0]);
  for (std::size_t i = 0; i < n; ++i) sys.steric_weight[i] = p.volume[i] * mu_tilde0;
  sys.mu_bar[0] = mu_bar0;
  for (std::size_t i = 1; i < n; ++i) {
    const double ratio = p.volume[i] / p.volume[0];
    sys.valence[i] = p.beta_q[i];
    sys.mu_bar[i] = p.beta_mu[i] + ratio * log_v0 - std::log(p.volume[i]) + ratio * mu_bar0;
  }
  sys.validate();
  return sys;
}

double mpb_charge_density(double psi, const MpbParams& p) {
  if (!std::isfinite(psi)) throw InvalidInput("mpb: non-finite potential");
  check_params(p);
  const std::size_t n = p.volume.size();
  // Unknown s = ln(v₀c₀); vᵢcᵢ = exp((vᵢ/v₀)s + βμᵢ − βqᵢψ), v₀c₀ = eˢ.
  auto occupied = [&](double s) {
    double total = std::exp(s);
    for (std::size_t i = 1; i < n; ++i) {
      total += std::exp(p.volume[i] / p.volume[0] * s + p.beta_mu[i] - p.beta_q[i] * psi);
    }
    return total - 1.0;
  };
  // Each occupied fraction is below 1 at the root, which bounds s from above
  // by 0 and from below by the species whose fraction must reach 1/n.
  double lo = -std::log(static_cast<double>(n));
  for (std::size_t i = 1; i < n; ++i) {
    const double r = p.volume[i] / p.volume[0];
    lo = std::min(lo, (-std::log(static_cast<double>(n)) - p.beta_mu[i] + p.beta_q[i] * psi) / r);
  }
  double hi = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double r = p.volume[i] / p.volume[0];
    hi = std::min(hi, (-p.beta_mu[i] + p.beta_q[i] * psi) / r);
  }
  double s = hi;
  if (occupied(lo) >= 0.0) {
    s = lo;
  } else if (occupied(hi) > 0.0) {
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        occupied, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
    s = 0.5 * (a + b);
  }
  double charge = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double vc = std::exp(p.volume[i] / p.volume[0] * s + p.beta_mu[i] - p.beta_q[i] * psi);
    charge += p.beta_q[i] * vc / p.volume[i];
  }
  return charge;
}

}  // namespace steric
