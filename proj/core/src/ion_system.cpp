#include "steric/ion_system.hpp"

#include <cmath>
#include <string>

#include "steric/errors.hpp"

namespace steric {

double IonSystem::chemical_potential(std::size_t i, double lambda) const {
  return lambda * steric_weight[i] * mu_tilde0 + mu_bar[i] + exponent(i) * mu_hat0;
}

void IonSystem::validate() const {
  if (valence.empty()) throw InvalidInput("ion system: no species");
  const auto n = valence.size();
  if (steric_weight.size() != n || mu_bar.size() != n) {
    throw InvalidInput("ion system: valence, steric_weight and mu_bar must have equal length");
  }
  if (valence[0] != 0.0) throw InvalidInput("ion system: solvent valence z_0 must be 0");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(valence[i]) || !std::isfinite(mu_bar[i])) {
      throw InvalidInput("ion system: non-finite entry for species " + std::to_string(i));
    }
    if (!(steric_weight[i] > 0.0) || !std::isfinite(steric_weight[i])) {
      throw InvalidInput("ion system: steric weight of species " + std::to_string(i) +
                         " must be positive");
    }
  }
  if (!(mu_tilde0 > 0.0) || !std::isfinite(mu_tilde0)) {
    throw InvalidInput("ion system: mu_tilde0 must be positive");
  }
  if (!std::isfinite(mu_hat0)) throw InvalidInput("ion system: mu_hat0 must be finite");
}

bool IonSystem::has_mixed_valences() const noexcept {
  bool pos = false;
  bool neg = false;
  for (std::size_t i = 1; i < valence.size(); ++i) {
    pos = pos || valence[i] > 0.0;
    neg = neg || valence[i] < 0.0;
  }
  return pos && neg;
}

IonSystem reference_system_a(double mu_bar0, double mu_hat0) {
  return IonSystem{{0.0, 1.0, -1.0, 2.0}, {1.0, 1.0, 1.0, 1.0}, {mu_bar0, 1.0, 1.0, 1.0}, 1.0,
                   mu_hat0};
}

IonSystem reference_system_b(double mu_bar0, double mu_hat0) {
  return IonSystem{{0.0, 1.0, -1.0, 2.0}, {1.0, 2.0, 1.5, 1.0}, {mu_bar0, 1.0, 1.0, 1.0}, 1.0,
                   mu_hat0};
}

IonSystem symmetric_binary(double weight, double mu_bar) {
  return IonSystem{{0.0, 1.0, -1.0}, {weight, weight, weight}, {0.0, mu_bar, mu_bar}, 1.0, 0.0};
}

}  // namespace steric
