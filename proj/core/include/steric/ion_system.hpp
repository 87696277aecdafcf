#pragma once

#include <cstddef>
#include <vector>

namespace steric {

/// Species data for an electrolyte with steric coupling g_ij = Λ·λ_i·λ_j.
///
/// Index 0 is the solvent (valence 0); indices 1..N are the charged species.
/// All per-species vectors have N+1 entries. `mu_bar` holds the shifted
/// chemical potentials μ̄_i = μ̂_i − (λ_i/λ_0)·μ̂_0; the solvent entry μ̄_0 is
/// identically zero under that definition but is kept as an explicit knob.
struct IonSystem {
  std::vector<double> valence;        // z_0..z_N
  std::vector<double> steric_weight;  // λ_0..λ_N
  std::vector<double> mu_bar;         // μ̄_0..μ̄_N
  double mu_tilde0 = 1.0;             // μ̃_0 > 0, limiting constraint level
  double mu_hat0 = 0.0;               // μ̂_0, offset in μ_0 = Λλ_0μ̃_0 + μ̂_0

  std::size_t n_species() const noexcept {
    return valence.empty() ? 0 : valence.size() - 1;
  }

  /// Ratio λ_i/λ_0.
  double exponent(std::size_t i) const { return steric_weight[i] / steric_weight[0]; }

  /// Chemical potential μ_i = Λλ_iμ̃_0 + μ̄_i + (λ_i/λ_0)·μ̂_0 implied by the
  /// stored fields.
  double chemical_potential(std::size_t i, double lambda) const;

  /// Throws InvalidInput when an invariant fails: matching sizes, z_0 = 0,
  /// λ_i > 0, μ̃_0 > 0, finite entries.
  void validate() const;

  /// True when some pair of charged species has opposite signs.
  bool has_mixed_valences() const noexcept;
};

/// Three charged species z = (0, 1, −1, 2) with μ̄_i = μ̃_0 = 1 and λ_0 = 1.
/// Case (a): λ_i = 1 for all i. Case (b): λ = (1, 2, 1.5, 1).
IonSystem reference_system_a(double mu_bar0 = 1.0, double mu_hat0 = 1.0);
IonSystem reference_system_b(double mu_bar0 = 1.0, double mu_hat0 = 1.0);

/// z = (0, 1, −1), equal weights and potentials; f(−φ) = −f(φ).
IonSystem symmetric_binary(double weight = 1.0, double mu_bar = 1.0);

}  // namespace steric
