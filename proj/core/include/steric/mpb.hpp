#pragma once

#include <vector>

#include "steric/ion_system.hpp"

namespace steric {

/// Classical modified-PB parameterization: Σ vᵢcᵢ = 1 with
///   (vᵢ/v₀)·ln(v₀c₀) − ln(vᵢcᵢ) = βqᵢψ − βμᵢ   for i ≥ 1.
/// Vectors are indexed like IonSystem; entry 0 of beta_q and beta_mu is the
/// solvent and is always 0.
struct MpbParams {
  std::vector<double> volume;   // v_i > 0
  std::vector<double> beta_q;   // βq_i
  std::vector<double> beta_mu;  // βμ_i
};

/// vᵢ = λᵢ/μ̃₀, βqᵢ = zᵢ, βμᵢ = μ̄ᵢ − (λᵢ/λ₀)μ̄₀ − (vᵢ/v₀)ln v₀ + ln vᵢ.
MpbParams mpb_translate(const IonSystem& sys);

/// Inverse of mpb_translate. The mPB form carries no information about μ̃₀,
/// μ̂₀ or μ̄₀, so they are supplied by the caller.
IonSystem mpb_untranslate(const MpbParams& p, double mu_tilde0, double mu_hat0,
                          double mu_bar0 = 0.0);

/// Σ βqᵢcᵢ(ψ) evaluated directly in mPB variables; agrees with f*(ψ) of the
/// source system.
double mpb_charge_density(double psi, const MpbParams& p);

}  // namespace steric
