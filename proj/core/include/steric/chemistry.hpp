#pragma once

#include <variant>
#include <vector>

#include "steric/ion_system.hpp"

namespace steric {

/// Absolute tolerance on the scalar solvent-equation residual.
inline constexpr double kDefaultChemTol = 1e-12;

/// Coupling strength Λ ≥ 0 of the PB-steric equation.
struct FiniteLambda {
  double value;
};

/// The Λ → ∞ modified-PB limit.
struct Limit {};

using Regime = std::variant<FiniteLambda, Limit>;

inline bool is_limit(const Regime& r) noexcept { return std::holds_alternative<Limit>(r); }

/// Saturation values of the limiting charge density: m* < 0 < M*.
struct SaturationLimits {
  double m_star;
  double M_star;
};

/// Charge density and its slope at one potential value.
struct ChargeDensity {
  double value;
  double slope;
};

// Finite-Λ branch. The solvent root c₀ solves
//   ln t + Λλ₀ Σⱼ λⱼ t^{λⱼ/λ₀} exp(μ̄ⱼ − zⱼφ) − μ₀ = 0,  μ₀ = Λλ₀μ̃₀ + μ̂₀,
// and the remaining concentrations follow as cᵢ = c₀^{λᵢ/λ₀} exp(μ̄ᵢ − zᵢφ).

double solve_c0_lambda(double phi, const IonSystem& sys, double lambda,
                       double tol = kDefaultChemTol);

/// All N+1 concentrations. Entry 0 is c₀·e^{μ̄₀}, which is the root itself
/// whenever μ̄₀ = 0.
std::vector<double> concentrations_lambda(double phi, const IonSystem& sys, double lambda,
                                          double tol = kDefaultChemTol);

double f_lambda(double phi, const IonSystem& sys, double lambda, double tol = kDefaultChemTol);

/// df_Λ/dφ = −zᵀ(diag(1/c) + Λλλᵀ)⁻¹z, evaluated via Sherman–Morrison.
double df_lambda(double phi, const IonSystem& sys, double lambda, double tol = kDefaultChemTol);

// Limit branch: c₀* solves Σⱼ λⱼ t^{λⱼ/λ₀} exp(μ̄ⱼ − zⱼφ) = μ̃₀.

double solve_c0_star(double phi, const IonSystem& sys, double tol = kDefaultChemTol);
std::vector<double> concentrations_star(double phi, const IonSystem& sys,
                                        double tol = kDefaultChemTol);
double f_star(double phi, const IonSystem& sys, double tol = kDefaultChemTol);
double df_star(double phi, const IonSystem& sys, double tol = kDefaultChemTol);

/// f and df/dφ from a single root solve, for either regime.
ChargeDensity charge_density(double phi, const IonSystem& sys, const Regime& regime,
                             double tol = kDefaultChemTol);

/// Limits of f* as φ → ±∞, found by doubling |φ| until two successive
/// doublings move the value by less than `tol`. Requires mixed valences.
SaturationLimits saturation_limits(const IonSystem& sys, double tol = kDefaultChemTol);

}  // namespace steric
