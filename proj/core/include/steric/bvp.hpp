#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "steric/chemistry.hpp"
#include "steric/ion_system.hpp"
#include "steric/spectral_grid.hpp"

namespace steric {

/// φ + η ∂φ/∂ν = φ_bd with η > 0. At x = −1 the outward normal points left,
/// so the discrete row reads φ₀ − η(Dφ)₀ = left.
struct Robin {
  double eta;
  double left;
  double right;
};

/// Robin with η = 0.
struct Dirichlet {
  double left;
  double right;
};

/// ∂φ/∂ν = 0.
struct Neumann {};

using BoundaryCondition = std::variant<Robin, Dirichlet, Neumann>;

/// −(εφ′)′ = ρ₀ + f(φ) on (−1, 1), with f = f_Λ or f* per regime.
struct BvpProblem {
  std::shared_ptr<const SpectralGrid> grid;
  std::vector<double> epsilon;  // ε(x_k) > 0
  std::vector<double> rho0;     // ρ₀(x_k)
  BoundaryCondition bc = Neumann{};
  IonSystem system;
  Regime regime = Limit{};
};

struct DefaultGuess {};  // linear between boundary values, zero for Neumann
struct ZeroGuess {};
struct LinearGuess {};
using InitialGuess = std::variant<DefaultGuess, ZeroGuess, LinearGuess, std::vector<double>>;

struct SolverConfig {
  double newton_tol = 1e-10;  // max-norm residual
  // Also stop once a full Newton update is below step_tol·max(1, ‖φ‖∞); 0 turns
  // this off. Useful on fine grids whose residual floor exceeds newton_tol.
  double step_tol = 0.0;
  int max_iters = 50;
  int max_halvings = 30;
  double chem_tol = kDefaultChemTol;
  InitialGuess initial_guess = DefaultGuess{};
  bool compute_energy = true;  // Robin/Dirichlet only
  // Called with (iteration, residual norm) before each Newton step.
  std::function<void(int, double)> on_iteration;
};

struct SolutionField {
  std::vector<double> values;
  double residual_norm = 0.0;
  int newton_iters = 0;
  Regime regime = Limit{};
  std::optional<double> energy;
};

enum class Solvability {
  Ok,
  ShapeMismatch,
  NonpositiveEpsilon,
  InvalidBoundary,
  NeumannMeanNonzero,
  ChargeOutsideSaturation,
};

struct Diagnosis {
  Solvability status = Solvability::Ok;
  std::string message;

  bool ok() const noexcept { return status == Solvability::Ok; }
};

/// Collocation residual; interior rows −[D(ε∘Dφ)]_k − ρ₀_k − f(φ_k), first and
/// last rows replaced by the boundary equations.
std::vector<double> assemble_residual(std::span<const double> phi, const BvpProblem& p,
                                      double chem_tol = kDefaultChemTol);

/// Exact Jacobian of assemble_residual.
Eigen::MatrixXd assemble_jacobian(std::span<const double> phi, const BvpProblem& p,
                                  double chem_tol = kDefaultChemTol);

/// Damped Newton. Validates the problem first (Unsolvable / InvalidInput),
/// and returns the closed-form constant field for Neumann with constant ρ₀.
SolutionField newton_solve(const BvpProblem& p, const SolverConfig& cfg = {});

/// The constant φ̂ with ρ₀ + f(φ̂) = 0.
double solve_constant_neumann(const IonSystem& sys, double rho0, const Regime& regime,
                              double tol = kDefaultChemTol);

/// Discrete energy ∫[½ε|φ′|² − ρ₀φ − F(φ)]dx + Σ_{x=±1} ε(φ−φ_bd)²/(2η), where
/// F(φ) = ∫₀^φ f. The boundary sum is dropped for Dirichlet and Neumann.
double energy(std::span<const double> phi, const BvpProblem& p,
              double chem_tol = kDefaultChemTol);

Diagnosis check_solvability(const BvpProblem& p);

/// Constant-coefficient problem on a shared grid.
BvpProblem make_problem(std::shared_ptr<const SpectralGrid> grid, double epsilon,
                        std::vector<double> rho0, BoundaryCondition bc, IonSystem system,
                        Regime regime);

}  // namespace steric
