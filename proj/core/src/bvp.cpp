#include "steric/bvp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "root_finding.hpp"
#include "steric/errors.hpp"

namespace steric {
namespace {

constexpr double kMeanTol = 1e-10;

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

void check_shape(std::span<const double> phi, const BvpProblem& p) {
  if (!p.grid) throw InvalidInput("bvp: problem has no grid");
  if (phi.size() != p.grid->size()) throw InvalidInput("bvp: field size does not match grid");
  for (double v : phi) {
    if (!std::isfinite(v)) throw InvalidInput("bvp: non-finite field value");
  }
}

ChargeDensity node_chemistry(double phi, const BvpProblem& p, double tol, std::size_t k) {
  try {
    return charge_density(phi, p.system, p.regime, tol);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(std::string(e.what()) + " (node " + std::to_string(k) + ")");
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string(e.what()) + " (node " + std::to_string(k) + ")");
  }
}

bool is_constant(std::span<const double> v) {
  if (v.empty()) return true;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo <= 1e-14 * std::max(1.0, std::fabs(*hi));
}

// Residual and, when requested, Jacobian in one pass over the chemistry.
void assemble(std::span<const double> phi, const BvpProblem& p, double tol,
              Eigen::VectorXd& residual, Eigen::MatrixXd* jacobian) {
  check_shape(phi, p);
  const Eigen::MatrixXd& d = p.grid->diff;
  const auto n = static_cast<Eigen::Index>(phi.size());
  const auto x = as_vector(phi);
  const auto eps = as_vector(p.epsilon);
  const Eigen::VectorXd flux = eps.cwiseProduct(d * x);
  residual = -(d * flux);
  if (jacobian) *jacobian = -(d * eps.asDiagonal() * d);
  for (Eigen::Index k = 1; k + 1 < n; ++k) {
    const ChargeDensity cd = node_chemistry(x[k], p, tol, static_cast<std::size_t>(k));
    residual[k] -= p.rho0[static_cast<std::size_t>(k)] + cd.value;
    if (jacobian) (*jacobian)(k, k) -= cd.slope;
  }

  const Eigen::Index last = n - 1;
  auto set_row = [&](Eigen::Index row, double value, double diag, double dcoef) {
    residual[row] = value;
    if (jacobian) {
      jacobian->row(row) = dcoef * d.row(row);
      (*jacobian)(row, row) += diag;
    }
  };
  if (const auto* r = std::get_if<Robin>(&p.bc)) {
    set_row(0, x[0] - r->eta * d.row(0).dot(x) - r->left, 1.0, -r->eta);
    set_row(last, x[last] + r->eta * d.row(last).dot(x) - r->right, 1.0, r->eta);
  } else if (const auto* dir = std::get_if<Dirichlet>(&p.bc)) {
    set_row(0, x[0] - dir->left, 1.0, 0.0);
    set_row(last, x[last] - dir->right, 1.0, 0.0);
  } else {
    set_row(0, d.row(0).dot(x), 0.0, 1.0);
    set_row(last, d.row(last).dot(x), 0.0, 1.0);
  }
}

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

std::vector<double> initial_field(const BvpProblem& p, const InitialGuess& guess) {
  const SpectralGrid& g = *p.grid;
  if (const auto* v = std::get_if<std::vector<double>>(&guess)) {
    if (v->size() != g.size()) throw InvalidInput("bvp: provided initial guess has wrong size");
    return *v;
  }
  const bool want_linear =
      std::holds_alternative<LinearGuess>(guess) ||
      (std::holds_alternative<DefaultGuess>(guess) && !std::holds_alternative<Neumann>(p.bc));
  if (!want_linear) return std::vector<double>(g.size(), 0.0);
  double left = 0.0;
  double right = 0.0;
  if (const auto* r = std::get_if<Robin>(&p.bc)) {
    left = r->left;
    right = r->right;
  } else if (const auto* d = std::get_if<Dirichlet>(&p.bc)) {
    left = d->left;
    right = d->right;
  }
  return sample(g, [&](double x) { return left + 0.5 * (x + 1.0) * (right - left); });
}

}  // namespace

BvpProblem make_problem(std::shared_ptr<const SpectralGrid> grid, double epsilon,
                        std::vector<double> rho0, BoundaryCondition bc, IonSystem system,
                        Regime regime) {
  if (!grid) throw InvalidInput("bvp: null grid");
  BvpProblem p;
  p.epsilon.assign(grid->size(), epsilon);
  p.grid = std::move(grid);
  p.rho0 = std::move(rho0);
  p.bc = bc;
  p.system = std::move(system);
  p.regime = regime;
  return p;
}

std::vector<double> assemble_residual(std::span<const double> phi, const BvpProblem& p,
                                      double chem_tol) {
  Eigen::VectorXd r;
  assemble(phi, p, chem_tol, r, nullptr);
  return {r.data(), r.data() + r.size()};
}

Eigen::MatrixXd assemble_jacobian(std::span<const double> phi, const BvpProblem& p,
                                  double chem_tol) {
  Eigen::VectorXd r;
  Eigen::MatrixXd j;
  assemble(phi, p, chem_tol, r, &j);
  return j;
}

Diagnosis check_solvability(const BvpProblem& p) {
  if (!p.grid || p.epsilon.size() != p.grid->size() || p.rho0.size() != p.grid->size()) {
    return {Solvability::ShapeMismatch, "epsilon and rho0 must be sampled on the grid"};
  }
  for (double e : p.epsilon) {
    if (!(e > 0.0) || !std::isfinite(e)) {
      return {Solvability::NonpositiveEpsilon, "dielectric must be positive at every node"};
    }
  }
  for (double r : p.rho0) {
    if (!std::isfinite(r)) return {Solvability::ShapeMismatch, "rho0 has non-finite values"};
  }
  try {
    p.system.validate();
  } catch (const InvalidInput& e) {
    return {Solvability::ShapeMismatch, e.what()};
  }
  if (!p.system.has_mixed_valences()) {
    return {Solvability::ShapeMismatch, "ion system needs charged species of both signs"};
  }
  if (const auto* fl = std::get_if<FiniteLambda>(&p.regime)) {
    if (!(fl->value >= 0.0) || !std::isfinite(fl->value)) {
      return {Solvability::ShapeMismatch, "Lambda must be finite and nonnegative"};
    }
  }
  if (const auto* r = std::get_if<Robin>(&p.bc)) {
    if (!(r->eta > 0.0) || !std::isfinite(r->eta)) {
      return {Solvability::InvalidBoundary, "Robin requires eta > 0; use Dirichlet for eta = 0"};
    }
  }
  if (!std::holds_alternative<Neumann>(p.bc)) return {};

  if (is_constant(p.rho0)) {
    if (is_limit(p.regime)) {
      const SaturationLimits s = saturation_limits(p.system);
      const double rho = p.rho0.front();
      if (!(rho > -s.M_star && rho < -s.m_star)) {
        return {Solvability::ChargeOutsideSaturation,
                "constant rho0 = " + std::to_string(rho) + " lies outside (-M*, -m*) = (" +
                    std::to_string(-s.M_star) + ", " + std::to_string(-s.m_star) + ")"};
      }
    }
    return {};
  }
  const double mean = 0.5 * integrate(*p.grid, p.rho0);
  if (std::fabs(mean) > kMeanTol) {
    return {Solvability::NeumannMeanNonzero,
            "Neumann problem needs mean-zero rho0; mean is " + std::to_string(mean)};
  }
  return {};
}

double solve_constant_neumann(const IonSystem& sys, double rho0, const Regime& regime,
                              double tol) {
  sys.validate();
  if (!std::isfinite(rho0)) throw InvalidInput("constant Neumann: non-finite rho0");
  if (is_limit(regime)) {
    const SaturationLimits s = saturation_limits(sys);
    if (!(rho0 > -s.M_star && rho0 < -s.m_star)) {
      throw Unsolvable("constant Neumann: rho0 outside (-M*, -m*), no limiting solution");
    }
  }
  const double inner = tol * 1e-2;
  // g(φ) = −(ρ₀ + f(φ)) is increasing.
  auto g = [&](double phi) {
    const ChargeDensity cd = charge_density(phi, sys, regime, inner);
    return detail::ValueSlope{-(rho0 + cd.value), -cd.slope};
  };
  double lo = -1.0;
  double hi = 1.0;
  for (int k = 0; g(lo).value > 0.0; ++k) {
    if (k == 60) throw ConvergenceError("constant Neumann: no lower bracket");
    hi = lo;
    lo *= 2.0;
  }
  for (int k = 0; g(hi).value < 0.0; ++k) {
    if (k == 60) throw ConvergenceError("constant Neumann: no upper bracket");
    lo = hi;
    hi *= 2.0;
  }
  return detail::safeguarded_newton(g, lo, hi, 0.5 * (lo + hi), tol, "constant Neumann");
}

SolutionField newton_solve(const BvpProblem& p, const SolverConfig& cfg) {
  if (!(cfg.newton_tol > 0.0) || !(cfg.chem_tol > 0.0) || cfg.max_iters < 1 ||
      !(cfg.step_tol >= 0.0)) {
    throw InvalidInput("solver config: tolerances and iteration cap must be positive");
  }
  const Diagnosis diag = check_solvability(p);
  if (!diag.ok()) {
    if (diag.status == Solvability::NeumannMeanNonzero ||
        diag.status == Solvability::ChargeOutsideSaturation) {
      throw Unsolvable(diag.message);
    }
    throw InvalidInput(diag.message);
  }

  SolutionField out;
  out.regime = p.regime;
  Eigen::VectorXd residual;

  if (std::holds_alternative<Neumann>(p.bc) && is_constant(p.rho0)) {
    const double level = solve_constant_neumann(p.system, p.rho0.front(), p.regime,
                                                std::min(cfg.chem_tol, cfg.newton_tol));
    out.values.assign(p.grid->size(), level);
    assemble(out.values, p, cfg.chem_tol, residual, nullptr);
    out.residual_norm = max_abs(residual);
    return out;
  }

  std::vector<double> phi = initial_field(p, cfg.initial_guess);
  Eigen::MatrixXd jac;
  assemble(phi, p, cfg.chem_tol, residual, &jac);
  double norm = max_abs(residual);
  int iters = 0;
  std::vector<double> trial(phi.size());
  Eigen::VectorXd trial_residual;
  while (norm > cfg.newton_tol) {
    if (iters == cfg.max_iters) {
      throw ConvergenceError("newton: iteration cap reached with residual " +
                             std::to_string(norm));
    }
    if (cfg.on_iteration) cfg.on_iteration(iters, norm);
    const Eigen::VectorXd step = jac.partialPivLu().solve(-residual);
    if (cfg.step_tol > 0.0) {
      const double size = as_vector(phi).cwiseAbs().maxCoeff();
      if (max_abs(step) <= cfg.step_tol * std::max(1.0, size)) {
        for (std::size_t k = 0; k < phi.size(); ++k) phi[k] += step[static_cast<Eigen::Index>(k)];
        ++iters;
        assemble(phi, p, cfg.chem_tol, residual, nullptr);
        norm = max_abs(residual);
        break;
      }
    }
    double alpha = 1.0;
    double trial_norm = 0.0;
    for (int h = 0;; ++h) {
      if (h > cfg.max_halvings) {
        throw ConvergenceError("newton: damping stagnated at residual " + std::to_string(norm));
      }
      for (std::size_t k = 0; k < phi.size(); ++k) {
        trial[k] = phi[k] + alpha * step[static_cast<Eigen::Index>(k)];
      }
      bool evaluated = true;
      try {
        assemble(trial, p, cfg.chem_tol, trial_residual, nullptr);
      } catch (const Error&) {
        evaluated = false;
      }
      if (evaluated) {
        trial_norm = max_abs(trial_residual);
        if (std::isfinite(trial_norm) && trial_norm <= (1.0 - 1e-4 * alpha) * norm) break;
      }
      alpha *= 0.5;
    }
    phi.swap(trial);
    ++iters;
    assemble(phi, p, cfg.chem_tol, residual, &jac);
    norm = max_abs(residual);
  }
  out.values = std::move(phi);
  out.residual_norm = norm;
  out.newton_iters = iters;
  if (cfg.compute_energy && !std::holds_alternative<Neumann>(p.bc)) {
    out.energy = energy(out.values, p, cfg.chem_tol);
  }
  return out;
}

double energy(std::span<const double> phi, const BvpProblem& p, double chem_tol) {
  check_shape(phi, p);
  if (const auto* r = std::get_if<Robin>(&p.bc); r && !(r->eta > 0.0)) {
    throw InvalidInput("energy: Robin boundary with eta <= 0; use Dirichlet");
  }
  const SpectralGrid& g = *p.grid;
  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 15>;
  auto f = [&](double s) { return charge_density(s, p.system, p.regime, chem_tol).value; };
  std::map<double, double> antiderivative;
  auto F = [&](double v) {
    if (v == 0.0) return 0.0;
    if (auto it = antiderivative.find(v); it != antiderivative.end()) return it->second;
    const double val = v > 0.0 ? Quadrature::integrate(f, 0.0, v, 15, 1e-10)
                               : -Quadrature::integrate(f, v, 0.0, 15, 1e-10);
    antiderivative.emplace(v, val);
    return val;
  };

  const Eigen::VectorXd grad = g.diff * as_vector(phi);
  std::vector<double> density(phi.size());
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const double gk = grad[static_cast<Eigen::Index>(k)];
    density[k] = 0.5 * p.epsilon[k] * gk * gk - p.rho0[k] * phi[k] - F(phi[k]);
  }
  double e = integrate(g, density);
  if (const auto* r = std::get_if<Robin>(&p.bc)) {
    const double dl = phi.front() - r->left;
    const double dr = phi.back() - r->right;
    e += (p.epsilon.front() * dl * dl + p.epsilon.back() * dr * dr) / (2.0 * r->eta);
  }
  return e;
}

}  // namespace steric
