#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "steric/bvp.hpp"
#include "steric/chemistry.hpp"
#include "steric/ion_system.hpp"

namespace steric {

/// Permanent charge ρ₀(x) as a polynomial Σ a_k x^k; empty means zero.
struct ChargeProfile {
  std::vector<double> coefficients;

  double operator()(double x) const;
  static ChargeProfile zero() { return {}; }
  static ChargeProfile constant(double c) { return {{c}}; }
};

enum class OutputFormat { Csv, Json };

struct ExperimentConfig {
  std::string name = "experiment";
  IonSystem ions;
  BoundaryCondition bc = Neumann{};
  double epsilon = 0.1;
  ChargeProfile rho0;
  std::size_t grid_order = 64;
  std::vector<Regime> lambdas;  // sweep entries; Limit{} entries are allowed
  SolverConfig solver;
  std::string out_dir = ".";
  OutputFormat format = OutputFormat::Csv;
};

/// Parses the JSON config format; throws InvalidInput with a field path on
/// any schema violation.
ExperimentConfig parse_config(std::string_view json_text);

/// Canonical JSON text; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const ExperimentConfig& cfg);

BvpProblem build_problem(const ExperimentConfig& cfg, std::shared_ptr<const SpectralGrid> grid,
                         const Regime& regime);

struct SweepRow {
  Regime regime;
  double error = 0.0;  // ‖φ_Λ − φ*‖∞
  int newton_iters = 0;
  std::optional<double> ratio;  // error(this)/error(previous) when Λ grew tenfold
};

struct RateFit {
  double C = 0.0;
  double p = 0.0;
  double rms_residual = 0.0;  // of ln error about the fitted line
  std::size_t points = 0;
};

struct SweepReport {
  std::string name;
  std::vector<SweepRow> rows;  // sorted by Λ, Limit last
  std::optional<RateFit> fit;
};

/// Solves the limit problem once and every listed regime on the shared grid;
/// independent solves run concurrently.
SweepReport run_sweep(const ExperimentConfig& cfg);

/// Least squares of ln error against ln Λ over rows within `decades` of the
/// largest finite Λ; error ≈ C·Λ^{−p}. Empty when fewer than two usable rows.
std::optional<RateFit> fit_rate(std::span<const SweepRow> rows, double decades = 3.0);

/// Column-oriented numeric table with a header row.
struct ProfileTable {
  std::vector<std::string> headers;
  std::vector<std::vector<double>> columns;
};

/// Columns x, φ_Λ for each listed Λ, then φ*.
ProfileTable emit_profiles(const ExperimentConfig& cfg, std::span<const Regime> lambdas);

/// Columns φ, f_Λ for each Λ, then f*, over an even φ-grid.
ProfileTable chemistry_profiles(const IonSystem& sys, std::span<const double> lambdas,
                                double phi_min, double phi_max, std::size_t points);

struct TableCell {
  int table = 0;       // 1 Robin, 2 Dirichlet, 3 Neumann
  char variant = 'a';  // steric weight set
  double lambda = 0.0;
  double value = 0.0;
  double reference = 0.0;
  double rel_dev = 0.0;
};

/// The six canonical configurations (tables 1–3 × weight sets a, b).
std::vector<ExperimentConfig> canonical_configs(double mu_bar0 = 1.0, double mu_hat0 = 1.0,
                                                std::size_t grid_order = 64);

/// Reference ‖φ_Λ − φ*‖∞ values for the canonical configurations.
double reference_value(int table, char variant, double lambda);

/// All 36 cells with reference values and relative deviations.
std::vector<TableCell> reproduce_tables(double mu_bar0 = 1.0, double mu_hat0 = 1.0,
                                        std::size_t grid_order = 64);

struct CalibrationRow {
  double mu_bar0;
  double mu_hat0;
  double mean_rel_dev;
  double max_rel_dev;
};

/// Tables under each (μ̄₀, μ̂₀) ∈ {0,1}², best candidate first.
std::vector<CalibrationRow> calibrate_tables(std::size_t grid_order = 64);

std::string regime_label(const Regime& r);

/// Fixed-format writers; identical input gives byte-identical output.
std::string to_csv(const SweepReport& report);
std::string to_json(const SweepReport& report);
std::string to_csv(const ProfileTable& table);
std::string to_json(const ProfileTable& table);
std::string to_csv(std::span<const TableCell> cells);
std::string to_json(std::span<const TableCell> cells);
std::string to_csv(std::span<const CalibrationRow> rows);

/// %.4e, e.g. 1.8193e-05.
std::string format_sci4(double v);

}  // namespace steric
