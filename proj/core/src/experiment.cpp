#include "steric/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "steric/errors.hpp"

namespace steric {
namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw InvalidInput("config: missing field " + path + key);
  }
  return obj.at(key);
}

double get_number(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number()) throw InvalidInput("config: " + path + key + " must be a number");
  return v.get<double>();
}

double get_number_or(const json& obj, const char* key, const std::string& path, double fallback) {
  return obj.contains(key) ? get_number(obj, key, path) : fallback;
}

std::vector<double> get_numbers(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_array()) throw InvalidInput("config: " + path + key + " must be an array");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) throw InvalidInput("config: " + path + key + " must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::string get_string(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) throw InvalidInput("config: " + path + key + " must be a string");
  return v.get<std::string>();
}

Regime parse_regime(const json& v) {
  if (v.is_string() && v.get<std::string>() == "limit") return Limit{};
  if (v.is_number()) {
    const double l = v.get<double>();
    if (!(l >= 0.0) || !std::isfinite(l)) throw InvalidInput("config: lambdas must be >= 0");
    return FiniteLambda{l};
  }
  throw InvalidInput("config: lambdas entries must be numbers or \"limit\"");
}

double regime_key(const Regime& r) {
  if (const auto* fl = std::get_if<FiniteLambda>(&r)) return fl->value;
  return std::numeric_limits<double>::infinity();
}

std::string printf_double(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

template <class E>
[[noreturn]] void rethrow_as(const E& e, const std::string& context) {
  throw E(context + ": " + e.what());
}

SolutionField solve_labelled(const BvpProblem& p, const SolverConfig& cfg) {
  const std::string label = "Lambda=" + regime_label(p.regime);
  try {
    return newton_solve(p, cfg);
  } catch (const ConvergenceError& e) {
    rethrow_as(e, label);
  } catch (const Unsolvable& e) {
    rethrow_as(e, label);
  } catch (const InvalidInput& e) {
    rethrow_as(e, label);
  }
}

struct Reference {
  int table;
  char variant;
  double values[6];
};

constexpr double kTableLambdas[6] = {1.0, 1e1, 1e2, 1e3, 1e4, 1e5};

constexpr Reference kReferences[] = {
    {1, 'a', {5.9950e-01, 1.4501e-01, 1.7715e-02, 1.8144e-03, 1.8189e-04, 1.8193e-05}},
    {1, 'b', {6.4144e-01, 1.3755e-01, 1.5933e-02, 1.6200e-03, 1.6227e-04, 1.6230e-05}},
    {2, 'a', {6.2243e-01, 1.4654e-01, 1.7727e-02, 1.8133e-03, 1.8175e-04, 1.8179e-05}},
    {2, 'b', {6.4429e-01, 1.3285e-01, 1.5170e-02, 1.5393e-03, 1.5416e-04, 1.5419e-05}},
    {3, 'a', {3.0027e-01, 9.4618e-02, 1.2565e-02, 1.3010e-03, 1.3057e-04, 1.3062e-05}},
    {3, 'b', {5.3706e-01, 1.6046e-01, 2.0737e-02, 2.1385e-03, 2.1452e-04, 2.1459e-05}},
};

}  // namespace

double ChargeProfile::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::string regime_label(const Regime& r) {
  if (const auto* fl = std::get_if<FiniteLambda>(&r)) return printf_double("%g", fl->value);
  return "limit";
}

ExperimentConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("config: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InvalidInput("config: top level must be an object");

  ExperimentConfig cfg;
  if (doc.contains("name")) cfg.name = get_string(doc, "name", "");

  const json& ions = require(doc, "ions", "");
  cfg.ions.valence = get_numbers(ions, "valence", "ions.");
  cfg.ions.steric_weight = get_numbers(ions, "steric_weight", "ions.");
  cfg.ions.mu_bar = get_numbers(ions, "mu_bar", "ions.");
  cfg.ions.mu_tilde0 = get_number(ions, "mu_tilde0", "ions.");
  cfg.ions.mu_hat0 = get_number_or(ions, "mu_hat0", "ions.", 0.0);
  cfg.ions.validate();

  const json& bc = require(doc, "boundary", "");
  const std::string type = get_string(bc, "type", "boundary.");
  if (type == "robin") {
    cfg.bc = Robin{get_number(bc, "eta", "boundary."), get_number(bc, "left", "boundary."),
                   get_number(bc, "right", "boundary.")};
    if (!(std::get<Robin>(cfg.bc).eta > 0.0)) {
      throw InvalidInput("config: boundary.eta must be positive for robin; use dirichlet");
    }
  } else if (type == "dirichlet") {
    cfg.bc = Dirichlet{get_number(bc, "left", "boundary."), get_number(bc, "right", "boundary.")};
  } else if (type == "neumann") {
    cfg.bc = Neumann{};
  } else {
    throw InvalidInput("config: boundary.type must be robin, dirichlet or neumann");
  }

  cfg.epsilon = get_number_or(doc, "epsilon", "", 0.1);
  if (!(cfg.epsilon > 0.0)) throw InvalidInput("config: epsilon must be positive");

  if (doc.contains("rho0")) {
    const json& rho = doc.at("rho0");
    const std::string kind = get_string(rho, "type", "rho0.");
    if (kind == "zero") {
      cfg.rho0 = ChargeProfile::zero();
    } else if (kind == "constant") {
      cfg.rho0 = ChargeProfile::constant(get_number(rho, "value", "rho0."));
    } else if (kind == "polynomial") {
      cfg.rho0.coefficients = get_numbers(rho, "coefficients", "rho0.");
    } else {
      throw InvalidInput("config: rho0.type must be zero, constant or polynomial");
    }
  }

  if (doc.contains("grid_order")) {
    const json& g = doc.at("grid_order");
    if (!g.is_number_integer() || g.get<long long>() < 2) {
      throw InvalidInput("config: grid_order must be an integer >= 2");
    }
    cfg.grid_order = g.get<std::size_t>();
  }

  if (doc.contains("lambdas")) {
    const json& ls = doc.at("lambdas");
    if (!ls.is_array()) throw InvalidInput("config: lambdas must be an array");
    for (const json& e : ls) cfg.lambdas.push_back(parse_regime(e));
  }

  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    cfg.solver.newton_tol = get_number_or(s, "newton_tol", "solver.", cfg.solver.newton_tol);
    cfg.solver.chem_tol = get_number_or(s, "chem_tol", "solver.", cfg.solver.chem_tol);
    cfg.solver.step_tol = get_number_or(s, "step_tol", "solver.", cfg.solver.step_tol);
    if (s.contains("max_iters")) {
      if (!s.at("max_iters").is_number_integer()) {
        throw InvalidInput("config: solver.max_iters must be an integer");
      }
      cfg.solver.max_iters = s.at("max_iters").get<int>();
    }
    if (!(cfg.solver.newton_tol > 0.0) || !(cfg.solver.chem_tol > 0.0) ||
        cfg.solver.max_iters < 1 || !(cfg.solver.step_tol >= 0.0)) {
      throw InvalidInput("config: solver tolerances and max_iters must be positive");
    }
  }

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    if (o.contains("dir")) cfg.out_dir = get_string(o, "dir", "output.");
    if (o.contains("format")) {
      const std::string f = get_string(o, "format", "output.");
      if (f == "csv") {
        cfg.format = OutputFormat::Csv;
      } else if (f == "json") {
        cfg.format = OutputFormat::Json;
      } else {
        throw InvalidInput("config: output.format must be csv or json");
      }
    }
  }
  return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  json doc;
  doc["name"] = cfg.name;
  doc["ions"] = {{"valence", cfg.ions.valence},
                 {"steric_weight", cfg.ions.steric_weight},
                 {"mu_bar", cfg.ions.mu_bar},
                 {"mu_tilde0", cfg.ions.mu_tilde0},
                 {"mu_hat0", cfg.ions.mu_hat0}};
  if (const auto* r = std::get_if<Robin>(&cfg.bc)) {
    doc["boundary"] = {{"type", "robin"}, {"eta", r->eta}, {"left", r->left}, {"right", r->right}};
  } else if (const auto* d = std::get_if<Dirichlet>(&cfg.bc)) {
    doc["boundary"] = {{"type", "dirichlet"}, {"left", d->left}, {"right", d->right}};
  } else {
    doc["boundary"] = {{"type", "neumann"}};
  }
  doc["epsilon"] = cfg.epsilon;
  if (cfg.rho0.coefficients.empty()) {
    doc["rho0"] = {{"type", "zero"}};
  } else if (cfg.rho0.coefficients.size() == 1) {
    doc["rho0"] = {{"type", "constant"}, {"value", cfg.rho0.coefficients[0]}};
  } else {
    doc["rho0"] = {{"type", "polynomial"}, {"coefficients", cfg.rho0.coefficients}};
  }
  doc["grid_order"] = cfg.grid_order;
  json ls = json::array();
  for (const Regime& r : cfg.lambdas) {
    if (const auto* fl = std::get_if<FiniteLambda>(&r)) {
      ls.push_back(fl->value);
    } else {
      ls.push_back("limit");
    }
  }
  doc["lambdas"] = ls;
  doc["solver"] = {{"newton_tol", cfg.solver.newton_tol},
                   {"max_iters", cfg.solver.max_iters},
                   {"chem_tol", cfg.solver.chem_tol},
                   {"step_tol", cfg.solver.step_tol}};
  doc["output"] = {{"dir", cfg.out_dir},
                   {"format", cfg.format == OutputFormat::Csv ? "csv" : "json"}};
  return doc.dump(2) + "\n";
}

BvpProblem build_problem(const ExperimentConfig& cfg, std::shared_ptr<const SpectralGrid> grid,
                         const Regime& regime) {
  std::vector<double> rho = sample(*grid, cfg.rho0);
  return make_problem(std::move(grid), cfg.epsilon, std::move(rho), cfg.bc, cfg.ions, regime);
}

std::optional<RateFit> fit_rate(std::span<const SweepRow> rows, double decades) {
  double lmax = 0.0;
  for (const SweepRow& r : rows) {
    if (const auto* fl = std::get_if<FiniteLambda>(&r.regime); fl && r.error > 0.0) {
      lmax = std::max(lmax, fl->value);
    }
  }
  const double cutoff = lmax * std::pow(10.0, -decades);
  std::vector<double> xs;
  std::vector<double> ys;
  for (const SweepRow& r : rows) {
    const auto* fl = std::get_if<FiniteLambda>(&r.regime);
    if (!fl || !(fl->value > 0.0) || !(r.error > 0.0) || fl->value < cutoff) continue;
    xs.push_back(std::log(fl->value));
    ys.push_back(std::log(r.error));
  }
  if (xs.size() < 2) return std::nullopt;
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) return std::nullopt;
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (intercept + slope * xs[i]);
    ss += e * e;
  }
  return RateFit{std::exp(intercept), -slope, std::sqrt(ss / n), xs.size()};
}

SweepReport run_sweep(const ExperimentConfig& cfg) {
  auto grid = std::make_shared<const SpectralGrid>(build_grid(cfg.grid_order));
  const BvpProblem limit_problem = build_problem(cfg, grid, Limit{});
  const Diagnosis diag = check_solvability(limit_problem);
  if (!diag.ok()) {
    if (diag.status == Solvability::NeumannMeanNonzero ||
        diag.status == Solvability::ChargeOutsideSaturation) {
      throw Unsolvable(diag.message);
    }
    throw InvalidInput(diag.message);
  }
  SolverConfig solver = cfg.solver;
  solver.compute_energy = false;
  const SolutionField reference = solve_labelled(limit_problem, solver);

  std::vector<Regime> order = cfg.lambdas;
  std::stable_sort(order.begin(), order.end(),
                   [](const Regime& a, const Regime& b) { return regime_key(a) < regime_key(b); });

  std::vector<std::future<SolutionField>> pending;
  pending.reserve(order.size());
  for (const Regime& r : order) {
    pending.push_back(std::async(std::launch::async, [&, r] {
      if (is_limit(r)) return reference;
      return solve_labelled(build_problem(cfg, grid, r), solver);
    }));
  }

  SweepReport report;
  report.name = cfg.name;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const SolutionField s = pending[i].get();
    SweepRow row{order[i], max_norm_diff(s.values, reference.values), s.newton_iters, {}};
    if (!report.rows.empty()) {
      const SweepRow& prev = report.rows.back();
      const auto* a = std::get_if<FiniteLambda>(&prev.regime);
      const auto* b = std::get_if<FiniteLambda>(&row.regime);
      if (a && b && prev.error > 0.0 && std::fabs(b->value - 10.0 * a->value) <= 1e-9 * b->value) {
        row.ratio = row.error / prev.error;
      }
    }
    report.rows.push_back(row);
  }
  report.fit = fit_rate(report.rows);
  return report;
}

ProfileTable emit_profiles(const ExperimentConfig& cfg, std::span<const Regime> lambdas) {
  auto grid = std::make_shared<const SpectralGrid>(build_grid(cfg.grid_order));
  SolverConfig solver = cfg.solver;
  solver.compute_energy = false;
  ProfileTable t;
  t.headers.push_back("x");
  t.columns.push_back(grid->nodes);
  for (const Regime& r : lambdas) {
    if (is_limit(r)) continue;
    t.headers.push_back("phi_lambda=" + regime_label(r));
    t.columns.push_back(solve_labelled(build_problem(cfg, grid, r), solver).values);
  }
  t.headers.push_back("phi_star");
  t.columns.push_back(solve_labelled(build_problem(cfg, grid, Limit{}), solver).values);
  return t;
}

ProfileTable chemistry_profiles(const IonSystem& sys, std::span<const double> lambdas,
                                double phi_min, double phi_max, std::size_t points) {
  sys.validate();
  if (points < 2 || !(phi_max > phi_min)) {
    throw InvalidInput("chemistry profiles: need at least two points on a nonempty range");
  }
  ProfileTable t;
  std::vector<double> phis(points);
  for (std::size_t k = 0; k < points; ++k) {
    phis[k] = phi_min + (phi_max - phi_min) * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  t.headers.push_back("phi");
  t.columns.push_back(phis);
  for (double l : lambdas) {
    std::vector<double> col(points);
    for (std::size_t k = 0; k < points; ++k) col[k] = f_lambda(phis[k], sys, l);
    t.headers.push_back("f_lambda=" + printf_double("%g", l));
    t.columns.push_back(std::move(col));
  }
  std::vector<double> star(points);
  for (std::size_t k = 0; k < points; ++k) star[k] = f_star(phis[k], sys);
  t.headers.push_back("f_star");
  t.columns.push_back(std::move(star));
  return t;
}

std::vector<ExperimentConfig> canonical_configs(double mu_bar0, double mu_hat0,
                                                std::size_t grid_order) {
  std::vector<ExperimentConfig> out;
  for (int table = 1; table <= 3; ++table) {
    for (char variant : {'a', 'b'}) {
      ExperimentConfig c;
      c.name = "table" + std::to_string(table) + "_" + variant;
      c.ions = variant == 'a' ? reference_system_a(mu_bar0, mu_hat0)
                              : reference_system_b(mu_bar0, mu_hat0);
      c.epsilon = 0.1;
      c.grid_order = grid_order;
      if (table == 1) {
        c.bc = Robin{0.1, -2.0, 3.0};
      } else if (table == 2) {
        c.bc = Dirichlet{-2.0, 3.0};
      } else {
        c.bc = Neumann{};
        c.rho0.coefficients = {0.0, 0.0, 0.0, 1.0};
      }
      for (double l : kTableLambdas) c.lambdas.push_back(FiniteLambda{l});
      out.push_back(std::move(c));
    }
  }
  return out;
}

double reference_value(int table, char variant, double lambda) {
  for (const Reference& ref : kReferences) {
    if (ref.table != table || ref.variant != variant) continue;
    for (int i = 0; i < 6; ++i) {
      if (std::fabs(kTableLambdas[i] - lambda) <= 1e-9 * lambda) return ref.values[i];
    }
  }
  throw InvalidInput("reference_value: no entry for table " + std::to_string(table) + variant +
                     " at Lambda=" + printf_double("%g", lambda));
}

std::vector<TableCell> reproduce_tables(double mu_bar0, double mu_hat0, std::size_t grid_order) {
  const std::vector<ExperimentConfig> configs = canonical_configs(mu_bar0, mu_hat0, grid_order);
  std::vector<std::future<SweepReport>> pending;
  for (const ExperimentConfig& c : configs) {
    pending.push_back(std::async(std::launch::async, [&c] { return run_sweep(c); }));
  }
  std::vector<TableCell> cells;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const SweepReport rep = pending[i].get();
    const int table = static_cast<int>(i / 2) + 1;
    const char variant = i % 2 == 0 ? 'a' : 'b';
    for (const SweepRow& row : rep.rows) {
      const double l = std::get<FiniteLambda>(row.regime).value;
      const double ref = reference_value(table, variant, l);
      cells.push_back({table, variant, l, row.error, ref, std::fabs(row.error - ref) / ref});
    }
  }
  return cells;
}

std::vector<CalibrationRow> calibrate_tables(std::size_t grid_order) {
  std::vector<CalibrationRow> rows;
  for (double mb : {0.0, 1.0}) {
    for (double mh : {0.0, 1.0}) {
      const std::vector<TableCell> cells = reproduce_tables(mb, mh, grid_order);
      double sum = 0.0;
      double worst = 0.0;
      for (const TableCell& c : cells) {
        sum += c.rel_dev;
        worst = std::max(worst, c.rel_dev);
      }
      rows.push_back({mb, mh, sum / static_cast<double>(cells.size()), worst});
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const CalibrationRow& a, const CalibrationRow& b) {
    return a.mean_rel_dev < b.mean_rel_dev;
  });
  return rows;
}

std::string format_sci4(double v) { return printf_double("%.4e", v); }

std::string to_csv(const SweepReport& report) {
  std::string out = "lambda,error,newton_iters,ratio\n";
  for (const SweepRow& r : report.rows) {
    out += regime_label(r.regime) + "," + format_sci4(r.error) + "," +
           std::to_string(r.newton_iters) + "," +
           (r.ratio ? printf_double("%.5f", *r.ratio) : std::string()) + "\n";
  }
  return out;
}

std::string to_json(const SweepReport& report) {
  json doc;
  doc["name"] = report.name;
  json rows = json::array();
  for (const SweepRow& r : report.rows) {
    json row = {{"lambda", regime_label(r.regime)},
                {"error", r.error},
                {"newton_iters", r.newton_iters}};
    row["ratio"] = r.ratio ? json(*r.ratio) : json(nullptr);
    rows.push_back(row);
  }
  doc["rows"] = rows;
  if (report.fit) {
    doc["fit"] = {{"C", report.fit->C},
                  {"p", report.fit->p},
                  {"rms_residual", report.fit->rms_residual},
                  {"points", report.fit->points}};
  } else {
    doc["fit"] = nullptr;
  }
  return doc.dump(2) + "\n";
}

std::string to_csv(const ProfileTable& table) {
  std::string out;
  for (std::size_t c = 0; c < table.headers.size(); ++c) {
    out += (c ? "," : "") + table.headers[c];
  }
  out += "\n";
  const std::size_t rows = table.columns.empty() ? 0 : table.columns.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      out += (c ? "," : "") + printf_double("%.12e", table.columns[c][r]);
    }
    out += "\n";
  }
  return out;
}

std::string to_json(const ProfileTable& table) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < table.headers.size(); ++c) doc[table.headers[c]] = table.columns[c];
  return doc.dump(2) + "\n";
}

std::string to_csv(std::span<const TableCell> cells) {
  std::string out = "table,case,lambda,value,reference,rel_dev\n";
  for (const TableCell& c : cells) {
    out += std::to_string(c.table) + "," + std::string(1, c.variant) + "," +
           printf_double("%g", c.lambda) + "," + format_sci4(c.value) + "," +
           format_sci4(c.reference) + "," + format_sci4(c.rel_dev) + "\n";
  }
  return out;
}

std::string to_json(std::span<const TableCell> cells) {
  json rows = json::array();
  for (const TableCell& c : cells) {
    rows.push_back({{"table", c.table},
                    {"case", std::string(1, c.variant)},
                    {"lambda", c.lambda},
                    {"value", c.value},
                    {"reference", c.reference},
                    {"rel_dev", c.rel_dev}});
  }
  return rows.dump(2) + "\n";
}

std::string to_csv(std::span<const CalibrationRow> rows) {
  std::string out = "mu_bar0,mu_hat0,mean_rel_dev,max_rel_dev\n";
  for (const CalibrationRow& r : rows) {
    out += printf_double("%g", r.mu_bar0) + "," + printf_double("%g", r.mu_hat0) + "," +
           format_sci4(r.mean_rel_dev) + "," + format_sci4(r.max_rel_dev) + "\n";
  }
  return out;
}

}  // namespace steric
