// stericpb: PB-steric solves, coupling sweeps and table reproduction.
//
// Exit codes: 0 success, 2 bad config or input, 3 solver did not converge.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "steric/chemistry.hpp"
#include "steric/errors.hpp"
#include "steric/experiment.hpp"
#include "steric/mpb.hpp"

namespace fs = std::filesystem;
using namespace steric;

namespace {

struct CommonOptions {
  std::string config;
  std::string out;
  std::string format;
  std::size_t grid_order = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool need_config) {
  auto* c = cmd->add_option("--config", o.config, "experiment JSON file");
  if (need_config) c->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output directory (default: config output.dir)");
  cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--grid-order", o.grid_order, "collocation order L")->check(CLI::Range(2, 4096));
}

ExperimentConfig load(const CommonOptions& o) {
  std::ifstream in(o.config);
  if (!in) throw InvalidInput("cannot read config " + o.config);
  std::stringstream buf;
  buf << in.rdbuf();
  ExperimentConfig cfg = parse_config(buf.str());
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (!o.format.empty()) cfg.format = o.format == "json" ? OutputFormat::Json : OutputFormat::Csv;
  if (o.grid_order) cfg.grid_order = o.grid_order;
  return cfg;
}

OutputFormat format_of(const CommonOptions& o) {
  return o.format == "json" ? OutputFormat::Json : OutputFormat::Csv;
}

void write_file(const std::string& dir, const std::string& name, const std::string& text) {
  const fs::path d = dir.empty() ? fs::path(".") : fs::path(dir);
  fs::create_directories(d);
  const fs::path path = d / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << text;
  std::cout << "wrote " << path.string() << "\n";
}

const char* ext(OutputFormat f) { return f == OutputFormat::Json ? ".json" : ".csv"; }

IonSystem preset_system(const std::string& name) {
  if (name == "a") return reference_system_a();
  if (name == "b") return reference_system_b();
  if (name == "binary") return symmetric_binary();
  throw InvalidInput("unknown system preset " + name + " (a, b, binary)");
}

int run_solve(const CommonOptions& o) {
  const ExperimentConfig cfg = load(o);
  const ProfileTable t = emit_profiles(cfg, cfg.lambdas);
  const std::string text = cfg.format == OutputFormat::Json ? to_json(t) : to_csv(t);
  write_file(cfg.out_dir, cfg.name + "_profiles" + ext(cfg.format), text);
  return 0;
}

int run_sweep_cmd(const CommonOptions& o) {
  const ExperimentConfig cfg = load(o);
  const SweepReport rep = run_sweep(cfg);
  std::printf("%-10s %-12s %-6s %s\n", "Lambda", "error", "iters", "ratio");
  for (const SweepRow& r : rep.rows) {
    std::printf("%-10s %-12s %-6d %s\n", regime_label(r.regime).c_str(),
                format_sci4(r.error).c_str(), r.newton_iters,
                r.ratio ? std::to_string(*r.ratio).c_str() : "");
  }
  if (rep.fit) std::printf("fit: error ~ %.4e * Lambda^-%.4f (%zu points)\n", rep.fit->C, rep.fit->p, rep.fit->points);
  const std::string text = cfg.format == OutputFormat::Json ? to_json(rep) : to_csv(rep);
  write_file(cfg.out_dir, cfg.name + "_sweep" + ext(cfg.format), text);
  return 0;
}

int run_tables(const CommonOptions& o, bool calibrate, double mu_bar0, double mu_hat0) {
  const std::size_t order = o.grid_order ? o.grid_order : 64;
  const std::string dir = o.out.empty() ? "." : o.out;
  if (calibrate) {
    const std::vector<CalibrationRow> rows = calibrate_tables(order);
    for (const CalibrationRow& r : rows) {
      std::printf("mu_bar0=%g mu_hat0=%g  mean rel dev %.4f  max rel dev %.4f\n", r.mu_bar0,
                  r.mu_hat0, r.mean_rel_dev, r.max_rel_dev);
    }
    write_file(dir, "calibration.csv", to_csv(rows));
    mu_bar0 = rows.front().mu_bar0;
    mu_hat0 = rows.front().mu_hat0;
    std::printf("best: mu_bar0=%g mu_hat0=%g\n", mu_bar0, mu_hat0);
  }
  const std::vector<TableCell> cells = reproduce_tables(mu_bar0, mu_hat0, order);
  double worst = 0.0;
  for (const TableCell& c : cells) worst = std::max(worst, c.rel_dev);
  std::printf("%zu cells, max relative deviation %.4f\n", cells.size(), worst);
  const OutputFormat f = format_of(o);
  write_file(dir, std::string("tables") + ext(f), f == OutputFormat::Json ? to_json(cells) : to_csv(cells));
  return 0;
}

int run_limits(const CommonOptions& o, const std::string& preset) {
  const IonSystem sys = o.config.empty() ? preset_system(preset) : load(o).ions;
  sys.validate();
  const SaturationLimits lim = saturation_limits(sys);
  const MpbParams p = mpb_translate(sys);
  std::printf("m_star %.12e\nM_star %.12e\n", lim.m_star, lim.M_star);
  std::printf("constant Neumann window for rho0: (%.12e, %.12e)\n", -lim.M_star, -lim.m_star);
  std::printf("species volume beta_q beta_mu\n");
  for (std::size_t i = 0; i < p.volume.size(); ++i) {
    std::printf("%zu %.12e %.12e %.12e\n", i, p.volume[i], p.beta_q[i], p.beta_mu[i]);
  }
  return 0;
}

int run_chemistry(const CommonOptions& o, const std::string& preset, std::vector<double> lambdas,
                  double phi_min, double phi_max, std::size_t points) {
  const IonSystem sys = o.config.empty() ? preset_system(preset) : load(o).ions;
  const ProfileTable t = chemistry_profiles(sys, lambdas, phi_min, phi_max, points);
  const OutputFormat f = format_of(o);
  write_file(o.out.empty() ? "." : o.out, std::string("chemistry") + ext(f),
             f == OutputFormat::Json ? to_json(t) : to_csv(t));
  return 0;
}

int run_canonical(const std::string& dir) {
  for (const ExperimentConfig& c : canonical_configs()) {
    write_file(dir, c.name + ".json", serialize_config(c));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PB-steric solver and experiment driver"};
  app.require_subcommand(1);

  CommonOptions solve_opts, sweep_opts, table_opts, limit_opts, chem_opts;
  auto* solve = app.add_subcommand("solve", "solve one config and write phi profiles");
  add_common(solve, solve_opts, true);
  auto* sweep = app.add_subcommand("sweep", "errors against the limit over the config's Lambda list");
  add_common(sweep, sweep_opts, true);

  auto* tables = app.add_subcommand("tables", "reproduce the six canonical tables");
  add_common(tables, table_opts, false);
  bool calibrate = false;
  double mu_bar0 = 1.0, mu_hat0 = 1.0;
  tables->add_flag("--calibrate", calibrate, "scan (mu_bar0, mu_hat0) in {0,1}^2 and use the best");
  tables->add_option("--mu-bar0", mu_bar0, "solvent reference potential")->capture_default_str();
  tables->add_option("--mu-hat0", mu_hat0, "solvent offset")->capture_default_str();

  std::string preset = "a";
  auto* limits = app.add_subcommand("limits", "saturation values m*, M* and mPB parameters");
  add_common(limits, limit_opts, false);
  limits->add_option("--system", preset, "preset a, b or binary when no config is given");

  std::string chem_preset = "a";
  std::vector<double> chem_lambdas{10.0, 20.0, 40.0};
  double phi_min = -3.0, phi_max = 3.0;
  std::size_t points = 121;
  auto* chem = app.add_subcommand("chemistry", "f_Lambda and f* over a potential range");
  add_common(chem, chem_opts, false);
  chem->add_option("--system", chem_preset, "preset a, b or binary when no config is given");
  chem->add_option("--lambdas", chem_lambdas, "coupling values")->delimiter(',');
  chem->add_option("--phi-min", phi_min);
  chem->add_option("--phi-max", phi_max);
  chem->add_option("--points", points)->check(CLI::Range(2, 1000000));

  std::string canon_dir = "configs";
  auto* canon = app.add_subcommand("canonical", "write the six canonical configs as JSON");
  canon->add_option("--out", canon_dir, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*solve) return run_solve(solve_opts);
    if (*sweep) return run_sweep_cmd(sweep_opts);
    if (*tables) return run_tables(table_opts, calibrate, mu_bar0, mu_hat0);
    if (*limits) return run_limits(limit_opts, preset);
    if (*chem) return run_chemistry(chem_opts, chem_preset, chem_lambdas, phi_min, phi_max, points);
    if (*canon) return run_canonical(canon_dir);
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
