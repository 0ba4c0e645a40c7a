#include "CLI11.hpp"

#include "fracpot/experiments.hpp"
#include "fracpot/io.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace fracpot;

int cli_main(int argc, const char* const* argv);

struct CliOptions {
  ExperimentConfig cfg;
  std::string potential = "expcos";
  std::string out_dir = "out";
  std::string measurement;  // reconstruct: read data from this file instead of generating
  std::string kind = "spatial";
  std::string input;        // rates: sweep CSV to read
  std::string config_path;  // consumed before parsing; registered for --help only
};

std::string trim(const std::string& s) {
  const auto from = s.find_first_not_of(" \t\r");
  if (from == std::string::npos) return "";
  return s.substr(from, s.find_last_not_of(" \t\r") - from + 1);
}

// Expands every `--config FILE` into --key=value tokens in place.  Keys that
// also appear directly on the command line are skipped, so explicit arguments
// override the file.  Unknown keys survive as unrecognized arguments and fail
// the parse by name.
std::vector<std::string> apply_config_files(const std::vector<std::string>& raw) {
  std::set<std::string> explicit_keys;
  for (const std::string& a : raw) {
    if (a.rfind("--", 0) == 0 && a.rfind("--config", 0) != 0) {
      explicit_keys.insert(a.substr(2, a.find('=') - 2));
    }
  }
  std::vector<std::string> args;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    std::string file;
    if (raw[i] == "--config") {
      if (i + 1 == raw.size()) throw std::runtime_error("--config needs a file");
      file = raw[++i];
    } else if (raw[i].rfind("--config=", 0) == 0) {
      file = raw[i].substr(9);
    } else {
      args.push_back(raw[i]);
      continue;
    }
    std::ifstream in(file);
    if (!in) throw std::runtime_error("config: cannot open '" + file + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string entry = trim(line);
      if (entry.empty() || entry[0] == '#') continue;
      const auto eq = entry.find('=');
      if (eq == std::string::npos || trim(entry.substr(0, eq)).empty()) {
        throw std::runtime_error("config: line " + std::to_string(lineno) + " of '" + file +
                                 "' is not key=value");
      }
      const std::string key = trim(entry.substr(0, eq));
      if (key == "config") throw std::runtime_error("config: files do not nest");
      if (explicit_keys.count(key)) continue;
      args.push_back("--" + key + "=" + trim(entry.substr(eq + 1)));
    }
  }
  return args;
}

void add_common(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--config", o.config_path, "flat key=value configuration file");
  cmd->add_option("--alpha", o.cfg.alpha, "fractional order, in (0,1)")->capture_default_str();
  cmd->add_option("--horizon", o.cfg.horizon, "final time T")->capture_default_str();
  cmd->add_option("--steps", o.cfg.steps, "time steps N of the run grid")->capture_default_str();
  cmd->add_option("--cells", o.cfg.cells, "mesh cells M of the run grid")->capture_default_str();
  cmd->add_option("--potential", o.potential, "benchmark potential")
      ->check(CLI::IsMember({"expcos", "zigzag", "steps"}))
      ->capture_default_str();
  cmd->add_option("--x0", o.cfg.x0, "observation point in [0,1]")->capture_default_str();
  cmd->add_flag("--nonlinear", o.cfg.nonlinear, "use the semilinear source (u-1)(u-3)")
      ->capture_default_str();
  cmd->add_option("--delta", o.cfg.delta_percent, "noise level in percent")
      ->capture_default_str();
  cmd->add_option("--seed", o.cfg.seed, "noise seed")->capture_default_str();
  cmd->add_option("--fine-steps-factor", o.cfg.fine_steps_factor,
                  "data-generation time refinement")
      ->capture_default_str();
  cmd->add_option("--fine-cells-factor", o.cfg.fine_cells_factor,
                  "data-generation space refinement")
      ->capture_default_str();
  cmd->add_flag("--inverse-crime", o.cfg.inverse_crime,
                "same-grid self-test data (no refinement)")
      ->capture_default_str();
  cmd->add_option("--p", o.cfg.recon.p, "norm exponent")->capture_default_str();
  cmd->add_option("--omega", o.cfg.recon.omega, "exponential weight of the weighted norm")
      ->capture_default_str();
  cmd->add_option("--rel-tol", o.cfg.recon.rel_tol, "fixed-point stopping tolerance")
      ->capture_default_str();
  cmd->add_option("--max-iters", o.cfg.recon.max_iters, "fixed-point iteration budget")
      ->capture_default_str();
  cmd->add_option("--rho-bound", o.cfg.recon.rho_bound, "admissible upper bound for rho")
      ->capture_default_str();
  cmd->add_option("--rho-init", o.cfg.recon.rho_init, "constant initial guess")
      ->capture_default_str();
  cmd->add_option("--out", o.out_dir, "output directory")->capture_default_str();
}

void add_sweep_options(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--kind", o.kind, "experiment family")
      ->check(CLI::IsMember({"spatial", "temporal", "noise", "tau_ucurve", "iteration_decay"}))
      ->capture_default_str();
  cmd->add_option("--level-k", o.cfg.level_k, "dyadic exponents for the step ladder")
      ->delimiter(',');
  cmd->add_option("--cell-levels", o.cfg.cell_levels, "cell counts for the mesh ladder")
      ->delimiter(',');
  cmd->add_option("--delta-levels", o.cfg.delta_levels, "noise ladder in percent")
      ->delimiter(',');
  cmd->add_option("--seeds", o.cfg.seeds, "noise sweep seeds")->delimiter(',');
}

std::string join_ints(const std::vector<int>& v) {
  std::ostringstream out;
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  return out.str();
}

std::string join_doubles(const std::vector<double>& v) {
  std::ostringstream out;
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << format_full(v[i]);
  return out.str();
}

std::string join_seeds(const std::vector<std::uint64_t>& v) {
  std::ostringstream out;
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  return out.str();
}

// every resolved option, in a fixed order, so a manifest fully determines a run
std::vector<std::pair<std::string, std::string>> resolved_params(const std::string& command,
                                                                 const CliOptions& o) {
  std::vector<std::pair<std::string, std::string>> params = {
      {"alpha", format_full(o.cfg.alpha)},
      {"horizon", format_full(o.cfg.horizon)},
      {"steps", std::to_string(o.cfg.steps)},
      {"cells", std::to_string(o.cfg.cells)},
      {"potential", o.potential},
      {"x0", format_full(o.cfg.x0)},
      {"nonlinear", o.cfg.nonlinear ? "true" : "false"},
      {"delta", format_full(o.cfg.delta_percent)},
      {"seed", std::to_string(o.cfg.seed)},
      {"fine-steps-factor", std::to_string(o.cfg.fine_steps_factor)},
      {"fine-cells-factor", std::to_string(o.cfg.fine_cells_factor)},
      {"inverse-crime", o.cfg.inverse_crime ? "true" : "false"},
      {"p", format_full(o.cfg.recon.p)},
      {"omega", format_full(o.cfg.recon.omega)},
      {"rel-tol", format_full(o.cfg.recon.rel_tol)},
      {"max-iters", std::to_string(o.cfg.recon.max_iters)},
      {"rho-bound", format_full(o.cfg.recon.rho_bound)},
      {"rho-init", format_full(o.cfg.recon.rho_init)},
      {"out", o.out_dir},
  };
  if (command == "sweep") {
    params.emplace_back("kind", o.kind);
    params.emplace_back("level-k", join_ints(o.cfg.level_k));
    params.emplace_back("cell-levels", join_ints(o.cfg.cell_levels));
    params.emplace_back("delta-levels", join_doubles(o.cfg.delta_levels));
    params.emplace_back("seeds", join_seeds(o.cfg.seeds));
  }
  if (command == "reconstruct") params.emplace_back("measurement", o.measurement);
  return params;
}

std::string out_path(const CliOptions& o, const std::string& name) {
  std::filesystem::create_directories(o.out_dir);
  return (std::filesystem::path(o.out_dir) / name).string();
}

int run_forward(CliOptions& o) {
  o.cfg.potential = potential_from_name(o.potential);
  Mesh1D mesh = build_mesh(o.cfg.cells);
  FemOperators ops = assemble(mesh);
  TimeGrid grid{o.cfg.horizon, o.cfg.steps};
  PotentialPath rho;
  rho.values.resize(grid.steps);
  for (int n = 1; n <= grid.steps; ++n) {
    rho.values(n - 1) = builtin_potential(o.cfg.potential, grid.time(n), grid.horizon);
  }
  ProblemData data = default_problem(o.cfg.x0);
  Trajectory traj =
      o.cfg.nonlinear
          ? solve_forward_nonlinear(mesh, ops, grid, o.cfg.alpha, rho, default_nonlinearity(),
                                    data)
          : solve_forward(mesh, ops, grid, o.cfg.alpha, rho, data);
  Eigen::VectorXd trace = observe(mesh, traj, o.cfg.x0);

  const std::string obs = out_path(o, "observation.csv");
  write_observation_csv(obs, grid, trace(0), trace.tail(grid.steps));
  write_manifest(out_path(o, "manifest.json"), "forward", resolved_params("forward", o), {obs});
  std::cout << "forward: " << o.cfg.steps << " steps, " << o.cfg.cells << " cells, u(x0,T) = "
            << format_full(trace(grid.steps)) << "\n";
  return 0;
}

int run_gendata(CliOptions& o) {
  o.cfg.potential = potential_from_name(o.potential);
  Measurement meas = generate_data(o.cfg);
  if (o.cfg.delta_percent > 0.0) meas = add_noise(meas, o.cfg.delta_percent, o.cfg.seed);
  MeasurementFile mf;
  mf.alpha = o.cfg.alpha;
  mf.meas = meas;
  const std::string out = out_path(o, "measurement.csv");
  write_measurement(out, mf);
  write_manifest(out_path(o, "manifest.json"), "gendata", resolved_params("gendata", o), {out});
  std::cout << "gendata: " << meas.grid.steps << " samples, g0 = " << format_full(meas.g0)
            << ", epsilon = " << format_full(meas.epsilon) << "\n";
  return 0;
}

int run_reconstruct(CliOptions& o) {
  o.cfg.potential = potential_from_name(o.potential);
  std::vector<std::string> outputs;
  const std::string pot_csv = out_path(o, "potential.csv");
  const std::string iter_csv = out_path(o, "iterations.csv");

  if (!o.measurement.empty()) {
    // external data: the true potential is unknown, so no error diagnostics
    MeasurementFile mf = read_measurement(o.measurement);
    o.cfg.alpha = mf.alpha;
    o.cfg.steps = mf.meas.grid.steps;
    o.cfg.horizon = mf.meas.grid.horizon;
    o.cfg.x0 = mf.meas.x0;
    Mesh1D mesh = build_mesh(o.cfg.cells);
    FemOperators ops = assemble(mesh);
    InverseProblem prob = make_inverse_problem(o.cfg, mesh, ops);
    ReconstructionReport report = reconstruct(mf.meas, prob, o.cfg.recon);
    write_potential_csv(pot_csv, mf.meas.grid, report.rho.values);
    write_iteration_csv(iter_csv, report);
    outputs = {pot_csv, iter_csv};
    std::cout << "reconstruct: " << report.iterations << " iterations, "
              << (report.converged ? "converged" : "not converged") << "\n";
  } else {
    RunOutput run = run_reconstruction(o.cfg);
    write_potential_csv(pot_csv, run.measurement.grid, run.report.rho.values, &run.rho_true);
    write_iteration_csv(iter_csv, run.report);
    const std::string meas_csv = out_path(o, "measurement.csv");
    MeasurementFile mf;
    mf.alpha = o.cfg.alpha;
    mf.meas = run.measurement;
    write_measurement(meas_csv, mf);
    outputs = {pot_csv, iter_csv, meas_csv};
    std::cout << "reconstruct: " << run.report.iterations << " iterations, "
              << (run.report.converged ? "converged" : "not converged")
              << ", error = " << format_full(run.error)
              << ", weighted = " << format_full(run.error_weighted) << "\n";
  }
  write_manifest(out_path(o, "manifest.json"), "reconstruct",
                 resolved_params("reconstruct", o), outputs);
  return 0;
}

int run_sweep_cmd(CliOptions& o, const CLI::App* cmd) {
  o.cfg.potential = potential_from_name(o.potential);
  const SweepKind kind = sweep_from_name(o.kind);
  // figure defaults for knobs the user left untouched
  if (cmd->count("--steps") == 0 && kind == SweepKind::spatial) o.cfg.steps = 800;
  if (cmd->count("--cells") == 0 &&
      (kind == SweepKind::temporal || kind == SweepKind::tau_ucurve)) {
    o.cfg.cells = 100;
  }
  if (cmd->count("--delta") == 0 && kind == SweepKind::tau_ucurve) o.cfg.delta_percent = 0.1;

  SweepResult res = run_sweep(kind, o.cfg);
  const std::string csv = out_path(o, "sweep_" + o.kind + ".csv");
  write_sweep_csv(csv, res);
  write_manifest(out_path(o, "manifest.json"), "sweep", resolved_params("sweep", o), {csv});
  for (const SweepRow& row : res.rows) {
    std::cout << "param = " << format_full(row.param) << "  error = " << format_full(row.error)
              << "  rate = " << format_full(row.rate) << "\n";
  }
  std::cout << "ls_rate = " << format_full(res.ls_rate) << "\n";
  return 0;
}

int run_rates(const CliOptions& o) {
  std::ifstream in(o.input);
  if (!in) throw std::runtime_error("rates: cannot open '" + o.input + "'");
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("rates: '" + o.input + "' is empty");
  // locate the param and error columns by name
  int param_col = -1, error_col = -1, col = 0;
  {
    std::istringstream hs(header);
    std::string name;
    while (std::getline(hs, name, ',')) {
      if (name == "param") param_col = col;
      if (name == "error") error_col = col;
      ++col;
    }
  }
  if (param_col < 0 || error_col < 0) {
    throw std::runtime_error("rates: '" + o.input + "' lacks param/error columns");
  }
  std::vector<double> params, errors;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    int c = 0;
    double p = 0.0, e = 0.0;
    while (std::getline(ls, field, ',')) {
      if (c == param_col) p = std::stod(field);
      if (c == error_col) e = std::stod(field);
      ++c;
    }
    params.push_back(p);
    errors.push_back(e);
  }
  if (params.size() < 2) throw std::runtime_error("rates: need at least two rows");
  Eigen::Map<Eigen::VectorXd> pv(params.data(), params.size());
  Eigen::Map<Eigen::VectorXd> ev(errors.data(), errors.size());
  Eigen::VectorXd pairwise = empirical_rates(pv, ev);
  for (int i = 0; i < pairwise.size(); ++i) {
    std::cout << "param = " << format_full(params[i + 1])
              << "  rate = " << format_full(pairwise(i)) << "\n";
  }
  std::cout << "ls_rate = " << format_full(fit_rate(pv, ev)) << "\n";
  return 0;
}

int run_replay(const std::string& manifest_path) {
  Manifest m = read_manifest(manifest_path);
  if (m.command == "replay") throw std::runtime_error("replay: manifests do not nest");
  std::vector<std::string> args = {"fracpot", m.command};
  for (const auto& [key, value] : m.params) {
    if (value.empty()) continue;  // unset optional (ladder overrides, measurement path)
    if (key == "nonlinear" || key == "inverse-crime") {
      args.push_back("--" + key + "=" + value);
    } else {
      args.push_back("--" + key);
      args.push_back(value);
    }
  }
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

int cli_main(int argc, const char* const* argv) {
  CliOptions o;
  std::string manifest_path;

  CLI::App app{"subdiffusion potential reconstruction from single-point observations",
               "fracpot"};
  app.require_subcommand(1);

  CLI::App* forward = app.add_subcommand("forward", "solve the forward problem");
  add_common(forward, o);
  CLI::App* gendata = app.add_subcommand("gendata", "generate measurement data");
  add_common(gendata, o);
  CLI::App* recon = app.add_subcommand("reconstruct", "recover the potential from data");
  add_common(recon, o);
  recon->add_option("--measurement", o.measurement,
                    "measurement file to invert (skips data generation)");
  CLI::App* sweep = app.add_subcommand("sweep", "run an experiment family");
  add_common(sweep, o);
  add_sweep_options(sweep, o);
  CLI::App* rates = app.add_subcommand("rates", "empirical orders from a sweep CSV");
  rates->add_option("--input", o.input, "sweep CSV file")->required();
  CLI::App* replay = app.add_subcommand("replay", "re-run a recorded manifest");
  replay->add_option("manifest", manifest_path, "manifest.json of a previous run")->required();

  std::vector<std::string> args;
  try {
    args = apply_config_files(std::vector<std::string>(argv + 1, argv + argc));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::reverse(args.begin(), args.end());  // the vector overload parses back to front
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (app.got_subcommand(forward)) return run_forward(o);
    if (app.got_subcommand(gendata)) return run_gendata(o);
    if (app.got_subcommand(recon)) return run_reconstruct(o);
    if (app.got_subcommand(sweep)) return run_sweep_cmd(o, sweep);
    if (app.got_subcommand(rates)) return run_rates(o);
    if (app.got_subcommand(replay)) return run_replay(manifest_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: no subcommand\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) { return cli_main(argc, argv); }
