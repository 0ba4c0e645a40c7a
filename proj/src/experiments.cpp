#include "fracpot/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fracpot {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void validate_config(const ExperimentConfig& cfg) {
  require(cfg.horizon > 0.0, "experiment: horizon must be positive");
  require(cfg.steps >= 1, "experiment: need at least one time step");
  require(cfg.cells >= 1, "experiment: need at least one cell");
  require(cfg.alpha > 0.0 && cfg.alpha < 1.0, "experiment: alpha must lie in (0,1)");
  require(cfg.fine_steps_factor >= 1 && cfg.fine_cells_factor >= 1,
          "experiment: refinement factors must be at least 1");
  require(cfg.delta_percent >= 0.0, "experiment: noise level must be nonnegative");
}

PotentialPath sample_potential(PotentialId id, const TimeGrid& grid) {
  PotentialPath rho;
  rho.values.resize(grid.steps);
  for (int n = 1; n <= grid.steps; ++n) {
    rho.values(n - 1) = builtin_potential(id, grid.time(n), grid.horizon);
  }
  return rho;
}

// observation trace of the discrete solution at cfg.x0 for the given grid
Eigen::VectorXd solve_trace(const ExperimentConfig& cfg, const TimeGrid& grid, int cells,
                            SourceLoad load) {
  Mesh1D mesh = build_mesh(cells);
  FemOperators ops = assemble(mesh);
  PotentialPath rho = sample_potential(cfg.potential, grid);
  ProblemData data = default_problem(cfg.x0, load);
  Trajectory traj = cfg.nonlinear ? solve_forward_nonlinear(mesh, ops, grid, cfg.alpha, rho,
                                                            default_nonlinearity(), data)
                                  : solve_forward(mesh, ops, grid, cfg.alpha, rho, data);
  return observe(mesh, traj, cfg.x0);
}

Measurement trace_to_measurement(const Eigen::VectorXd& trace, const TimeGrid& run, int stride,
                                 double x0) {
  Measurement m;
  m.grid = run;
  m.x0 = x0;
  m.g0 = trace(0);
  m.g.resize(run.steps);
  for (int n = 1; n <= run.steps; ++n) m.g(n - 1) = trace(stride * n);
  return m;
}

// run-grid measurement from one already generated on a nested finer grid
Measurement restrict_measurement(const Measurement& fine, int steps) {
  require(fine.grid.steps % steps == 0, "sweep: run grid does not nest in the data grid");
  const int stride = fine.grid.steps / steps;
  Measurement m;
  m.grid = TimeGrid{fine.grid.horizon, steps};
  m.x0 = fine.x0;
  m.g0 = fine.g0;
  m.g.resize(steps);
  for (int n = 1; n <= steps; ++n) m.g(n - 1) = fine.g(stride * n - 1);
  return m;
}

Measurement with_noise(const Measurement& exact, const ExperimentConfig& cfg) {
  return cfg.delta_percent > 0.0 ? add_noise(exact, cfg.delta_percent, cfg.seed) : exact;
}

struct RowRun {
  ReconstructionReport report;
  double error = 0.0;
  double error_weighted = 0.0;
};

RowRun one_inversion(const ExperimentConfig& cfg, const Measurement& meas) {
  Mesh1D mesh = build_mesh(cfg.cells);
  FemOperators ops = assemble(mesh);
  InverseProblem prob = make_inverse_problem(cfg, mesh, ops);
  PotentialPath truth = sample_potential(cfg.potential, meas.grid);
  RowRun run;
  run.report = reconstruct(meas, prob, cfg.recon, &truth.values);
  const Eigen::VectorXd diff = run.report.rho.values - truth.values;
  run.error = lp_norm(diff, NormSpec{cfg.recon.p, 0.0, meas.grid.tau()});
  run.error_weighted = lp_norm(diff, NormSpec{cfg.recon.p, cfg.recon.omega, meas.grid.tau()});
  return run;
}

SweepRow make_row(double param, const RowRun& run, int steps, int cells) {
  SweepRow row;
  row.param = param;
  row.error = run.error;
  row.error_weighted = run.error_weighted;
  row.steps = steps;
  row.cells = cells;
  row.iterations = run.report.iterations;
  return row;
}

// pairwise observed orders plus the least-squares fit over all rows
void finish_rates(SweepResult& res) {
  const int m = static_cast<int>(res.rows.size());
  for (int i = 1; i < m; ++i) {
    const SweepRow& a = res.rows[i - 1];
    SweepRow& b = res.rows[i];
    if (a.error > 0.0 && b.error > 0.0 && a.param != b.param) {
      b.rate = std::log(a.error / b.error) / std::log(a.param / b.param);
    }
  }
  std::vector<double> ps, es;
  for (const SweepRow& row : res.rows) {
    if (row.error > 0.0) {
      ps.push_back(row.param);
      es.push_back(row.error);
    }
  }
  if (ps.size() >= 2) {
    Eigen::Map<Eigen::VectorXd> pv(ps.data(), ps.size());
    Eigen::Map<Eigen::VectorXd> ev(es.data(), es.size());
    res.ls_rate = fit_rate(pv, ev);
  }
}

}  // namespace

double builtin_potential(PotentialId id, double t, double horizon) {
  require(horizon > 0.0, "potential: horizon must be positive");
  const double s = t / horizon;
  switch (id) {
    case PotentialId::expcos:
      return std::exp(std::cos(5.0 * t));
    case PotentialId::zigzag:
      if (s < 0.25) return 8.0 / horizon * t + 0.7;
      if (s < 0.5) return -8.0 / horizon * t + 4.7;
      if (s < 0.75) return 8.0 / horizon * t - 3.3;
      return -8.0 / horizon * t + 8.7;
    case PotentialId::steps:
      if (s < 0.25) return 1.0;
      if (s < 0.5) return 2.5;
      if (s < 0.75) return 1.5;
      return 2.0;
  }
  throw std::invalid_argument("potential: unknown id");
}

ScalarFn make_potential(PotentialId id, double horizon) {
  require(horizon > 0.0, "potential: horizon must be positive");
  return [id, horizon](double t) { return builtin_potential(id, t, horizon); };
}

PotentialId potential_from_name(const std::string& name) {
  if (name == "expcos") return PotentialId::expcos;
  if (name == "zigzag") return PotentialId::zigzag;
  if (name == "steps") return PotentialId::steps;
  throw std::invalid_argument("potential: unknown name '" + name + "'");
}

std::string potential_name(PotentialId id) {
  switch (id) {
    case PotentialId::expcos: return "expcos";
    case PotentialId::zigzag: return "zigzag";
    case PotentialId::steps: return "steps";
  }
  throw std::invalid_argument("potential: unknown id");
}

ProblemData default_problem(double x0, SourceLoad load) {
  ProblemData data;
  data.source = [](double x) {
    const double y = x * (1.0 - x);
    return 1.0 + 20.0 * y * y;
  };
  data.initial = [](double x) { return 2.0 + std::cos(2.0 * kPi * x); };
  data.initial_prime = [](double x) { return -2.0 * kPi * std::sin(2.0 * kPi * x); };
  data.x0 = x0;
  data.load = load;
  return data;
}

ScalarFn default_nonlinearity() {
  return [](double u) { return (u - 1.0) * (u - 3.0); };
}

Measurement generate_data(const ExperimentConfig& cfg) {
  validate_config(cfg);
  TimeGrid run{cfg.horizon, cfg.steps};
  if (cfg.inverse_crime) {
    return trace_to_measurement(solve_trace(cfg, run, cfg.cells, SourceLoad::interpolant), run,
                                1, cfg.x0);
  }
  TimeGrid fine{cfg.horizon, cfg.steps * cfg.fine_steps_factor};
  Eigen::VectorXd trace =
      solve_trace(cfg, fine, cfg.cells * cfg.fine_cells_factor, SourceLoad::quadrature);
  return trace_to_measurement(trace, run, cfg.fine_steps_factor, cfg.x0);
}

CoupledGrid couple_parameters(double delta_percent, double alpha, double p, double horizon,
                              double c_tau, double c_h) {
  require(delta_percent > 0.0, "coupling: noise level must be positive");
  require(alpha > 0.0 && alpha < 1.0, "coupling: alpha must lie in (0,1)");
  require(p > 0.0, "coupling: norm exponent must be positive");
  require(horizon > 0.0 && c_tau > 0.0 && c_h > 0.0, "coupling: scales must be positive");
  const double delta = delta_percent / 100.0;
  const double tau_raw = c_tau * std::pow(delta, p / (p * alpha + 1.0));
  const double h_raw = c_h * std::pow(delta, 1.0 / (2.0 * p * alpha + 2.0));
  auto nearest_pow2 = [](double x) {
    const long long e = std::llround(std::log2(std::max(x, 1.0)));
    return 1 << static_cast<int>(std::clamp(e, 0LL, 30LL));
  };
  CoupledGrid g;
  g.steps = nearest_pow2(horizon / tau_raw);
  g.cells = nearest_pow2(1.0 / h_raw);
  g.tau = horizon / g.steps;
  g.h = 1.0 / g.cells;
  return g;
}

SweepKind sweep_from_name(const std::string& name) {
  if (name == "spatial") return SweepKind::spatial;
  if (name == "temporal") return SweepKind::temporal;
  if (name == "noise") return SweepKind::noise;
  if (name == "tau_ucurve") return SweepKind::tau_ucurve;
  if (name == "iteration_decay") return SweepKind::iteration_decay;
  throw std::invalid_argument("sweep: unknown name '" + name + "'");
}

std::string sweep_name(SweepKind kind) {
  switch (kind) {
    case SweepKind::spatial: return "spatial";
    case SweepKind::temporal: return "temporal";
    case SweepKind::noise: return "noise";
    case SweepKind::tau_ucurve: return "tau_ucurve";
    case SweepKind::iteration_decay: return "iteration_decay";
  }
  throw std::invalid_argument("sweep: unknown kind");
}

InverseProblem make_inverse_problem(const ExperimentConfig& cfg, const Mesh1D& mesh,
                                    const FemOperators& ops) {
  InverseProblem prob;
  prob.mesh = &mesh;
  prob.ops = &ops;
  prob.alpha = cfg.alpha;
  prob.data =
      default_problem(cfg.x0, cfg.inverse_crime ? SourceLoad::interpolant : SourceLoad::quadrature);
  prob.nonlinear = cfg.nonlinear;
  if (cfg.nonlinear) prob.f_of_u = default_nonlinearity();
  return prob;
}

RunOutput run_reconstruction(const ExperimentConfig& cfg) {
  validate_config(cfg);
  RunOutput out;
  out.measurement = with_noise(generate_data(cfg), cfg);
  Mesh1D mesh = build_mesh(cfg.cells);
  FemOperators ops = assemble(mesh);
  InverseProblem prob = make_inverse_problem(cfg, mesh, ops);
  out.rho_true = sample_potential(cfg.potential, out.measurement.grid).values;
  out.report = reconstruct(out.measurement, prob, cfg.recon, &out.rho_true);
  const Eigen::VectorXd diff = out.report.rho.values - out.rho_true;
  out.error = lp_norm(diff, NormSpec{cfg.recon.p, 0.0, out.measurement.grid.tau()});
  out.error_weighted =
      lp_norm(diff, NormSpec{cfg.recon.p, cfg.recon.omega, out.measurement.grid.tau()});
  return out;
}

SweepResult run_sweep(SweepKind kind, const ExperimentConfig& cfg) {
  validate_config(cfg);
  SweepResult res;
  res.kind = kind;
  res.base = cfg;

  switch (kind) {
    case SweepKind::spatial: {
      std::vector<int> ladder =
          cfg.cell_levels.empty() ? std::vector<int>{10, 20, 40, 80, 160} : cfg.cell_levels;
      Measurement shared;
      if (!cfg.inverse_crime) {
        // one dataset serves every row: only the inversion mesh changes.  It
        // shares the run time grid (refined in space only), since otherwise
        // the O(sqrt(tau)) defect of the discrete fractional derivative near
        // t = 0 floors the error and hides the spatial order entirely.
        ExperimentConfig gen = cfg;
        gen.cells = *std::max_element(ladder.begin(), ladder.end());
        gen.fine_steps_factor = 1;
        shared = with_noise(generate_data(gen), cfg);
      }
      for (int cells : ladder) {
        ExperimentConfig row_cfg = cfg;
        row_cfg.cells = cells;
        Measurement meas =
            cfg.inverse_crime ? with_noise(generate_data(row_cfg), cfg) : shared;
        res.rows.push_back(
            make_row(1.0 / cells, one_inversion(row_cfg, meas), cfg.steps, cells));
      }
      finish_rates(res);
      break;
    }

    case SweepKind::temporal:
    case SweepKind::tau_ucurve: {
      std::vector<int> ks = cfg.level_k;
      if (ks.empty()) {
        const int lo = kind == SweepKind::temporal ? 4 : 2;
        const int hi = kind == SweepKind::temporal ? 10 : 13;
        for (int k = lo; k <= hi; ++k) ks.push_back(k);
      }
      const int k_max = *std::max_element(ks.begin(), ks.end());
      Measurement shared;
      if (!cfg.inverse_crime) {
        // data generated once on the finest run grid; rows restrict it, so the
        // whole ladder sees the same underlying observation
        ExperimentConfig gen = cfg;
        gen.steps = 1 << k_max;
        shared = generate_data(gen);
      }
      for (int k : ks) {
        ExperimentConfig row_cfg = cfg;
        row_cfg.steps = 1 << k;
        Measurement meas = cfg.inverse_crime
                               ? generate_data(row_cfg)
                               : restrict_measurement(shared, row_cfg.steps);
        meas = with_noise(meas, row_cfg);  // noise drawn on the row's own grid
        res.rows.push_back(make_row(cfg.horizon / row_cfg.steps, one_inversion(row_cfg, meas),
                                    row_cfg.steps, cfg.cells));
      }
      finish_rates(res);
      break;
    }

    case SweepKind::noise: {
      std::vector<double> deltas =
          cfg.delta_levels.empty() ? std::vector<double>{4.0, 2.0, 1.0, 0.5, 0.25}
                                   : cfg.delta_levels;
      res.seeds = cfg.seeds.empty() ? std::vector<std::uint64_t>{1, 2, 3, 4, 5} : cfg.seeds;
      for (double delta : deltas) {
        require(delta > 0.0, "sweep: noise ladder must be positive");
        CoupledGrid cg =
            couple_parameters(delta, cfg.alpha, cfg.recon.p, cfg.horizon);
        ExperimentConfig row_cfg = cfg;
        row_cfg.steps = cg.steps;
        row_cfg.cells = cg.cells;
        row_cfg.delta_percent = delta;
        Measurement exact = generate_data(row_cfg);
        std::vector<RowRun> runs;
        runs.reserve(res.seeds.size());
        for (std::uint64_t seed : res.seeds) {
          runs.push_back(one_inversion(row_cfg, add_noise(exact, delta, seed)));
        }
        std::vector<std::size_t> order(runs.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&runs](std::size_t a, std::size_t b) { return runs[a].error < runs[b].error; });
        const RowRun& median = runs[order[runs.size() / 2]];
        res.rows.push_back(make_row(delta / 100.0, median, cg.steps, cg.cells));
      }
      finish_rates(res);
      break;
    }

    case SweepKind::iteration_decay: {
      RunOutput out = run_reconstruction(cfg);
      const std::size_t iters = out.report.error_lp.size();
      for (std::size_t k = 0; k < iters; ++k) {
        SweepRow row;
        row.param = static_cast<double>(k + 1);
        row.error = out.report.error_lp[k];
        row.error_weighted = out.report.error_lp_weighted[k];
        // per-iteration contraction factor instead of an order
        row.rate = k > 0 && out.report.error_lp[k - 1] > 0.0
                       ? row.error / out.report.error_lp[k - 1]
                       : 0.0;
        row.steps = cfg.steps;
        row.cells = cfg.cells;
        row.iterations = static_cast<int>(k + 1);
        res.rows.push_back(row);
      }
      // log-linear decay slope per iteration
      std::vector<double> ks, ls;
      for (const SweepRow& row : res.rows) {
        if (row.error > 0.0) {
          ks.push_back(row.param);
          ls.push_back(std::log(row.error));
        }
      }
      if (ks.size() >= 2) {
        const int m = static_cast<int>(ks.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int i = 0; i < m; ++i) {
          sx += ks[i];
          sy += ls[i];
          sxx += ks[i] * ks[i];
          sxy += ks[i] * ls[i];
        }
        res.ls_rate = (m * sxy - sx * sy) / (m * sxx - sx * sx);
      }
      break;
    }
  }
  return res;
}

}  // namespace fracpot
