#pragma once

#include "fracpot/inverse.hpp"
#include "fracpot/metrics.hpp"

#include <string>
#include <vector>

namespace fracpot {

// Benchmark potentials on [0, T]; branch boundaries sit at T/4, T/2, 3T/4.
enum class PotentialId { expcos = 1, zigzag = 2, steps = 3 };

double builtin_potential(PotentialId id, double t, double horizon);
ScalarFn make_potential(PotentialId id, double horizon);
PotentialId potential_from_name(const std::string& name);
std::string potential_name(PotentialId id);

// Benchmark problem data: f(x) = 1 + 20 x^2 (1-x)^2, u0(x) = 2 + cos(2 pi x).
ProblemData default_problem(double x0 = 0.0, SourceLoad load = SourceLoad::quadrature);
// Semilinear source f(u) = (u - 1)(u - 3).
ScalarFn default_nonlinearity();

struct ExperimentConfig {
  double alpha = 0.5;
  double horizon = 0.5;
  int steps = 256;  // N, run grid
  int cells = 100;  // M, run grid
  PotentialId potential = PotentialId::expcos;
  double x0 = 0.0;
  bool nonlinear = false;
  double delta_percent = 0.0;
  std::uint64_t seed = 1;

  // data generation: fine grid is fine_steps_factor * steps by
  // fine_cells_factor * cells; inverse_crime switches to same-grid data with
  // interpolated source loads (the self-test mode)
  int fine_steps_factor = 8;
  int fine_cells_factor = 4;
  bool inverse_crime = false;

  ReconstructionConfig recon;

  // sweep customization; empty means the built-in ladder for the sweep kind
  std::vector<int> level_k;           // dyadic exponents (temporal / tau_ucurve)
  std::vector<int> cell_levels;       // spatial ladder
  std::vector<double> delta_levels;   // noise ladder, percent
  std::vector<std::uint64_t> seeds;   // noise sweep seeds (>= 1)
};

// Solves the forward problem on the fine grid (potential sampled at fine grid
// times) and restricts the observation to the run grid.  Returns an exact,
// noise-free measurement with g0 taken from the generating trajectory at t = 0.
Measurement generate_data(const ExperimentConfig& cfg);

// Noise-coupled discretization: tau = c_tau * delta^(p/(p alpha + 1)),
// h = c_h * delta^(1/(2 p alpha + 2)), both rounded to the nearest power of
// two in steps = T/tau and cells = 1/h.  delta enters as a fraction, i.e.
// delta_percent / 100.
struct CoupledGrid {
  int steps = 0;
  int cells = 0;
  double tau = 0.0;
  double h = 0.0;
};
CoupledGrid couple_parameters(double delta_percent, double alpha, double p, double horizon,
                              double c_tau = 1.0, double c_h = 0.25);

enum class SweepKind { spatial, temporal, noise, tau_ucurve, iteration_decay };
SweepKind sweep_from_name(const std::string& name);
std::string sweep_name(SweepKind kind);

struct SweepRow {
  double param = 0.0;   // h, tau, delta fraction, or iteration index
  double error = 0.0;   // reconstruction error (median over seeds where present)
  double error_weighted = 0.0;
  double rate = 0.0;    // observed order vs the previous row (0 on the first)
  int steps = 0;
  int cells = 0;
  int iterations = 0;
};

struct SweepResult {
  SweepKind kind = SweepKind::spatial;
  ExperimentConfig base;
  std::vector<SweepRow> rows;
  double ls_rate = 0.0;  // least-squares observed order over all rows
  std::vector<std::uint64_t> seeds;
};

// Runs one experiment family:
//   spatial        fixed tau, cells over {10,20,40,80,160}, error vs h
//   temporal       fixed h, steps = T/2^k for k in 4..10, error vs tau
//   noise          delta ladder with (tau, h) from couple_parameters,
//                  median over cfg.seeds (>= 5 recommended), error vs delta
//   tau_ucurve     fixed h and delta, steps = T/2^k for k in 2..13
//   iteration_decay  single reconstruction, per-iteration error vs truth
SweepResult run_sweep(SweepKind kind, const ExperimentConfig& cfg);

// One reconstruction against generated (optionally noisy) data; also returns
// the measurement actually used.  Used by the CLI and by tests that need the
// pieces rather than a sweep.
struct RunOutput {
  Measurement measurement;
  ReconstructionReport report;
  Eigen::VectorXd rho_true;  // samples at t_1..t_N
  double error = 0.0;
  double error_weighted = 0.0;
};
RunOutput run_reconstruction(const ExperimentConfig& cfg);

InverseProblem make_inverse_problem(const ExperimentConfig& cfg, const Mesh1D& mesh,
                                    const FemOperators& ops);

}  // namespace fracpot
