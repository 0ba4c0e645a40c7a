#pragma once

#include "fracpot/forward.hpp"

#include <cstdint>
#include <vector>

namespace fracpot {

// Single-point observations g_delta(t_n), n = 1..N, plus the noise-free
// initial value g0 = u(x0, 0).  Reconstruction divides by these values, so
// they must all be strictly positive.
struct Measurement {
  TimeGrid grid;
  double x0 = 0.0;
  double g0 = 0.0;
  Eigen::VectorXd g;  // size grid.steps
  double delta_percent = 0.0;
  double epsilon = 0.0;       // absolute noise amplitude actually applied
  std::uint64_t seed = 0;

  void validate() const;  // throws unless g0 > 0 and every g > 0
};

// Uniform noise g -> g + eps * xi, xi iid on [-1,1], with
// eps = max(g0, max_n g(t_n)) * delta_percent / 100.  g0 stays noise-free.
// The draw is a fixed 53-bit mapping of mt19937_64 output, so identical seeds
// give bitwise-identical measurements on any platform.  Throws if noise
// destroys positivity (data that noisy is not usable for reconstruction).
Measurement add_noise(const Measurement& exact, double delta_percent, std::uint64_t seed);

// Projection onto the admissible interval [0, bound].
double cutoff(double a, double bound);
Eigen::VectorXd cutoff(const Eigen::VectorXd& a, double bound);

// Everything the fixed-point map needs in order to run forward solves.
struct InverseProblem {
  const Mesh1D* mesh = nullptr;
  const FemOperators* ops = nullptr;
  double alpha = 0.5;
  ProblemData data;
  bool nonlinear = false;
  ScalarFn f_of_u;  // semilinear source, used when nonlinear
};

struct ReconstructionConfig {
  double p = 2.0;         // norm exponent for stopping and diagnostics
  double omega = 0.0;     // exponential weight of the weighted diagnostics
  double rel_tol = 1e-10;
  int max_iters = 200;
  double rho_bound = 5.0;
  double rho_init = 2.0;  // constant initial guess
};

// One sweep of the projected fixed-point map
//   rho_{k+1}(t_n) = P_[0,bound] [ (F_n + Lap_h u_h^n(x0; rho_k) - dbar^alpha g_delta(t_n)) / g_delta(t_n) ],
// where F_n = f(x0) for the linear equation and F_n = f_of_u(u_h^{n-1}(x0; rho_k))
// for the semilinear one, and dbar^alpha is the convolution quadrature anchored
// at g0.
PotentialPath fixed_point_step(const PotentialPath& rho, const Measurement& meas,
                               const InverseProblem& prob, double rho_bound);

struct ReconstructionReport {
  PotentialPath rho;
  int iterations = 0;
  bool converged = false;
  // per-iteration ||rho_{k+1} - rho_k|| in the plain and weighted l^p_tau norms
  std::vector<double> change_lp;
  std::vector<double> change_lp_weighted;
  // per-iteration error vs a known truth, when one is supplied
  std::vector<double> error_lp;
  std::vector<double> error_lp_weighted;
};

// Iterates fixed_point_step from the constant initial guess until the relative
// change ||rho_{k+1} - rho_k|| / max(||rho_k||, 1) drops below rel_tol or
// max_iters is reached.  rho_true, when given, holds samples at t_1..t_N.
ReconstructionReport reconstruct(const Measurement& meas, const InverseProblem& prob,
                                 const ReconstructionConfig& cfg,
                                 const Eigen::VectorXd* rho_true = nullptr);

}  // namespace fracpot
