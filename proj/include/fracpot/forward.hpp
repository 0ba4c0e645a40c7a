#pragma once

#include "fracpot/fem1d.hpp"
#include "fracpot/fracquad.hpp"

namespace fracpot {

// Potential samples rho(t_n), n = 1..N.  Reconstruction admissibility requires
// every sample in [0, bound].
struct PotentialPath {
  Eigen::VectorXd values;
  double bound = 5.0;

  void validate() const;  // throws if a sample leaves [0, bound]
};

// Nodal trajectory of a fully discrete solve; column n holds u_h(t_n).
struct Trajectory {
  TimeGrid grid;
  Eigen::MatrixXd fields;  // nodes x (steps + 1)
};

// How source loads enter the linear solve: 3-point Gauss quadrature of
// (f, phi_i), or mass-weighted nodal interpolation (used by the same-grid
// self-test mode, where it makes the discrete fixed-point identity exact).
enum class SourceLoad { quadrature, interpolant };

struct ProblemData {
  ScalarFn source;         // f(x), linear equation
  ScalarFn initial;        // u0(x)
  ScalarFn initial_prime;  // u0'(x), needed by the Ritz projection of u0
  double x0 = 0.0;         // observation point
  SourceLoad load = SourceLoad::quadrature;
};

// Backward-Euler convolution quadrature in time, P1 elements in space:
//   (tau^{-alpha} M + S + rho^n M) U^n = F + tau^{-alpha} M (sigma_n U^0 - sum_{j=1}^{n} w_j U^{n-j})
// with U^0 the Ritz projection of u0.  rho holds rho(t_1)..rho(t_N).
Trajectory solve_forward(const Mesh1D& mesh, const FemOperators& ops, const TimeGrid& grid,
                         double alpha, const PotentialPath& rho, const ProblemData& data);

// Semilinear variant with the source lagged one step: the load at step n is
// the mass-weighted nodal evaluation of f_of_u(U^{n-1}).
Trajectory solve_forward_nonlinear(const Mesh1D& mesh, const FemOperators& ops,
                                   const TimeGrid& grid, double alpha,
                                   const PotentialPath& rho, const ScalarFn& f_of_u,
                                   const ProblemData& data);

// Point observations u_h(x, t_n), n = 0..N.
Eigen::VectorXd observe(const Mesh1D& mesh, const Trajectory& traj, double x);

// Separated-variables solution of the constant-potential problem
//   d_t^alpha u - u_xx + rho0 u = f(x) on (0,1), Neumann, u(0) = u0:
// cosine modes phi_k = cos(k pi x), mu_k = (k pi)^2 + rho0,
//   uhat_k(t) = E_alpha(-mu_k t^alpha) a_k + f_k / mu_k * (1 - E_alpha(-mu_k t^alpha)),
// with the degenerate mu_k = 0 term a_k + f_k t^alpha / Gamma(1+alpha).
struct SpectralSolution {
  double alpha = 0.5;
  double rho0 = 0.0;
  Eigen::VectorXd a;  // projection coefficients of u0
  Eigen::VectorXd f;  // projection coefficients of f

  double operator()(double x, double t) const;
  Eigen::VectorXd field(const Mesh1D& mesh, double t) const;  // nodal samples
};

SpectralSolution spectral_solution(double alpha, double rho0, const ProblemData& data,
                                   int n_modes);
double exact_constant_coeff_solution(double alpha, double rho0, const ProblemData& data,
                                     int n_modes, double x, double t);

}  // namespace fracpot
