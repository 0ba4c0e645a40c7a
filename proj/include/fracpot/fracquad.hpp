#pragma once

#include <Eigen/Core>

namespace fracpot {

// Uniform time grid 0 = t_0 < t_1 < ... < t_N = T with t_n = n * tau.
struct TimeGrid {
  double horizon = 1.0;
  int steps = 1;

  double tau() const { return horizon / steps; }
  double time(int n) const { return n * tau(); }
  Eigen::VectorXd times() const;  // t_0 .. t_N
  void validate() const;          // horizon > 0, steps >= 1
};

// Convolution quadrature weights of the backward-Euler generating function
// (1 - xi)^alpha = sum_j w_j xi^j, together with their partial sums
// sigma_n = sum_{j<=n} w_j.  For alpha in (0,1): w_0 = 1, w_j < 0 for j >= 1,
// and sigma_n > 0 strictly decreases.
struct CqWeights {
  double alpha = 0.5;
  Eigen::VectorXd w;        // w_0 .. w_n
  Eigen::VectorXd partial;  // sigma_0 .. sigma_n
};

CqWeights cq_weights(double alpha, int n_terms);

// Discrete Caputo derivative of order alpha by backward-Euler convolution
// quadrature acting on the history v - v^0:
//   d^n = tau^{-alpha} * sum_{j=0}^{n} w_j (v^{n-j} - v^0),  n = 1..N.
// Input v holds v^0..v^N (grid.steps + 1 values); output holds d^1..d^N.
Eigen::VectorXd caputo_becq(const Eigen::VectorXd& v, double alpha, const TimeGrid& grid);
Eigen::VectorXd caputo_becq(const Eigen::VectorXd& v, const CqWeights& cq, double tau);

// L1 discretization of the same derivative (piecewise-linear quadrature of the
// Caputo integral).  Independent of the convolution weights; used to cross-check
// caputo_becq.  Exact on linear inputs.
Eigen::VectorXd caputo_l1(const Eigen::VectorXd& v, double alpha, const TimeGrid& grid);

// Gamma function on x > 0, via an asymptotic (Stirling/Bernoulli) series and
// upward recursion.  log_gamma stays finite where gamma_fn overflows.
double gamma_fn(double x);
double log_gamma(double x);

// Mittag-Leffler function E_alpha(z) for 0 < alpha <= 1 and z <= 0.
double mittag_leffler(double alpha, double z);

namespace detail {
// Exposed for cross-checking the two evaluation branches in tests.
double ml_series(double alpha, double x);    // E_alpha(-x), power series
double ml_integral(double alpha, double x);  // E_alpha(-x), Hankel-contour integral
}  // namespace detail

}  // namespace fracpot
