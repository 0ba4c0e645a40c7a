#pragma once

#include "fracpot/fem1d.hpp"
#include "fracpot/fracquad.hpp"

#include <limits>

namespace fracpot {

constexpr double kInfNorm = std::numeric_limits<double>::infinity();

// Discrete weighted norm over samples v(t_1)..v(t_N):
//   ||v|| = (tau * sum_n (exp(-omega t_n) |v_n|)^p)^(1/p),  1 <= p < inf
//   ||v|| = max_n exp(-omega t_n) |v_n|                       p = inf (no tau factor)
struct NormSpec {
  double p = 2.0;
  double omega = 0.0;
  double tau = 1.0;
};

double lp_norm(const Eigen::VectorXd& v, const NormSpec& spec);

// ||rho_star - rho_true(t_.)|| over t_1..t_N.
double reconstruction_error(const Eigen::VectorXd& rho_star, const ScalarFn& rho_true,
                            const TimeGrid& grid, const NormSpec& spec);

// Pairwise observed orders log(e_i/e_{i+1}) / log(p_i/p_{i+1}); one entry per
// adjacent pair.
Eigen::VectorXd empirical_rates(const Eigen::VectorXd& params, const Eigen::VectorXd& errors);

// Least-squares slope of log(error) against log(parameter).
double fit_rate(const Eigen::VectorXd& params, const Eigen::VectorXd& errors);

}  // namespace fracpot
