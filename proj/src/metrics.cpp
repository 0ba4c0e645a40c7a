#include "fracpot/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace fracpot {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

double lp_norm(const Eigen::VectorXd& v, const NormSpec& spec) {
  require(v.size() >= 1, "lp_norm: empty sample vector");
  require(spec.p >= 1.0, "lp_norm: p must be >= 1");
  require(spec.tau > 0.0, "lp_norm: tau must be positive");
  require(spec.omega >= 0.0, "lp_norm: omega must be nonnegative");

  const int n = static_cast<int>(v.size());
  if (std::isinf(spec.p)) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      worst = std::max(worst, std::exp(-spec.omega * (i + 1) * spec.tau) * std::abs(v(i)));
    }
    return worst;
  }
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += std::pow(std::exp(-spec.omega * (i + 1) * spec.tau) * std::abs(v(i)), spec.p);
  }
  return std::pow(spec.tau * acc, 1.0 / spec.p);
}

double reconstruction_error(const Eigen::VectorXd& rho_star, const ScalarFn& rho_true,
                            const TimeGrid& grid, const NormSpec& spec) {
  grid.validate();
  require(rho_star.size() == grid.steps, "reconstruction_error: sample count mismatch");
  Eigen::VectorXd diff(grid.steps);
  for (int n = 1; n <= grid.steps; ++n) diff(n - 1) = rho_star(n - 1) - rho_true(grid.time(n));
  NormSpec used = spec;
  used.tau = grid.tau();
  return lp_norm(diff, used);
}

Eigen::VectorXd empirical_rates(const Eigen::VectorXd& params, const Eigen::VectorXd& errors) {
  require(params.size() == errors.size(), "rates: parameter/error size mismatch");
  require(params.size() >= 2, "rates: need at least two levels");
  for (int i = 0; i < params.size(); ++i) {
    require(params(i) > 0.0, "rates: parameters must be positive");
    require(errors(i) > 0.0, "rates: errors must be positive");
  }
  Eigen::VectorXd r(params.size() - 1);
  for (int i = 0; i + 1 < params.size(); ++i) {
    r(i) = std::log(errors(i) / errors(i + 1)) / std::log(params(i) / params(i + 1));
  }
  return r;
}

double fit_rate(const Eigen::VectorXd& params, const Eigen::VectorXd& errors) {
  require(params.size() == errors.size(), "rates: parameter/error size mismatch");
  require(params.size() >= 2, "rates: need at least two levels");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int m = static_cast<int>(params.size());
  for (int i = 0; i < m; ++i) {
    require(params(i) > 0.0, "rates: parameters must be positive");
    require(errors(i) > 0.0, "rates: errors must be positive");
    const double x = std::log(params(i));
    const double y = std::log(errors(i));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace fracpot
