#include "fracpot/inverse.hpp"

#include "fracpot/metrics.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace fracpot {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void Measurement::validate() const {
  grid.validate();
  require(g.size() == grid.steps, "measurement: need one observation per time step");
  require(g0 > 0.0, "measurement: initial observation must be positive");
  require(g.minCoeff() > 0.0, "measurement: observations must stay positive");
}

Measurement add_noise(const Measurement& exact, double delta_percent, std::uint64_t seed) {
  exact.validate();
  require(delta_percent >= 0.0, "noise: level must be nonnegative");
  Measurement out = exact;
  out.delta_percent = delta_percent;
  out.seed = seed;
  out.epsilon = std::max(exact.g0, exact.g.maxCoeff()) * delta_percent / 100.0;
  if (out.epsilon == 0.0) return out;

  std::mt19937_64 rng(seed);
  for (int n = 0; n < out.g.size(); ++n) {
    // top 53 bits -> [0,1), then stretched to [-1,1); avoids the
    // implementation-defined std::uniform_real_distribution
    const double u = (rng() >> 11) * 0x1.0p-53;
    out.g(n) = exact.g(n) + out.epsilon * (2.0 * u - 1.0);
  }
  if (!(out.g.minCoeff() > 0.0)) {
    throw std::runtime_error("noise: level destroys data positivity");
  }
  return out;
}

double cutoff(double a, double bound) { return std::min(std::max(a, 0.0), bound); }

Eigen::VectorXd cutoff(const Eigen::VectorXd& a, double bound) {
  return a.cwiseMax(0.0).cwiseMin(bound);
}

PotentialPath fixed_point_step(const PotentialPath& rho, const Measurement& meas,
                               const InverseProblem& prob, double rho_bound) {
  meas.validate();
  require(prob.mesh != nullptr && prob.ops != nullptr, "inverse: mesh and operators required");
  require(rho.values.size() == meas.grid.steps, "inverse: potential/measurement size mismatch");
  require(rho_bound > 0.0, "inverse: bound must be positive");
  if (prob.nonlinear) require(static_cast<bool>(prob.f_of_u), "inverse: missing nonlinearity");

  const Mesh1D& mesh = *prob.mesh;
  const FemOperators& ops = *prob.ops;
  const int n_steps = meas.grid.steps;

  Trajectory traj = prob.nonlinear
                        ? solve_forward_nonlinear(mesh, ops, meas.grid, prob.alpha, rho,
                                                  prob.f_of_u, prob.data)
                        : solve_forward(mesh, ops, meas.grid, prob.alpha, rho, prob.data);

  Eigen::VectorXd g_full(n_steps + 1);
  g_full(0) = meas.g0;
  g_full.tail(n_steps) = meas.g;
  Eigen::VectorXd dg = caputo_becq(g_full, prob.alpha, meas.grid);  // d^1 .. d^N

  PotentialPath next;
  next.bound = rho_bound;
  next.values.resize(n_steps);
  const double f_at_x0 = prob.nonlinear ? 0.0 : prob.data.source(meas.x0);
  for (int n = 1; n <= n_steps; ++n) {
    const double lap =
        eval_at_point(mesh, discrete_laplacian(ops, traj.fields.col(n)), meas.x0);
    const double source = prob.nonlinear
                              ? prob.f_of_u(eval_at_point(mesh, traj.fields.col(n - 1), meas.x0))
                              : f_at_x0;
    next.values(n - 1) = cutoff((source + lap - dg(n - 1)) / meas.g(n - 1), rho_bound);
  }
  return next;
}

ReconstructionReport reconstruct(const Measurement& meas, const InverseProblem& prob,
                                 const ReconstructionConfig& cfg,
                                 const Eigen::VectorXd* rho_true) {
  require(cfg.max_iters >= 0, "reconstruct: negative iteration budget");
  require(cfg.rho_init >= 0.0 && cfg.rho_init <= cfg.rho_bound,
          "reconstruct: initial guess outside the admissible interval");
  meas.validate();

  const NormSpec plain{cfg.p, 0.0, meas.grid.tau()};
  const NormSpec weighted{cfg.p, cfg.omega, meas.grid.tau()};

  ReconstructionReport rep;
  rep.rho.bound = cfg.rho_bound;
  rep.rho.values = Eigen::VectorXd::Constant(meas.grid.steps, cfg.rho_init);

  for (int k = 0; k < cfg.max_iters; ++k) {
    PotentialPath next = fixed_point_step(rep.rho, meas, prob, cfg.rho_bound);
    const Eigen::VectorXd diff = next.values - rep.rho.values;
    const double change = lp_norm(diff, plain);
    const double prev_size = lp_norm(rep.rho.values, plain);
    rep.change_lp.push_back(change);
    rep.change_lp_weighted.push_back(lp_norm(diff, weighted));
    if (rho_true != nullptr) {
      rep.error_lp.push_back(lp_norm(next.values - *rho_true, plain));
      rep.error_lp_weighted.push_back(lp_norm(next.values - *rho_true, weighted));
    }
    rep.rho = next;
    ++rep.iterations;
    if (change <= cfg.rel_tol * std::max(prev_size, 1.0)) {
      rep.converged = true;
      break;
    }
  }
  return rep;
}

}  // namespace fracpot
