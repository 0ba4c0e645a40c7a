#include "fracpot/forward.hpp"

#include <cmath>
#include <stdexcept>

namespace fracpot {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// 5-point Gauss-Legendre on [-1,1]
constexpr double kG5Node[5] = {0.0, 0.5384693101056831, -0.5384693101056831,
                               0.9061798459386640, -0.9061798459386640};
constexpr double kG5Weight[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                 0.2369268850561891, 0.2369268850561891};

// int_0^1 g(x) cos(k pi x) dx against the L2-normalized cosine basis: the
// panel count grows with k so each panel sees at most a quarter period
double cosine_coefficient(const ScalarFn& g, int k) {
  const int panels = std::max(32, 4 * k);
  const double width = 1.0 / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * width;
    for (int q = 0; q < 5; ++q) {
      const double x = mid + 0.5 * width * kG5Node[q];
      acc += 0.5 * width * kG5Weight[q] * g(x) * std::cos(k * kPi * x);
    }
  }
  return k == 0 ? acc : 2.0 * acc;
}

SymTridiagonal step_matrix(const FemOperators& ops, double shift) {
  SymTridiagonal a;
  a.diag = shift * ops.mass.diag + ops.stiffness.diag;
  a.off = shift * ops.mass.off + ops.stiffness.off;
  return a;
}

// Shared time loop.  When f_of_u is null the load is the fixed spatial source
// from data; otherwise it is the lagged nodal evaluation of f_of_u.
Trajectory run_scheme(const Mesh1D& mesh, const FemOperators& ops, const TimeGrid& grid,
                      double alpha, const PotentialPath& rho, const ProblemData& data,
                      const ScalarFn* f_of_u) {
  grid.validate();
  require(alpha > 0.0 && alpha < 1.0, "forward: alpha must lie in (0,1)");
  require(rho.values.size() == grid.steps, "forward: need one potential sample per step");
  rho.validate();

  const int n_steps = grid.steps;
  const double s = std::pow(grid.tau(), -alpha);
  const CqWeights cq = cq_weights(alpha, n_steps);
  const Eigen::VectorXd wr = cq.w.reverse();  // wr(i) = w(N - i)

  Trajectory traj;
  traj.grid = grid;
  traj.fields.resize(mesh.nodes(), n_steps + 1);
  traj.fields.col(0) = ritz_project(mesh, ops, data.initial, data.initial_prime);

  Eigen::VectorXd fixed_load;
  if (!f_of_u) {
    fixed_load = data.load == SourceLoad::quadrature
                     ? load_vector(mesh, data.source)
                     : ops.mass.apply(interpolate(mesh, data.source));
  }

  for (int n = 1; n <= n_steps; ++n) {
    // sum_{j=1}^{n} w_j U^{n-j} as one product against the filled columns
    Eigen::VectorXd memory = cq.partial(n) * traj.fields.col(0) -
                             traj.fields.leftCols(n) * wr.segment(n_steps - n, n);
    Eigen::VectorXd rhs = s * ops.mass.apply(memory);
    if (f_of_u) {
      const ScalarFn& f = *f_of_u;
      rhs += ops.mass.apply(
          traj.fields.col(n - 1).unaryExpr([&f](double u) { return f(u); }).eval());
    } else {
      rhs += fixed_load;
    }
    traj.fields.col(n) = step_matrix(ops, s + rho.values(n - 1)).solve(rhs);
  }
  return traj;
}

}  // namespace

void PotentialPath::validate() const {
  for (int i = 0; i < values.size(); ++i) {
    if (!(values(i) >= 0.0 && values(i) <= bound)) {
      throw std::invalid_argument("potential sample outside [0, bound]");
    }
  }
}

Trajectory solve_forward(const Mesh1D& mesh, const FemOperators& ops, const TimeGrid& grid,
                         double alpha, const PotentialPath& rho, const ProblemData& data) {
  require(static_cast<bool>(data.source), "forward: missing source");
  return run_scheme(mesh, ops, grid, alpha, rho, data, nullptr);
}

Trajectory solve_forward_nonlinear(const Mesh1D& mesh, const FemOperators& ops,
                                   const TimeGrid& grid, double alpha, const PotentialPath& rho,
                                   const ScalarFn& f_of_u, const ProblemData& data) {
  require(static_cast<bool>(f_of_u), "forward: missing nonlinearity");
  return run_scheme(mesh, ops, grid, alpha, rho, data, &f_of_u);
}

Eigen::VectorXd observe(const Mesh1D& mesh, const Trajectory& traj, double x) {
  const int cols = static_cast<int>(traj.fields.cols());
  Eigen::VectorXd g(cols);
  for (int n = 0; n < cols; ++n) g(n) = eval_at_point(mesh, traj.fields.col(n), x);
  return g;
}

namespace {

// time factor of mode k: E_alpha(-mu t^alpha) a_k + f_k / mu (1 - E_alpha(-mu t^alpha)),
// with the mu -> 0 limit a_k + f_k t^alpha / Gamma(1+alpha)
double mode_factor(const SpectralSolution& sol, int k, double t) {
  if (t == 0.0) return sol.a(k);
  const double mu = k * kPi * k * kPi + sol.rho0;
  if (mu < 1e-14) return sol.a(k) + sol.f(k) * std::pow(t, sol.alpha) / gamma_fn(1.0 + sol.alpha);
  const double e = mittag_leffler(sol.alpha, -mu * std::pow(t, sol.alpha));
  return sol.a(k) * e + sol.f(k) / mu * (1.0 - e);
}

}  // namespace

double SpectralSolution::operator()(double x, double t) const {
  double acc = 0.0;
  for (int k = 0; k < a.size(); ++k) acc += mode_factor(*this, k, t) * std::cos(k * kPi * x);
  return acc;
}

Eigen::VectorXd SpectralSolution::field(const Mesh1D& mesh, double t) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.nodes());
  for (int k = 0; k < a.size(); ++k) {
    const double factor = mode_factor(*this, k, t);
    for (int i = 0; i < mesh.nodes(); ++i) out(i) += factor * std::cos(k * kPi * mesh.node(i));
  }
  return out;
}

SpectralSolution spectral_solution(double alpha, double rho0, const ProblemData& data,
                                   int n_modes) {
  require(alpha > 0.0 && alpha <= 1.0, "spectral: alpha must lie in (0,1]");
  require(rho0 >= 0.0, "spectral: rho0 must be nonnegative");
  require(n_modes >= 1, "spectral: need at least the mean mode");
  require(static_cast<bool>(data.source) && static_cast<bool>(data.initial),
          "spectral: missing data");
  SpectralSolution sol;
  sol.alpha = alpha;
  sol.rho0 = rho0;
  sol.a.resize(n_modes);
  sol.f.resize(n_modes);
  for (int k = 0; k < n_modes; ++k) {
    sol.a(k) = cosine_coefficient(data.initial, k);
    sol.f(k) = cosine_coefficient(data.source, k);
  }
  return sol;
}

double exact_constant_coeff_solution(double alpha, double rho0, const ProblemData& data,
                                     int n_modes, double x, double t) {
  return spectral_solution(alpha, rho0, data, n_modes)(x, t);
}

}  // namespace fracpot
