#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fracpot/inverse.hpp"

#include <cmath>
#include <random>

using namespace fracpot;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

ProblemData bench_problem(double x0, SourceLoad load) {
  ProblemData data;
  data.source = [](double x) { return 1.0 + 20.0 * x * x * (1.0 - x) * (1.0 - x); };
  data.initial = [](double x) { return 2.0 + std::cos(2.0 * kPi * x); };
  data.initial_prime = [](double x) { return -2.0 * kPi * std::sin(2.0 * kPi * x); };
  data.x0 = x0;
  data.load = load;
  return data;
}

double expcos_pot(double t) { return std::exp(std::cos(5.0 * t)); }

double zigzag_pot(double t, double T) {
  const double s = t / T;
  if (s < 0.25) return 8.0 / T * t + 0.7;
  if (s < 0.5) return -8.0 / T * t + 4.7;
  if (s < 0.75) return 8.0 / T * t - 3.3;
  return -8.0 / T * t + 8.7;
}

double steps_pot(double t, double T) {
  const double s = t / T;
  if (s < 0.25) return 1.0;
  if (s < 0.5) return 2.5;
  if (s < 0.75) return 1.5;
  return 2.0;
}

PotentialPath sample_potential(const TimeGrid& grid, const std::function<double(double)>& fn) {
  PotentialPath rho;
  rho.values.resize(grid.steps);
  for (int n = 1; n <= grid.steps; ++n) rho.values(n - 1) = fn(grid.time(n));
  return rho;
}

// same-grid data generation: observations of the fully discrete solution,
// anchored at the discrete initial value, with interpolated source loads
struct CrimeSetup {
  Mesh1D mesh;
  FemOperators ops;
  InverseProblem prob;
  Measurement meas;
  PotentialPath truth;
};

CrimeSetup make_crime(int cells, int n_steps, double horizon, double alpha, double x0,
                      const std::function<double(double)>& pot, bool nonlinear) {
  CrimeSetup s{build_mesh(cells), {}, {}, {}, {}};
  s.ops = assemble(s.mesh);
  TimeGrid grid{horizon, n_steps};
  s.truth = sample_potential(grid, pot);
  s.prob.mesh = &s.mesh;
  s.prob.ops = &s.ops;
  s.prob.alpha = alpha;
  s.prob.data = bench_problem(x0, SourceLoad::interpolant);
  s.prob.nonlinear = nonlinear;
  if (nonlinear) s.prob.f_of_u = [](double u) { return (u - 1.0) * (u - 3.0); };
  Trajectory traj =
      nonlinear ? solve_forward_nonlinear(s.mesh, s.ops, grid, alpha, s.truth, s.prob.f_of_u,
                                          s.prob.data)
                : solve_forward(s.mesh, s.ops, grid, alpha, s.truth, s.prob.data);
  Eigen::VectorXd trace = observe(s.mesh, traj, x0);
  s.meas.grid = grid;
  s.meas.x0 = x0;
  s.meas.g0 = trace(0);
  s.meas.g = trace.tail(n_steps);
  return s;
}

}  // namespace

TEST_CASE("cutoff clamps into the admissible interval") {
  CHECK(cutoff(-0.3, 5.0) == 0.0);
  CHECK(cutoff(5.5, 5.0) == 5.0);
  CHECK(cutoff(2.2, 5.0) == 2.2);
  CHECK(cutoff(0.0, 5.0) == 0.0);
  Eigen::VectorXd v(4);
  v << -1.0, 0.5, 4.0, 9.0;
  Eigen::VectorXd c = cutoff(v, 4.0);
  CHECK(c(0) == 0.0);
  CHECK(c(1) == 0.5);
  CHECK(c(2) == 4.0);
  CHECK(c(3) == 4.0);
}

TEST_CASE("measurement validation") {
  Measurement m;
  m.grid = TimeGrid{1.0, 4};
  m.x0 = 0.0;
  m.g0 = 3.0;
  m.g = Eigen::VectorXd::Constant(4, 2.0);
  CHECK_NOTHROW(m.validate());
  Measurement wrong_size = m;
  wrong_size.g = Eigen::VectorXd::Constant(3, 2.0);
  CHECK_THROWS(wrong_size.validate());
  Measurement zero_g0 = m;
  zero_g0.g0 = 0.0;
  CHECK_THROWS(zero_g0.validate());
  Measurement touching_zero = m;
  touching_zero.g(2) = 0.0;
  CHECK_THROWS(touching_zero.validate());
  Measurement negative = m;
  negative.g(1) = -0.1;
  CHECK_THROWS(negative.validate());
}

TEST_CASE("noise model: amplitude, anchoring, and platform-pinned draws") {
  Measurement exact;
  exact.grid = TimeGrid{1.0, 6};
  exact.g0 = 3.0;
  exact.g.resize(6);
  exact.g << 2.0, 1.5, 1.2, 1.1, 1.05, 1.0;

  const double delta = 2.0;  // percent
  const std::uint64_t seed = 777;
  Measurement noisy = add_noise(exact, delta, seed);

  CHECK(noisy.g0 == exact.g0);  // initial value stays noise-free
  CHECK(noisy.delta_percent == delta);
  CHECK(noisy.seed == seed);
  const double eps = std::max(exact.g0, exact.g.maxCoeff()) * delta / 100.0;
  CHECK(noisy.epsilon == eps);
  CHECK((noisy.g - exact.g).cwiseAbs().maxCoeff() <= eps);

  // the draw is the fixed 53-bit mapping of mt19937_64, replicated here
  std::mt19937_64 rng(seed);
  for (int n = 0; n < 6; ++n) {
    const double u = (rng() >> 11) * 0x1.0p-53;
    const double want = exact.g(n) + eps * (2.0 * u - 1.0);
    REQUIRE(noisy.g(n) == want);
  }

  Measurement again = add_noise(exact, delta, seed);
  CHECK((again.g - noisy.g).cwiseAbs().maxCoeff() == 0.0);
  Measurement other = add_noise(exact, delta, seed + 1);
  CHECK((other.g - noisy.g).cwiseAbs().maxCoeff() > 0.0);

  Measurement clean = add_noise(exact, 0.0, seed);
  CHECK((clean.g - exact.g).cwiseAbs().maxCoeff() == 0.0);
  CHECK(clean.epsilon == 0.0);
}

TEST_CASE("noise that would break positivity is rejected") {
  Measurement exact;
  exact.grid = TimeGrid{1.0, 64};
  exact.g0 = 1.0;
  exact.g = Eigen::VectorXd::Constant(64, 1e-9);
  CHECK_THROWS(add_noise(exact, 1.0, 42));
}

TEST_CASE("same-grid data makes the true potential an exact fixed point") {
  struct Case {
    const char* name;
    std::function<double(double)> pot;
    double x0;
  };
  const double T = 0.5;
  const Case cases[] = {
      {"expcos", [](double t) { return expcos_pot(t); }, 0.0},
      {"zigzag", [T](double t) { return zigzag_pot(t, T); }, 0.0},
      {"steps", [T](double t) { return steps_pot(t, T); }, 0.0},
      {"expcos interior point", [](double t) { return expcos_pot(t); }, 0.5},
  };
  for (const Case& c : cases) {
    CAPTURE(c.name);
    CrimeSetup s = make_crime(40, 256, T, 0.5, c.x0, c.pot, false);
    PotentialPath next = fixed_point_step(s.truth, s.meas, s.prob, 5.0);
    CHECK((next.values - s.truth.values).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("semilinear same-grid data is an exact fixed point too") {
  CrimeSetup s = make_crime(30, 128, 1.0, 0.5, 0.0,
                            [](double t) { return steps_pot(t, 1.0); }, true);
  PotentialPath next = fixed_point_step(s.truth, s.meas, s.prob, 5.0);
  CHECK((next.values - s.truth.values).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("the map contracts toward the fixed point") {
  CrimeSetup s = make_crime(40, 256, 0.5, 0.5, 0.0, [](double t) { return expcos_pot(t); },
                            false);
  PotentialPath shifted = s.truth;
  shifted.values.array() += 0.5;
  PotentialPath next = fixed_point_step(shifted, s.meas, s.prob, 5.0);
  const double before = 0.5;
  const double after = (next.values - s.truth.values).cwiseAbs().maxCoeff();
  CHECK(after < 0.5 * before);
}

TEST_CASE("projection keeps iterates admissible") {
  CrimeSetup s = make_crime(20, 64, 0.5, 0.5, 0.0, [](double t) { return expcos_pot(t); },
                            false);
  // a bound below the truth's range forces the clamp to act
  PotentialPath next = fixed_point_step(s.truth, s.meas, s.prob, 1.0);
  CHECK(next.values.minCoeff() >= 0.0);
  CHECK(next.values.maxCoeff() <= 1.0);
  CHECK(next.bound == 1.0);
}

TEST_CASE("reconstruct recovers the potential from clean same-grid data") {
  const double T = 0.5;
  for (bool weighted : {false, true}) {
    CAPTURE(weighted);
    CrimeSetup s = make_crime(40, 256, T, 0.5, 0.0,
                              [T](double t) { return zigzag_pot(t, T); }, false);
    ReconstructionConfig cfg;
    cfg.omega = weighted ? 10.0 : 0.0;
    ReconstructionReport rep = reconstruct(s.meas, s.prob, cfg, &s.truth.values);
    CHECK(rep.converged);
    CHECK(rep.iterations <= 25);
    CHECK((rep.rho.values - s.truth.values).cwiseAbs().maxCoeff() < 1e-8);
    REQUIRE(rep.change_lp.size() == static_cast<std::size_t>(rep.iterations));
    REQUIRE(rep.change_lp_weighted.size() == rep.change_lp.size());
    REQUIRE(rep.error_lp.size() == rep.change_lp.size());
    REQUIRE(rep.error_lp_weighted.size() == rep.change_lp.size());
    CHECK(rep.error_lp.back() < 1e-8);
    // geometric decay of successive changes away from the first step
    for (std::size_t k = 2; k + 1 < rep.change_lp.size(); ++k) {
      REQUIRE(rep.change_lp[k + 1] < 0.9 * rep.change_lp[k]);
    }
  }
}

TEST_CASE("semilinear reconstruction converges") {
  CrimeSetup s = make_crime(30, 128, 1.0, 0.5, 0.0,
                            [](double t) { return expcos_pot(t); }, true);
  ReconstructionConfig cfg;
  cfg.omega = 10.0;
  ReconstructionReport rep = reconstruct(s.meas, s.prob, cfg, &s.truth.values);
  CHECK(rep.converged);
  CHECK((rep.rho.values - s.truth.values).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("zero iteration budget returns the initial guess") {
  CrimeSetup s = make_crime(20, 64, 0.5, 0.5, 0.0, [](double t) { return expcos_pot(t); },
                            false);
  ReconstructionConfig cfg;
  cfg.max_iters = 0;
  cfg.rho_init = 1.25;
  ReconstructionReport rep = reconstruct(s.meas, s.prob, cfg, &s.truth.values);
  CHECK(rep.iterations == 0);
  CHECK_FALSE(rep.converged);
  CHECK(rep.rho.values.size() == 64);
  CHECK((rep.rho.values.array() - 1.25).abs().maxCoeff() == 0.0);
  CHECK(rep.change_lp.empty());
  CHECK(rep.error_lp.empty());
}

TEST_CASE("error diagnostics are skipped without a reference") {
  CrimeSetup s = make_crime(20, 64, 0.5, 0.5, 0.0, [](double t) { return expcos_pot(t); },
                            false);
  ReconstructionReport rep = reconstruct(s.meas, s.prob, ReconstructionConfig{});
  CHECK(rep.converged);
  CHECK(rep.error_lp.empty());
  CHECK(rep.error_lp_weighted.empty());
  CHECK_FALSE(rep.change_lp.empty());
}

TEST_CASE("mild noise perturbs but does not derail the reconstruction") {
  const double T = 0.5;
  CrimeSetup s = make_crime(40, 256, T, 0.5, 0.0, [](double t) { return expcos_pot(t); },
                            false);
  Measurement noisy = add_noise(s.meas, 0.1, 3);
  ReconstructionReport rep = reconstruct(noisy, s.prob, ReconstructionConfig{}, &s.truth.values);
  CHECK(rep.converged);
  CHECK(rep.error_lp.back() < 0.2);
  // clean data does strictly better
  ReconstructionReport clean = reconstruct(s.meas, s.prob, ReconstructionConfig{},
                                           &s.truth.values);
  CHECK(clean.error_lp.back() < rep.error_lp.back());
}

TEST_CASE("fixed point step validates its inputs") {
  CrimeSetup s = make_crime(10, 16, 0.5, 0.5, 0.0, [](double t) { return expcos_pot(t); },
                            false);
  PotentialPath wrong;
  wrong.values = Eigen::VectorXd::Constant(9, 1.0);
  CHECK_THROWS(fixed_point_step(wrong, s.meas, s.prob, 5.0));
  InverseProblem hollow = s.prob;
  hollow.mesh = nullptr;
  CHECK_THROWS(fixed_point_step(s.truth, s.meas, hollow, 5.0));
  Measurement bad = s.meas;
  bad.g(3) = -1.0;
  CHECK_THROWS(fixed_point_step(s.truth, bad, s.prob, 5.0));
}
