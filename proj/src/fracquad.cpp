#include "fracpot/fracquad.hpp"

#include <cmath>
#include <stdexcept>

namespace fracpot {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// ln Gamma(y) for y >= 10 by the Stirling/Bernoulli series; the first omitted
// term is below 2e-18 at y = 10.
double stirling_log_gamma(double y) {
  static const double c[8] = {
      1.0 / 12.0,   -1.0 / 360.0,      1.0 / 1260.0, -1.0 / 1680.0,
      1.0 / 1188.0, -691.0 / 360360.0, 1.0 / 156.0,  -3617.0 / 122400.0,
  };
  const double inv = 1.0 / y;
  const double inv2 = inv * inv;
  double series = 0.0;
  double power = inv;
  for (double coeff : c) {
    series += coeff * power;
    power *= inv2;
  }
  return (y - 0.5) * std::log(y) - y + 0.5 * std::log(2.0 * kPi) + series;
}

}  // namespace

Eigen::VectorXd TimeGrid::times() const {
  validate();
  Eigen::VectorXd t(steps + 1);
  for (int n = 0; n <= steps; ++n) t(n) = time(n);
  return t;
}

void TimeGrid::validate() const {
  require(horizon > 0.0, "time grid: horizon must be positive");
  require(steps >= 1, "time grid: need at least one step");
}

double log_gamma(double x) {
  require(x > 0.0 && std::isfinite(x), "log_gamma: argument must be positive");
  double shift = 0.0;
  double y = x;
  while (y < 10.0) {
    shift += std::log(y);
    y += 1.0;
  }
  return stirling_log_gamma(y) - shift;
}

double gamma_fn(double x) {
  require(x > 0.0 && std::isfinite(x), "gamma_fn: argument must be positive");
  return std::exp(log_gamma(x));
}

CqWeights cq_weights(double alpha, int n_terms) {
  require(alpha > 0.0 && alpha < 1.0, "cq_weights: alpha must lie in (0,1)");
  require(n_terms >= 0, "cq_weights: negative weight count");
  CqWeights cq;
  cq.alpha = alpha;
  cq.w.resize(n_terms + 1);
  cq.partial.resize(n_terms + 1);
  cq.w(0) = 1.0;
  cq.partial(0) = 1.0;
  for (int j = 1; j <= n_terms; ++j) {
    cq.w(j) = cq.w(j - 1) * ((j - 1.0 - alpha) / j);
    // sigma_j = (-1)^j C(alpha-1, j); the multiplicative form keeps the
    // sequence exactly positive and decreasing
    cq.partial(j) = cq.partial(j - 1) * ((j - alpha) / j);
  }
  return cq;
}

Eigen::VectorXd caputo_becq(const Eigen::VectorXd& v, const CqWeights& cq, double tau) {
  const int n_steps = static_cast<int>(v.size()) - 1;
  require(n_steps >= 1, "caputo_becq: need v^0 and at least one later sample");
  require(tau > 0.0, "caputo_becq: step must be positive");
  require(cq.w.size() >= n_steps + 1, "caputo_becq: not enough weights for the history");

  // convolve the shifted history v - v^0, so constants are annihilated exactly;
  // wr holds the weights reversed so each step's convolution is one dot product
  Eigen::VectorXd shifted = v.array() - v(0);
  Eigen::VectorXd wr(n_steps + 1);
  for (int i = 0; i <= n_steps; ++i) wr(i) = cq.w(n_steps - i);

  const double scale = std::pow(tau, -cq.alpha);
  Eigen::VectorXd d(n_steps);
  for (int n = 1; n <= n_steps; ++n) {
    double conv = cq.w(0) * shifted(n) + wr.segment(n_steps - n, n).dot(shifted.head(n));
    d(n - 1) = scale * conv;
  }
  return d;
}

Eigen::VectorXd caputo_becq(const Eigen::VectorXd& v, double alpha, const TimeGrid& grid) {
  grid.validate();
  require(v.size() == grid.steps + 1, "caputo_becq: sample count does not match the grid");
  return caputo_becq(v, cq_weights(alpha, grid.steps), grid.tau());
}

Eigen::VectorXd caputo_l1(const Eigen::VectorXd& v, double alpha, const TimeGrid& grid) {
  grid.validate();
  require(alpha > 0.0 && alpha < 1.0, "caputo_l1: alpha must lie in (0,1)");
  require(v.size() == grid.steps + 1, "caputo_l1: sample count does not match the grid");
  const int n_steps = grid.steps;
  const double tau = grid.tau();

  Eigen::VectorXd b(n_steps);
  for (int k = 0; k < n_steps; ++k) {
    b(k) = std::pow(k + 1.0, 1.0 - alpha) - std::pow(static_cast<double>(k), 1.0 - alpha);
  }
  const double scale = std::pow(tau, -alpha) / gamma_fn(2.0 - alpha);

  Eigen::VectorXd d(n_steps);
  for (int n = 1; n <= n_steps; ++n) {
    double acc = 0.0;
    for (int j = 1; j <= n; ++j) acc += b(n - j) * (v(j) - v(j - 1));
    d(n - 1) = scale * acc;
  }
  return d;
}

namespace detail {

double ml_series(double alpha, double x) {
  // E_alpha(-x) = sum_k (-x)^k / Gamma(alpha k + 1), Kahan-compensated
  double sum = 0.0, comp = 0.0;
  double sign = 1.0;
  const double logx = (x > 0.0) ? std::log(x) : 0.0;
  for (int k = 0; k < 4000; ++k) {
    double term = (k == 0) ? 1.0 : sign * std::exp(k * logx - log_gamma(alpha * k + 1.0));
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    if (k > 0 && std::abs(term) < 1e-18) break;
    sign = -sign;
  }
  return sum;
}

namespace {

// integrand of the Hankel-contour representation after substituting u = r^alpha:
//   E_alpha(-x) = x sin(alpha pi) / (alpha pi) *
//                 integral_0^inf exp(-u^(1/alpha)) / ((u + x c)^2 + (x s)^2) du
struct MlIntegrand {
  double inv_alpha, xc, xs2;  // x cos(alpha pi), (x sin(alpha pi))^2

  double operator()(double u) const {
    const double shifted = u + xc;
    return std::exp(-std::pow(u, inv_alpha)) / (shifted * shifted + xs2);
  }
};

double simpson(const MlIntegrand& f, double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const MlIntegrand& f, double a, double fa, double b, double fb, double fm,
             double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, fa, m, fm, flm);
  const double right = simpson(f, m, fm, b, fb, frm);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adapt(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1) +
         adapt(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1);
}

double integrate(const MlIntegrand& f, double a, double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = simpson(f, a, fa, b, fb, fm);
  return adapt(f, a, fa, b, fb, fm, whole, tol, 48);
}

}  // namespace

double ml_integral(double alpha, double x) {
  const double c = std::cos(alpha * kPi);
  const double s = std::sin(alpha * kPi);
  MlIntegrand f{1.0 / alpha, x * c, (x * s) * (x * s)};

  // exp(-u^(1/alpha)) < 6e-19 past u = 42^alpha
  const double upper = std::pow(42.0, alpha);
  const double prefactor = x * s / (alpha * kPi);
  const double tol = 1e-12 / std::max(1.0, prefactor);

  // split at the denominator minimum, where the integrand can peak sharply
  const double peak = -x * c;
  double value;
  if (peak > 0.0 && peak < upper) {
    value = integrate(f, 0.0, peak, 0.5 * tol) + integrate(f, peak, upper, 0.5 * tol);
  } else {
    value = integrate(f, 0.0, upper, tol);
  }
  return prefactor * value;
}

}  // namespace detail

double mittag_leffler(double alpha, double z) {
  require(alpha > 0.0 && alpha <= 1.0, "mittag_leffler: alpha must lie in (0,1]");
  require(z <= 0.0, "mittag_leffler: argument must be nonpositive");
  if (z == 0.0) return 1.0;
  if (alpha == 1.0) return std::exp(z);
  const double x = -z;
  // the series loses digits once terms grow like exp(x^(1/alpha))
  if (std::pow(x, 1.0 / alpha) <= 8.0) return detail::ml_series(alpha, x);
  return detail::ml_integral(alpha, x);
}

}  // namespace fracpot
