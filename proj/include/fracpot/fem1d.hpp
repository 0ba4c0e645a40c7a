#pragma once

#include <Eigen/Core>
#include <functional>

namespace fracpot {

using ScalarFn = std::function<double(double)>;
using NodalField = Eigen::VectorXd;  // one coefficient per mesh node

// Symmetric tridiagonal matrix; diag has one entry per row, off one per
// adjacent pair.  solve() runs the Thomas elimination (no pivoting; callers
// pass SPD matrices).
struct SymTridiagonal {
  Eigen::VectorXd diag;
  Eigen::VectorXd off;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
};

// Uniform mesh on (0,1) with `cells` elements and cells+1 nodes.
struct Mesh1D {
  int cells = 1;

  double h() const { return 1.0 / cells; }
  int nodes() const { return cells + 1; }
  double node(int i) const { return static_cast<double>(i) / cells; }
};

// Mass and stiffness matrices of the P1 hat basis with natural (Neumann)
// boundary handling: no rows are eliminated, stiffness * constant = 0.
struct FemOperators {
  SymTridiagonal mass;
  SymTridiagonal stiffness;
  Eigen::VectorXd hat_integrals;  // integral of each hat function = mass row sums
};

Mesh1D build_mesh(int cells);
FemOperators assemble(const Mesh1D& mesh);

// Load vector (f, phi_i) by 3-point Gauss-Legendre per element.
Eigen::VectorXd load_vector(const Mesh1D& mesh, const ScalarFn& f);

// Nodal samples f(x_i) (coefficients of the piecewise-linear interpolant).
Eigen::VectorXd interpolate(const Mesh1D& mesh, const ScalarFn& f);

// L2 projection: mass * p = (f, phi).
NodalField l2_project(const Mesh1D& mesh, const FemOperators& ops, const ScalarFn& f);

// Ritz projection with matching mean: (grad w, grad phi_i) = (f', phi_i') for
// all i and integral(w) = integral(f).  The singular Neumann stiffness is made
// SPD by the rank-one penalty S + m m^T (m = hat_integrals, penalty weight 1);
// the mean is corrected additively after the solve.
NodalField ritz_project(const Mesh1D& mesh, const FemOperators& ops,
                        const ScalarFn& f, const ScalarFn& fprime);

// Nodal coefficients of the discrete Laplacian: mass * w = -stiffness * u.
NodalField discrete_laplacian(const FemOperators& ops, const NodalField& u);

// Piecewise-linear evaluation of a nodal field at x in [0,1].
double eval_at_point(const Mesh1D& mesh, const NodalField& u, double x);

}  // namespace fracpot
