#pragma once

// Dense nonnegative-matrix spectral primitives: Perron root and vectors,
// Friedland-Karlin bounds, supporting hyperplanes of the log spectral radius
// level set, and diagonal scaling with prescribed fixed vectors.
//
// Everything here is a pure function of its arguments.

#include <Eigen/Dense>

#include "sumrate/errors.hpp"

namespace sumrate {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Square matrix with finite nonnegative entries, order >= 1. Structural
// properties (irreducibility, zero diagonal, ...) are checked where used.
class NonnegMatrix {
 public:
  explicit NonnegMatrix(MatrixXd entries);

  const MatrixXd& matrix() const { return m_; }
  Index order() const { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }

 private:
  MatrixXd m_;
};

// rho with right vector x and left vector y, normalized so that x sums to one
// and x.y = 1 (so x∘y is a probability vector).
struct PerronPair {
  double rho = 0.0;
  VectorXd right;
  VectorXd left;

  VectorXd product() const { return right.cwiseProduct(left); }
};

struct PowerIterationOptions {
  // Stop when the Collatz estimate of rho moves by less than this (relative).
  double tolerance = 1e-12;
  long max_iterations = 100000;
};

// Strong connectivity of the pattern a_ij > 0.
bool is_irreducible(const MatrixXd& a);

// Spectral radius. Rows and columns that are identically zero are deleted
// (repeatedly) first, so matrices of the form diag(gamma)*F with some
// gamma_l = 0 are handled; an all-zero matrix has radius 0.
double spectral_radius(const NonnegMatrix& a,
                       const PowerIterationOptions& options = {});

// Requires an irreducible matrix. Throws DomainError when `a` is reducible
// and ConvergenceError when the iteration does not settle.
PerronPair perron_pair(const NonnegMatrix& a,
                       const PowerIterationOptions& options = {});

// rho(A) * prod_l gamma_l^{(x∘y)_l}; never exceeds rho(diag(gamma) A).
double fk_scaling_lower_bound(const NonnegMatrix& a, const VectorXd& gamma);

struct ZFormBound {
  // prod_l ((Az)_l / z_l)^{(x∘y)_l}, or +infinity when some (Az)_l = 0.
  double value = 0.0;
  // True when A has a positive diagonal and z is a positive multiple of x(A)
  // within the tolerance passed in; the bound is then attained.
  bool equality = false;
};

// Upper bound on rho(A) from any positive test vector z.
ZFormBound fk_z_upper_bound(const NonnegMatrix& a, const VectorXd& z,
                            double equality_tolerance = 1e-8);

// H(xi) = sum_l normal_l (xi_l - anchor_l), the tangent of the convex set
// { xi : log rho(diag(e^xi) B) <= 0 } at `anchor`.
struct Hyperplane {
  VectorXd normal;
  VectorXd anchor;

  double evaluate(const VectorXd& xi) const {
    return normal.dot(xi - anchor);
  }
  // normal . anchor, i.e. the right-hand side of normal . xi <= offset.
  double offset() const { return normal.dot(anchor); }
};

// `eta` must satisfy |rho(diag(e^eta) B) - 1| <= anchor_tolerance, otherwise
// PreconditionError carrying the measured radius.
Hyperplane supporting_hyperplane(const NonnegMatrix& b, const VectorXd& eta,
                                 double anchor_tolerance = 1e-8);

struct ScalingOptions {
  // Relative residual of the row equation after a column sweep.
  double tolerance = 1e-10;
  long max_sweeps = 10000;
  // Majorization slack; see diagonal_scaling.
  double majorization_slack = 1e-12;
  // Starting column scaling (empty means all ones).
  VectorXd initial_column_scaling;
};

struct ScalingPair {
  VectorXd d1;
  VectorXd d2;
  long sweeps = 0;
  double right_residual = 0.0;  // ||D1 A D2 u - u||_inf
  double left_residual = 0.0;   // ||v^T D1 A D2 - v^T||_inf
  // Some zero-diagonal index sits on the majorization boundary (within the
  // slack). Solvable only in special cases such as L = 2.
  bool majorization_boundary = false;
};

// Finds positive d1, d2 with D1 A D2 u = u and v^T D1 A D2 = v^T by
// alternating row/column rescaling. The (t D1, D2 / t) gauge is fixed by
// max(d1) = max(d2).
//
// For every l with a_ll = 0, w = u∘v / sum(u∘v) must satisfy
// sum_{j != l} w_j > w_l; a violation beyond the slack throws
// InfeasibleError naming l.
ScalingPair diagonal_scaling(const NonnegMatrix& a, const VectorXd& u,
                             const VectorXd& v,
                             const ScalingOptions& options = {});

// eta such that x∘y of diag(e^eta) B equals w and rho(diag(e^eta) B) = 1.
VectorXd inverse_weight(const NonnegMatrix& b, const VectorXd& w,
                        const ScalingOptions& options = {});

}  // namespace sumrate
