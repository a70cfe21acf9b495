#pragma once

// Small dense linear programs in inequality form,
//
//   maximize c.x  subject to  G x <= h,  lower <= x <= upper,
//
// solved by a revised simplex method whose basis is the set of n active
// constraints at the current vertex. Entering and leaving choices follow
// Bland's lowest-index rule, so the method cannot cycle and its output is
// deterministic. The lower box corner must be feasible; it is the starting
// vertex, so no phase one is needed.

#include <vector>

#include <Eigen/Dense>

#include "sumrate/errors.hpp"

namespace sumrate {

struct LinearProgram {
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Eigen::Index dimension() const { return lower.size(); }
  // Largest violation of any constraint at x (<= 0 means feasible).
  double max_violation(const Eigen::VectorXd& x) const;
};

struct LpSolution {
  Eigen::VectorXd x;
  double value = 0.0;
  long iterations = 0;
  // Active constraint ids at the returned vertex: 0..n-1 lower bounds,
  // n..2n-1 upper bounds, 2n + j for row j of G.
  std::vector<Eigen::Index> active;
};

// Throws InfeasibleError if the lower corner violates G x <= h (the caller
// built an inconsistent program) and ConvergenceError after max_iterations.
// warm_start, the active set of an earlier solution, is used as the
// starting vertex when it still describes a feasible vertex.
LpSolution solve_lp(const Eigen::VectorXd& c, const LinearProgram& lp,
                    long max_iterations = 100000,
                    const std::vector<Eigen::Index>* warm_start = nullptr);

// Same optimum for programs with many rows of G: the simplex runs on a
// working subset of rows, and the rows the subset optimum violates are added
// until none is violated. The result is an optimal vertex of the full
// program (deterministic, but on ties not necessarily the one solve_lp
// returns). Small programs go straight to solve_lp.
LpSolution solve_lp_row_generation(
    const Eigen::VectorXd& c, const LinearProgram& lp,
    long max_iterations = 100000,
    const std::vector<Eigen::Index>* warm_start = nullptr);

}  // namespace sumrate
