#include "sumrate/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sumrate {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Row `id` of the stacked constraint system [-I; I; G] x <= [-lower; upper; h].
struct Rows {
  const LinearProgram& lp;
  Index n;

  Index count() const { return 2 * n + lp.G.rows(); }

  double rhs(Index id) const {
    if (id < n) return -lp.lower[id];
    if (id < 2 * n) return lp.upper[id - n];
    return lp.h[id - 2 * n];
  }
  void fill(Index id, Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row) const {
    row.setZero();
    if (id < n) {
      row[id] = -1.0;
    } else if (id < 2 * n) {
      row[id - n] = 1.0;
    } else {
      row = lp.G.row(id - 2 * n);
    }
  }
};

}  // namespace

double LinearProgram::max_violation(const VectorXd& x) const {
  double worst = -std::numeric_limits<double>::infinity();
  worst = std::max(worst, (lower - x).maxCoeff());
  worst = std::max(worst, (x - upper).maxCoeff());
  if (G.rows() > 0) worst = std::max(worst, (G * x - h).maxCoeff());
  return worst;
}

LpSolution solve_lp(const VectorXd& c, const LinearProgram& lp,
                    long max_iterations,
                    const std::vector<Index>* warm_start) {
  const Index n = lp.dimension();
  if (c.size() != n || lp.upper.size() != n ||
      (lp.G.rows() > 0 && lp.G.cols() != n) || lp.h.size() != lp.G.rows()) {
    throw DomainError("linear program dimensions are inconsistent");
  }
  if ((lp.upper.array() < lp.lower.array()).any()) {
    throw InfeasibleError("linear program has an empty box");
  }
  const Rows rows{lp, n};
  const Index m = rows.count();
  const double feas_tol = 1e-9;
  if (lp.max_violation(lp.lower) > feas_tol) {
    throw InfeasibleError(
        "lower box corner violates the constraints; the program was built "
        "inconsistently",
        lp.max_violation(lp.lower));
  }

  const double c_scale = std::max(c.lpNorm<Eigen::Infinity>(), 1e-300);
  const double opt_tol = 1e-13 * c_scale;
  const double dir_tol = 1e-12;

  MatrixXd basis(n, n);
  VectorXd rhs(n);
  const auto load = [&](const std::vector<Index>& ids) {
    for (Index k = 0; k < n; ++k) {
      rows.fill(ids[k], basis.row(k));
      rhs[k] = rows.rhs(ids[k]);
    }
  };

  std::vector<Index> active(n);
  for (Index i = 0; i < n; ++i) active[i] = i;
  if (warm_start != nullptr && static_cast<Index>(warm_start->size()) == n &&
      std::all_of(warm_start->begin(), warm_start->end(),
                  [&](Index id) { return id >= 0 && id < m; })) {
    // Use the given vertex when it is still a nondegenerate basis of a
    // feasible point; otherwise fall back to the lower corner.
    load(*warm_start);
    const Eigen::FullPivLU<MatrixXd> lu(basis);
    if (lu.isInvertible()) {
      const VectorXd x = lu.solve(rhs);
      if (lp.max_violation(x) <= feas_tol) active = *warm_start;
    }
  }
  std::vector<char> is_active(static_cast<std::size_t>(m), 0);
  for (Index id : active) is_active[id] = 1;

  VectorXd gx, gd;
  LpSolution out;
  for (long it = 0; it < max_iterations; ++it) {
    load(active);
    const Eigen::PartialPivLU<MatrixXd> lu(basis);
    const VectorXd x = lu.solve(rhs);

    // c = basis^T lambda; a negative multiplier marks a constraint to drop.
    const VectorXd lambda = lu.transpose().solve(c);
    Index leave_pos = -1;
    for (Index k = 0; k < n; ++k) {
      if (lambda[k] < -opt_tol &&
          (leave_pos < 0 || active[k] < active[leave_pos])) {
        leave_pos = k;
      }
    }
    if (leave_pos < 0) {
      out.x = x;
      out.value = c.dot(x);
      out.iterations = it;
      out.active = active;
      std::sort(out.active.begin(), out.active.end());
      return out;
    }

    // Edge direction: keep the other active rows tight, relax row leave_pos.
    VectorXd unit = VectorXd::Zero(n);
    unit[leave_pos] = -1.0;
    const VectorXd d = lu.solve(unit);
    const double d_norm = std::max(d.lpNorm<Eigen::Infinity>(), 1e-300);
    if (lp.G.rows() > 0) {
      gx.noalias() = lp.G * x;
      gd.noalias() = lp.G * d;
    }

    // Ratio test in increasing id order; strict < keeps the lowest id on ties.
    Index enter = -1;
    double best_step = std::numeric_limits<double>::infinity();
    const auto consider = [&](Index id, double rate, double slack) {
      if (is_active[id] || rate <= dir_tol * d_norm) return;
      const double step = std::max(slack, 0.0) / rate;
      if (step < best_step) {
        best_step = step;
        enter = id;
      }
    };
    for (Index i = 0; i < n; ++i) consider(i, -d[i], x[i] - lp.lower[i]);
    for (Index i = 0; i < n; ++i) consider(n + i, d[i], lp.upper[i] - x[i]);
    for (Index j = 0; j < lp.G.rows(); ++j) consider(2 * n + j, gd[j], lp.h[j] - gx[j]);
    if (enter < 0) {
      throw InfeasibleError("linear program is unbounded");
    }
    is_active[active[leave_pos]] = 0;
    is_active[enter] = 1;
    active[leave_pos] = enter;
  }
  std::ostringstream msg;
  msg << "simplex did not terminate within " << max_iterations
      << " iterations";
  throw ConvergenceError(msg.str(), max_iterations, 0.0);
}

LpSolution solve_lp_row_generation(const VectorXd& c, const LinearProgram& lp,
                                   long max_iterations,
                                   const std::vector<Index>* warm_start) {
  const Index n = lp.dimension();
  const Index rows_g = lp.G.rows();
  if (rows_g <= 16 * n) return solve_lp(c, lp, max_iterations, warm_start);
  const double feas_tol = 1e-9;
  const Index batch = std::max<Index>(2 * n, 8);

  std::vector<Index> working;  // sorted row indices of G
  if (warm_start != nullptr) {
    for (Index id : *warm_start)
      if (id >= 2 * n && id < 2 * n + rows_g) working.push_back(id - 2 * n);
  }
  std::vector<Index> hint;
  if (warm_start != nullptr) hint = *warm_start;

  LinearProgram sub;
  sub.lower = lp.lower;
  sub.upper = lp.upper;
  long iterations = 0;
  VectorXd residual;
  while (true) {
    std::sort(working.begin(), working.end());
    working.erase(std::unique(working.begin(), working.end()), working.end());
    const Index w = static_cast<Index>(working.size());
    sub.G.resize(w, n);
    sub.h.resize(w);
    for (Index k = 0; k < w; ++k) {
      sub.G.row(k) = lp.G.row(working[k]);
      sub.h[k] = lp.h[working[k]];
    }
    // Translate the hint to working-set ids; drop it if a row is missing.
    std::vector<Index> sub_hint;
    for (Index id : hint) {
      if (id < 2 * n) {
        sub_hint.push_back(id);
        continue;
      }
      const auto it = std::lower_bound(working.begin(), working.end(), id - 2 * n);
      if (it == working.end() || *it != id - 2 * n) break;
      sub_hint.push_back(2 * n + (it - working.begin()));
    }
    const bool use_hint = static_cast<Index>(sub_hint.size()) == n;
    LpSolution sol = solve_lp(c, sub, max_iterations - iterations,
                              use_hint ? &sub_hint : nullptr);
    iterations += sol.iterations;

    residual.noalias() = lp.G * sol.x;
    residual -= lp.h;
    std::vector<std::pair<double, Index>> violated;
    for (Index j = 0; j < rows_g; ++j)
      if (residual[j] > feas_tol) violated.emplace_back(-residual[j], j);
    for (Index& id : sol.active)
      if (id >= 2 * n) id = 2 * n + working[id - 2 * n];
    std::sort(sol.active.begin(), sol.active.end());
    if (violated.empty()) {
      sol.iterations = iterations;
      return sol;
    }
    // Most violated first, lowest row index on ties.
    const std::size_t take = std::min<std::size_t>(violated.size(), batch);
    std::partial_sort(violated.begin(), violated.begin() + take, violated.end());
    for (std::size_t k = 0; k < take; ++k) working.push_back(violated[k].second);
    hint = sol.active;
  }
}

}  // namespace sumrate
