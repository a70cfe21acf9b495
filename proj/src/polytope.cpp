#include "sumrate/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sumrate/errors.hpp"

namespace sumrate {

namespace {

double max_constraint_radius(const Problem& pr) {
  double r = 0.0;
  for (const MatrixXd& b : pr.m.B) r = std::max(r, spectral_radius(NonnegMatrix(b)));
  return r;
}

void require_box(const Problem& pr) {
  if (!pr.is_box()) {
    throw DomainError(
        "the polytope solvers handle single-tone problems only (one slot per "
        "user)");
  }
}

}  // namespace

Polytope::Polytope(double floor_depth, VectorXd box_high)
    : floor_depth_(floor_depth) {
  lp_.lower = VectorXd::Constant(box_high.size(), -floor_depth);
  lp_.upper = std::move(box_high);
  lp_.G.resize(0, lp_.lower.size());
  lp_.h.resize(0);
}

void Polytope::add_hyperplanes(std::vector<Hyperplane> hs,
                               const std::vector<Index>& users) {
  if (hs.size() != users.size()) {
    throw DomainError("one user index is needed per hyperplane");
  }
  const Index done = lp_.G.rows();
  const Index m = done + static_cast<Index>(hs.size());
  lp_.G.conservativeResize(m, dimension());
  lp_.h.conservativeResize(m);
  for (std::size_t k = 0; k < hs.size(); ++k) {
    Hyperplane& h = hs[k];
    if (h.normal.size() != dimension() || h.anchor.size() != dimension()) {
      throw DomainError("hyperplane dimension does not match the polytope");
    }
    const Index j = done + static_cast<Index>(k);
    lp_.G.row(j) = h.normal.transpose();
    lp_.h[j] = h.offset();
    hyperplanes_.push_back(std::move(h));
    users_.push_back(users[k]);
  }
}

double Polytope::max_violation(const VectorXd& xi) const {
  return as_lp().max_violation(xi);
}

double default_floor_depth(const Problem& pr) {
  return std::log(max_constraint_radius(pr)) + 10.0;
}

double log_constraint_radius(const Problem& pr, const VectorXd& xi) {
  const VectorXd gamma = xi.array().exp().matrix();
  return std::log(constraint_radii(pr, gamma).maxCoeff());
}

VectorXd retract_to_boundary(const Problem& pr, const VectorXd& xi) {
  const double s = log_constraint_radius(pr, xi);
  return (xi.array() - s).matrix();
}

Polytope build_polytope(const Problem& pr, const PolytopeOptions& options) {
  require_box(pr);
  const Index n = pr.slots();
  const double log_r = std::log(max_constraint_radius(pr));
  const double k = options.floor_depth.value_or(log_r + 10.0);
  if (!(k > log_r)) {
    std::ostringstream msg;
    msg << "floor depth K=" << k << " must exceed log R=" << log_r;
    throw PreconditionError(msg.str(), k - log_r);
  }
  std::vector<Index> grid = options.grid;
  if (grid.empty()) grid.assign(static_cast<std::size_t>(n), 4);
  if (static_cast<Index>(grid.size()) != n) {
    throw DomainError("grid needs one point count per user");
  }
  double total = 1.0;
  for (Index m : grid) {
    if (m < 2) throw DomainError("every grid axis needs at least 2 points");
    total *= static_cast<double>(m);
  }
  if (total > static_cast<double>(options.max_anchors) * 4.0 + 16.0) {
    std::ostringstream msg;
    msg << "polytope grid has " << total << " points; limit is about "
        << options.max_anchors;
    throw PreconditionError(msg.str(), total);
  }

  Polytope poly(k, pr.m.gamma_bar.array().log().matrix());

  const MatrixXd shifted =
      std::exp(k) * MatrixXd::Identity(n, n) - pr.m.F;
  const VectorXd p_low = shifted.partialPivLu().solve(pr.m.v);

  std::vector<Index> idx(static_cast<std::size_t>(n), 0);
  std::vector<Hyperplane> planes;
  std::vector<Index> users;
  VectorXd p(n);
  while (true) {
    bool any_cap = false;
    for (Index i = 0; i < n; ++i) {
      const Index last = grid[i] - 1;
      if (idx[i] == last) {
        p[i] = pr.slot_caps[i];
        any_cap = true;
      } else {
        p[i] = p_low[i] + (pr.slot_caps[i] - p_low[i]) *
                              static_cast<double>(idx[i]) /
                              static_cast<double>(last);
      }
    }
    if (any_cap) {
      if (poly.anchors().size() >= options.max_anchors) {
        throw PreconditionError("polytope anchor limit exceeded",
                                static_cast<double>(poly.anchors().size()));
      }
      const VectorXd zeta = sir_of_power(pr, p).array().log().matrix();
      for (Index l = 0; l < n; ++l) {
        if (idx[l] != grid[l] - 1) continue;
        planes.push_back(supporting_hyperplane(NonnegMatrix(pr.m.B[l]), zeta));
        users.push_back(l);
      }
      poly.add_anchor(zeta);
    }
    Index i = 0;
    while (i < n && ++idx[i] == grid[i]) {
      idx[i] = 0;
      ++i;
    }
    if (i == n) break;
  }
  poly.add_hyperplanes(std::move(planes), users);
  return poly;
}

Index add_boundary_cuts(Polytope& poly, const Problem& pr,
                        const VectorXd& zeta) {
  const VectorXd gamma = zeta.array().exp().matrix();
  const VectorXd radii = constraint_radii(pr, gamma);
  std::vector<Hyperplane> planes;
  std::vector<Index> users;
  for (Index l = 0; l < radii.size(); ++l) {
    if (std::abs(radii[l] - 1.0) > kActiveTolerance) continue;
    planes.push_back(supporting_hyperplane(NonnegMatrix(pr.m.B[l]), zeta));
    users.push_back(l);
  }
  const Index added = static_cast<Index>(planes.size());
  if (added > 0) {
    poly.add_hyperplanes(std::move(planes), users);
    poly.add_anchor(zeta);
  }
  return added;
}

LpSolution lp_solve(const VectorXd& objective, const Polytope& poly,
                    const std::vector<Index>* warm_start) {
  return solve_lp_row_generation(objective, poly.as_lp(), 100000, warm_start);
}

std::optional<double> polytope_max_objective(const Polytope& poly,
                                             const VectorXd& w,
                                             double max_bases) {
  const Index n = poly.dimension();
  const LinearProgram& lp = poly.as_lp();
  const Index m = 2 * n + lp.G.rows();
  double bases = 1.0;
  for (Index k = 0; k < n; ++k) {
    bases *= static_cast<double>(m - k) / static_cast<double>(k + 1);
    if (bases > max_bases) return std::nullopt;
  }
  MatrixXd rows(m, n);
  VectorXd rhs(m);
  rows.topRows(n) = -MatrixXd::Identity(n, n);
  rows.middleRows(n, n) = MatrixXd::Identity(n, n);
  rhs.head(n) = -lp.lower;
  rhs.segment(n, n) = lp.upper;
  if (lp.G.rows() > 0) {
    rows.bottomRows(lp.G.rows()) = lp.G;
    rhs.tail(lp.G.rows()) = lp.h;
  }

  double best = -std::numeric_limits<double>::infinity();
  std::vector<Index> pick(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) pick[k] = k;
  MatrixXd basis(n, n);
  VectorXd b(n);
  while (true) {
    for (Index k = 0; k < n; ++k) {
      basis.row(k) = rows.row(pick[k]);
      b[k] = rhs[pick[k]];
    }
    const Eigen::FullPivLU<MatrixXd> lu(basis);
    if (lu.isInvertible()) {
      const VectorXd x = lu.solve(b);
      if (lp.max_violation(x) <= 1e-9) {
        double val = 0.0;
        for (Index l = 0; l < n; ++l) val += w[l] * std::log1p(std::exp(x[l]));
        best = std::max(best, val);
      }
    }
    Index k = n - 1;
    while (k >= 0 && pick[k] == m - n + k) --k;
    if (k < 0) break;
    ++pick[k];
    for (Index j = k + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
  }
  return best;
}

}  // namespace sumrate
