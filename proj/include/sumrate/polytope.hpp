#pragma once

// Outer polyhedral approximation of the log-SIR feasible set
//
//   D = { xi : log rho(diag(e^xi) B_l) <= 0 for every user l },
//
// cut by the box -K <= xi <= log(gamma_bar). Each supporting hyperplane is
// tangent to one of the convex surfaces log rho(diag(e^xi) B_l) = 0 at a
// boundary anchor, so the polytope always contains D intersected with the
// box.

#include <cstddef>
#include <optional>
#include <vector>

#include "sumrate/channel.hpp"
#include "sumrate/simplex.hpp"
#include "sumrate/spectral.hpp"

namespace sumrate {

class Polytope {
 public:
  Polytope() = default;
  // The box -K 1 <= xi <= box_high with no hyperplanes yet.
  Polytope(double floor_depth, VectorXd box_high);

  // Appends the constraints h.normal . xi <= h.offset(); users[j] names the
  // B_l that hyperplane j supports. One batch costs one resize.
  void add_hyperplanes(std::vector<Hyperplane> hs, const std::vector<Index>& users);
  void add_anchor(VectorXd zeta) { anchors_.push_back(std::move(zeta)); }

  const std::vector<Hyperplane>& hyperplanes() const { return hyperplanes_; }
  const std::vector<Index>& hyperplane_user() const { return users_; }
  const std::vector<VectorXd>& anchors() const { return anchors_; }
  const VectorXd& box_low() const { return lp_.lower; }
  const VectorXd& box_high() const { return lp_.upper; }
  double floor_depth() const { return floor_depth_; }
  Index dimension() const { return lp_.lower.size(); }

  // The constraint system, kept in sync with the hyperplanes.
  const LinearProgram& as_lp() const { return lp_; }
  // Largest constraint violation at xi (<= 0 inside).
  double max_violation(const VectorXd& xi) const;

 private:
  double floor_depth_ = 0.0;  // K
  std::vector<Hyperplane> hyperplanes_;
  std::vector<Index> users_;  // the B_l each hyperplane supports
  std::vector<VectorXd> anchors_;
  LinearProgram lp_;
};

struct PolytopeOptions {
  // K; defaults to log R + 10 where R = max_l rho(B_l).
  std::optional<double> floor_depth;
  // Grid points per axis (each >= 2); empty means 4 on every axis.
  std::vector<Index> grid;
  // Refuse to build more anchors than this.
  std::size_t max_anchors = 200000;
};

// Anchors are log gamma(p) for the points p of an equidistant grid over
// [p_low, caps] (endpoints included) with at least one coordinate at its
// cap, where p_low = (e^K I - F)^{-1} v. At each anchor there is one
// hyperplane per user whose cap is attained. Single-tone problems only.
Polytope build_polytope(const Problem& pr, const PolytopeOptions& options = {});

// Default K for a problem.
double default_floor_depth(const Problem& pr);

// log max_l rho(diag(e^xi) B_l): <= 0 exactly on D.
double log_constraint_radius(const Problem& pr, const VectorXd& xi);

// Uniform shift of xi onto the boundary of D (rho is homogeneous).
VectorXd retract_to_boundary(const Problem& pr, const VectorXd& xi);

// Adds the supporting hyperplanes of every user whose constraint is active
// at the boundary point zeta. Returns how many were added.
Index add_boundary_cuts(Polytope& poly, const Problem& pr,
                        const VectorXd& zeta);

// Maximizes objective . xi over the polytope. A previous solution's active
// set may be passed to start from that vertex when it is still one.
LpSolution lp_solve(const VectorXd& objective, const Polytope& poly,
                    const std::vector<Index>* warm_start = nullptr);

// Maximum of sum_l w_l log(1 + e^{xi_l}) over the polytope by enumerating
// its vertices. Returns nothing when more than max_bases candidate bases
// would have to be examined.
std::optional<double> polytope_max_objective(const Polytope& poly,
                                             const VectorXd& w,
                                             double max_bases = 2e6);

}  // namespace sumrate
