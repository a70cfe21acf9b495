#pragma once

// Gaussian interference channel: instances, the normalized interference
// matrices derived from them, the power <-> SIR maps, and the weighted
// sum-rate objective.
//
// Units: powers are linear (noise and caps share one power unit), SIRs are
// dimensionless, rates are in nats.

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sumrate/spectral.hpp"

namespace sumrate {

// Radius <= 1 + kRegionTolerance counts as inside the achievable region.
inline constexpr double kRegionTolerance = 1e-9;
// |radius - 1| <= kActiveTolerance marks a cap as active.
inline constexpr double kActiveTolerance = 1e-8;

struct ChannelInstance {
  MatrixXd gains;    // g_lj: gain from transmitter j to receiver l, > 0
  VectorXd noise;    // n_l > 0
  VectorXd caps;     // per-user power cap, > 0
  VectorXd weights;  // nonnegative, sums to one
  double snr_gap = 1.0;

  Index users() const { return gains.rows(); }
  // Throws DomainError describing the first violated invariant.
  void validate() const;
};

// K tones sharing one per-user budget summed over tones.
struct MultiToneInstance {
  Index users = 0;
  Index tones = 0;
  std::vector<MatrixXd> gains;  // one users x users matrix per tone
  std::vector<VectorXd> noise;  // one vector per tone
  VectorXd caps;                // per-user budget across all tones
  VectorXd weights;             // per user, sums to one
  double snr_gap = 1.0;
  // Optional explicit stacked interference matrix (tone coupling). Used as
  // given: zero diagonal, already normalized by the direct gains.
  std::optional<MatrixXd> interference;

  void validate() const;
};

struct DerivedMatrices {
  MatrixXd F;                // normalized cross gains, zero diagonal
  VectorXd v;                // n_l / g_ll
  MatrixXd F_tilde;          // F with v_l / cap_l on the diagonal
  std::vector<MatrixXd> B;   // per-user constraint matrices
  VectorXd gamma_bar;        // per-slot SIR caps cap / v
};

DerivedMatrices derive_matrices(const ChannelInstance& inst);

// A problem in stacked slot form. A single-tone channel has one slot per
// user; a multi-tone channel stacks slots user-major, (user l, tone k) at
// index l * tones + k. Each user owns a budget over its slots.
struct Problem {
  DerivedMatrices m;
  VectorXd weights;            // per slot, probability vector
  VectorXd slot_caps;          // budget of the owning user, per slot
  VectorXd user_caps;
  std::vector<Index> owner;    // slot -> user
  Index users = 0;
  Index tones = 1;

  Index slots() const { return weights.size(); }
  // Every user owns exactly one slot, so the feasible set is the box [0, caps].
  bool is_box() const { return tones == 1; }

  static Problem from(const ChannelInstance& inst);
};

struct StackedChannel {
  Problem problem;
  // Index-permutation-free check: entries coupling different tones are zero.
  bool block_diagonal = true;
};

StackedChannel stack_multitone(const MultiToneInstance& mt);

// gamma_l = p_l / ((F p)_l + v_l).
VectorXd sir_of_power(const Problem& pr, const VectorXd& p);

// (I - diag(gamma) F)^{-1} diag(gamma) v. Throws InfeasibleError carrying
// rho(diag(gamma) F) when that radius is >= 1.
VectorXd power_of_sir(const Problem& pr, const VectorXd& gamma);

// rho(diag(gamma) B_l) for every user l.
VectorXd constraint_radii(const Problem& pr, const VectorXd& gamma);

struct RegionMembership {
  bool inside = false;
  std::vector<Index> active_set;  // users whose cap binds
  VectorXd radii;
};

RegionMembership in_achievable_region(const Problem& pr,
                                      const VectorXd& gamma);

// Noise-free SIR beta_l = p_l / (F p)_l. Scale invariant; throws DomainError
// when some interference sum vanishes (p with a single nonzero entry).
VectorXd noiseless_sir(const Problem& pr, const VectorXd& p);

// sum_l w_l log(1 + gamma_l), in nats.
double objective(const VectorXd& w, const VectorXd& gamma);
// sum_l w_l log(gamma_l); requires gamma > 0.
double objective_log(const VectorXd& w, const VectorXd& gamma);

// d gamma_i / d p_j = diag((Fp + v)^{-1}) (I - diag(gamma(p)) F).
MatrixXd sir_jacobian(const Problem& pr, const VectorXd& p);

// Gradient of the objective with respect to the power vector.
VectorXd objective_gradient_p(const Problem& pr, const VectorXd& p);

}  // namespace sumrate
