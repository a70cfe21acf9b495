#pragma once

// Analytic bounds on the optimum and closed-form maximizers of the log-SIR
// relaxations obtained through the inverse-weight problem.

#include <optional>
#include <string>

#include "sumrate/channel.hpp"
#include "sumrate/spectral.hpp"

namespace sumrate {

struct BoundsReport {
  double R = 0.0;      // max_l rho(B_l)
  double lower = 0.0;  // objective at the uniform SIR point (1/R) 1
  double upper = 0.0;  // objective at the SIR caps gamma_bar
  // Diagnostic only: t x(B_i) for i = argmax_l rho(B_l), with the largest t
  // keeping it inside the caps, and its objective.
  Index argmax_user = 0;
  VectorXd candidate_power;
  double candidate_value = 0.0;
};

BoundsReport objective_bounds(const Problem& pr);

struct RelaxedSolution {
  std::string variant;       // "tilde", "noiseless" or "cap:<l>"
  MatrixXd matrix;           // the relaxation matrix M
  VectorXd gamma_star;
  PerronPair certificate;    // Perron pair of diag(gamma_star) M
  double relaxed_value = 0.0;  // sum_l w_l log gamma*_l
  // P(gamma_star) when gamma_star lies strictly inside the SIR region of F.
  std::optional<VectorXd> lifted_power;
  // The lift respects every cap. gamma_star is then achievable and, being
  // optimal over a superset, maximizes the log-SIR objective of the
  // original problem.
  bool lift_certified = false;
  double lifted_objective = 0.0;  // sum-rate objective at the lift
};

// Maximizes sum w_l log gamma_l subject to rho(diag(gamma) F_tilde) <= 1.
RelaxedSolution relaxed_max_tilde(const Problem& pr, const VectorXd& w);

// Noise-free relaxation: subject to rho(diag(gamma) M) <= 1 with M = F
// (cap_user empty) or M = B_l for l = *cap_user. The F variant needs the
// majorization condition on w; with two users only w = (1/2, 1/2) works.
RelaxedSolution relaxed_max_noiseless(const Problem& pr, const VectorXd& w,
                                      std::optional<Index> cap_user = {});

// argmax_l rho(B_l), the default user for the cap variant.
Index default_cap_user(const Problem& pr);

struct CertificateCheck {
  double radius_error = 0.0;   // |rho(diag(gamma*) M) - 1|
  double weight_error = 0.0;   // ||x∘y - w||_inf
  bool ok = false;
};

// Recomputes the Perron pair from scratch; does not trust the stored one.
CertificateCheck verify_certificate(const RelaxedSolution& sol,
                                    const VectorXd& w);

}  // namespace sumrate
