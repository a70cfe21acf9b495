#include "sumrate/relaxations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sumrate {

namespace {

RelaxedSolution solve_relaxation(const Problem& pr, const VectorXd& w,
                                 const MatrixXd& m, std::string variant) {
  if (w.size() != pr.slots()) {
    throw DomainError("weight vector does not match the problem size");
  }
  RelaxedSolution out;
  out.variant = std::move(variant);
  out.matrix = m;
  const NonnegMatrix nm(m);
  const VectorXd eta = inverse_weight(nm, w);
  out.gamma_star = eta.array().exp().matrix();
  out.certificate =
      perron_pair(NonnegMatrix(out.gamma_star.asDiagonal() * m));
  out.relaxed_value = objective_log(w, out.gamma_star);

  const double rho_f = spectral_radius(
      NonnegMatrix(out.gamma_star.asDiagonal() * pr.m.F));
  if (rho_f < 1.0 - kRegionTolerance) {
    VectorXd p = power_of_sir(pr, out.gamma_star);
    out.lift_certified =
        (p.array() <= pr.slot_caps.array() * (1.0 + kRegionTolerance)).all();
    if (pr.tones > 1) {
      // Budgets are per user across tones.
      for (Index l = 0; l < pr.users; ++l) {
        double used = 0.0;
        for (Index s = 0; s < pr.slots(); ++s)
          if (pr.owner[s] == l) used += p[s];
        if (used > pr.user_caps[l] * (1.0 + kRegionTolerance)) {
          out.lift_certified = false;
        }
      }
    }
    if (out.lift_certified) {
      p = p.cwiseMin(pr.slot_caps);
      out.lifted_objective = objective(pr.weights, sir_of_power(pr, p));
    }
    out.lifted_power = std::move(p);
  }
  return out;
}

}  // namespace

BoundsReport objective_bounds(const Problem& pr) {
  BoundsReport out;
  for (Index l = 0; l < pr.users; ++l) {
    const double r = spectral_radius(NonnegMatrix(pr.m.B[l]));
    if (r > out.R) {
      out.R = r;
      out.argmax_user = l;
    }
  }
  const Index n = pr.slots();
  out.lower = objective(pr.weights, VectorXd::Constant(n, 1.0 / out.R));
  out.upper = objective(pr.weights, pr.m.gamma_bar);

  const PerronPair pair = perron_pair(NonnegMatrix(pr.m.B[out.argmax_user]));
  // Largest t keeping every user's budget (summed over its slots).
  double t = std::numeric_limits<double>::infinity();
  for (Index l = 0; l < pr.users; ++l) {
    double used = 0.0;
    for (Index s = 0; s < n; ++s)
      if (pr.owner[s] == l) used += pair.right[s];
    t = std::min(t, pr.user_caps[l] / used);
  }
  out.candidate_power =
      (t * pair.right).cwiseMax(VectorXd::Zero(n)).cwiseMin(pr.slot_caps);
  out.candidate_value =
      objective(pr.weights, sir_of_power(pr, out.candidate_power));
  return out;
}

RelaxedSolution relaxed_max_tilde(const Problem& pr, const VectorXd& w) {
  return solve_relaxation(pr, w, pr.m.F_tilde, "tilde");
}

RelaxedSolution relaxed_max_noiseless(const Problem& pr, const VectorXd& w,
                                      std::optional<Index> cap_user) {
  if (!cap_user) return solve_relaxation(pr, w, pr.m.F, "noiseless");
  if (*cap_user < 0 || *cap_user >= pr.users) {
    std::ostringstream msg;
    msg << "cap user " << *cap_user << " out of range [0, " << pr.users
        << ")";
    throw DomainError(msg.str());
  }
  return solve_relaxation(pr, w, pr.m.B[*cap_user],
                          "cap:" + std::to_string(*cap_user));
}

Index default_cap_user(const Problem& pr) {
  return objective_bounds(pr).argmax_user;
}

CertificateCheck verify_certificate(const RelaxedSolution& sol,
                                    const VectorXd& w) {
  const PerronPair pair =
      perron_pair(NonnegMatrix(sol.gamma_star.asDiagonal() * sol.matrix));
  CertificateCheck out;
  out.radius_error = std::abs(pair.rho - 1.0);
  out.weight_error = (pair.product() - w).lpNorm<Eigen::Infinity>();
  out.ok = out.radius_error <= 1e-8 && out.weight_error <= 1e-7;
  return out;
}

}  // namespace sumrate
