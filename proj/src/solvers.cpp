#include "sumrate/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "sumrate/errors.hpp"

namespace sumrate {

namespace {

// Relative distance to a bound below which a coordinate sits on it.
constexpr double kSnap = 1e-12;
// Lifted powers this close to a cap (relative) are put on it.
constexpr double kLiftSnap = 1e-9;
// Log-radius above which a log-SIR point counts as outside the region.
constexpr double kOutside = 1e-9;

void require_box(const Problem& pr) {
  if (!pr.is_box()) {
    throw DomainError(
        "the local solvers handle single-tone problems only (one slot per "
        "user)");
  }
}

void require_in_box(const Problem& pr, const VectorXd& p) {
  if (p.size() != pr.slots()) {
    throw DomainError("power vector does not match the problem size");
  }
  for (Index i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < -kSnap * pr.slot_caps[i] ||
        p[i] > pr.slot_caps[i] * (1.0 + kSnap)) {
      std::ostringstream msg;
      msg << "power " << i << " = " << p[i] << " is outside [0, "
          << pr.slot_caps[i] << "]";
      throw DomainError(msg.str());
    }
  }
}

// Clamps into the box and puts near-bound coordinates exactly on the bound.
VectorXd snap(const Problem& pr, VectorXd p, double rel) {
  for (Index i = 0; i < p.size(); ++i) {
    const double cap = pr.slot_caps[i];
    if (p[i] <= rel * cap) p[i] = 0.0;
    if (p[i] >= cap * (1.0 - rel)) p[i] = cap;
  }
  return p;
}

double phi(const Problem& pr, const VectorXd& p) {
  return objective(pr.weights, sir_of_power(pr, p));
}

double phi_log_sir(const VectorXd& w, const VectorXd& xi) {
  double s = 0.0;
  for (Index l = 0; l < xi.size(); ++l) {
    // log(1 + e^x) without overflow.
    const double x = xi[l];
    s += w[l] * (x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)));
  }
  return s;
}

bool lex_less(const VectorXd& a, const VectorXd& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                      b.data() + b.size());
}

// Strictly better value, or equal value with the lexicographically smaller
// power.
bool better(double va, const VectorXd& pa, double vb, const VectorXd& pb) {
  if (va != vb) return va > vb;
  return lex_less(pa, pb);
}

SolverReport finalize(const Problem& pr, const VectorXd& p,
                      std::string algorithm, double tolerance) {
  SolverReport r;
  r.algorithm = std::move(algorithm);
  r.power = p;
  r.sir = sir_of_power(pr, p);
  r.objective_value = objective(pr.weights, r.sir);
  const KktResult kkt = kkt_classify(pr, p, tolerance);
  r.active_sets = kkt.sets;
  r.kkt_residual = kkt.residual;
  r.kkt_satisfied = kkt.satisfied;
  r.bounds = objective_bounds(pr);
  return r;
}

struct Lift {
  VectorXd power;
  bool projected = false;
};

// With clamp_first, a point outside the region whose SIRs are still
// reachable (rho(diag(e^xi) F) < 1) is lifted and clamped instead of
// retracted.
Lift lift(const Problem& pr, const Polytope& poly, const VectorXd& xi_in,
          bool clamp_first = false) {
  VectorXd xi = xi_in;
  Lift out;
  const bool reachable =
      clamp_first &&
      spectral_radius(NonnegMatrix(xi.array().exp().matrix().asDiagonal() *
                                   pr.m.F)) < 1.0 - 1e-12;
  if (!reachable && log_constraint_radius(pr, xi) > kOutside) {
    xi = retract_to_boundary(pr, xi);
    out.projected = true;
  }
  VectorXd gamma = xi.array().exp().matrix();
  const double floor = -poly.floor_depth() + 1e-9;
  for (Index i = 0; i < xi.size(); ++i)
    if (xi[i] <= floor) gamma[i] = 0.0;
  VectorXd p = power_of_sir(pr, gamma);
  for (Index i = 0; i < p.size(); ++i) {
    if (p[i] > pr.slot_caps[i] * (1.0 + kLiftSnap)) out.projected = true;
  }
  out.power = snap(pr, p.cwiseMax(0.0).cwiseMin(pr.slot_caps), kLiftSnap);
  return out;
}

}  // namespace

std::string to_string(Termination t) {
  switch (t) {
    case Termination::kKktSatisfied: return "kkt_satisfied";
    case Termination::kMaxIters: return "max_iters";
    case Termination::kLpOptimal: return "lp_optimal";
    case Termination::kProjected: return "projected";
    case Termination::kStalled: return "stalled";
  }
  return "unknown";
}

KktResult kkt_classify(const Problem& pr, const VectorXd& p, double tolerance) {
  require_box(pr);
  require_in_box(pr, p);
  KktResult out;
  out.gradient = objective_gradient_p(pr, p);
  double worst = 0.0;
  for (Index i = 0; i < p.size(); ++i) {
    const double cap = pr.slot_caps[i];
    const double g = out.gradient[i];
    double violation;
    if (p[i] >= cap * (1.0 - kSnap)) {
      out.sets.at_cap.push_back(i);
      violation = -g;
    } else if (p[i] <= kSnap * cap) {
      out.sets.at_zero.push_back(i);
      violation = g;
    } else {
      out.sets.interior.push_back(i);
      violation = std::abs(g);
    }
    worst = std::max(worst, violation);
  }
  out.residual = worst;
  out.satisfied = worst <= tolerance;
  return out;
}

SolverReport solve_gradient(const Problem& pr, const VectorXd& p0,
                            const GradientOptions& options) {
  require_box(pr);
  require_in_box(pr, p0);
  const Index n = pr.slots();
  VectorXd p = snap(pr, p0.cwiseMax(0.0).cwiseMin(pr.slot_caps), kSnap);
  double value = phi(pr, p);
  std::vector<double> trace{value};
  Termination term = Termination::kMaxIters;
  long it = 0;
  for (; it < options.max_iterations; ++it) {
    const KktResult kkt = kkt_classify(pr, p, options.kkt_tolerance);
    if (kkt.satisfied) {
      term = Termination::kKktSatisfied;
      break;
    }
    const VectorXd& a = kkt.gradient;
    VectorXd b = a;
    for (Index i = 0; i < n; ++i) {
      if ((p[i] <= 0.0 && a[i] < 0.0) ||
          (p[i] >= pr.slot_caps[i] && a[i] > 0.0)) {
        b[i] = 0.0;
      }
    }
    double t_max = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
      if (b[i] > 0.0) t_max = std::min(t_max, (pr.slot_caps[i] - p[i]) / b[i]);
      if (b[i] < 0.0) t_max = std::min(t_max, p[i] / -b[i]);
    }
    const double slope = a.dot(b);
    if (!std::isfinite(t_max) || !(slope > 0.0)) {
      term = Termination::kStalled;
      break;
    }
    bool accepted = false;
    for (double t = t_max; t >= options.min_step; t *= options.shrink) {
      VectorXd trial = p + t * b;
      trial = snap(pr, trial.cwiseMax(0.0).cwiseMin(pr.slot_caps), kSnap);
      const double tv = phi(pr, trial);
      if (tv > value && tv >= value + options.armijo * t * slope) {
        p = std::move(trial);
        value = tv;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      term = Termination::kStalled;
      break;
    }
    trace.push_back(value);
  }
  SolverReport r = finalize(pr, p, "gradient", options.kkt_tolerance);
  r.iterations = it;
  r.termination = term;
  r.trace = std::move(trace);
  return r;
}

SolverReport solve_gradient_multistart(const Problem& pr,
                                       const MultiStartOptions& options) {
  require_box(pr);
  if (options.starts < 1) throw DomainError("multistart needs at least 1 start");
  std::mt19937_64 rng(options.seed);
  const Index n = pr.slots();
  std::optional<SolverReport> best;
  long total = 0;
  for (int s = 0; s < options.starts; ++s) {
    VectorXd p0 = pr.slot_caps;
    if (s > 0) {
      for (Index i = 0; i < n; ++i) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        p0[i] = u * pr.slot_caps[i];
      }
    }
    SolverReport r = solve_gradient(pr, p0, options.gradient);
    total += r.iterations;
    if (!best || better(r.objective_value, r.power, best->objective_value,
                        best->power)) {
      best = std::move(r);
    }
  }
  best->iterations = total;
  return *best;
}

VectorXd lift_to_power(const Problem& pr, const Polytope& poly,
                       const VectorXd& xi) {
  require_box(pr);
  return lift(pr, poly, xi).power;
}

SolverReport solve_linearized(const Problem& pr, const Polytope& poly_in,
                              const VectorXd& xi0,
                              const LinearizedOptions& options) {
  require_box(pr);
  if (xi0.size() != pr.slots()) {
    throw DomainError("start vertex does not match the problem size");
  }
  if (poly_in.max_violation(xi0) > 1e-9) {
    throw DomainError("start point lies outside the polytope");
  }
  const VectorXd& w = pr.weights;
  Polytope poly = poly_in;

  VectorXd xi = xi0;
  VectorXd best_p = lift(pr, poly, xi).power;
  double best_v = phi(pr, best_p);
  std::vector<double> trace{best_v};
  std::optional<VectorXd> kkt_point;
  Termination term = Termination::kMaxIters;
  double last_lp = 0.0;
  Index cuts = 0;
  long it = 0;
  std::vector<Index> warm;

  const auto record = [&](const VectorXd& p) {
    const double v = phi(pr, p);
    if (better(v, p, best_v, best_p)) {
      best_v = v;
      best_p = p;
    }
    trace.push_back(best_v);
  };

  for (; it < options.max_iterations; ++it) {
    const VectorXd e = xi.array().exp().matrix();
    const VectorXd c = (w.array() * e.array() / (1.0 + e.array())).matrix();
    const LpSolution lp =
        lp_solve(c, poly, warm.empty() ? nullptr : &warm);
    warm = lp.active;
    const bool inside = poly.max_violation(xi) <= 1e-9;
    const double gain = c.dot(lp.x - xi);
    if (inside && gain <= 1e-12 * (1.0 + std::abs(c.dot(xi)))) {
      term = Termination::kLpOptimal;
      break;
    }
    xi = lp.x;
    last_lp = lp.value;
    const double s = log_constraint_radius(pr, xi);
    if (s <= kOutside) {
      const VectorXd p = lift(pr, poly, xi).power;
      record(p);
      if (kkt_classify(pr, p, options.kkt_tolerance).satisfied) {
        kkt_point = p;
        term = Termination::kKktSatisfied;
        ++it;
        break;
      }
    } else {
      const VectorXd zeta = (xi.array() - s).matrix();
      record(lift(pr, poly, zeta).power);
      if (options.adaptive_cuts) cuts += add_boundary_cuts(poly, pr, zeta);
    }
  }

  SolverReport r = finalize(pr, kkt_point ? *kkt_point : best_p,
                            "linearized", options.kkt_tolerance);
  r.iterations = it;
  r.termination = term;
  r.trace = std::move(trace);
  r.lp_value = last_lp;
  r.vertex_objective = phi_log_sir(w, xi);
  r.cuts_added = cuts;
  if (options.compute_upper) {
    r.polytope_upper = polytope_max_objective(poly, w);
  }
  return r;
}

SolverReport solve_linearized(const Problem& pr, const Polytope& poly,
                              const LinearizedOptions& options) {
  require_box(pr);
  const Index n = pr.slots();
  std::vector<VectorXd> starts{poly.box_low()};
  if (options.multistart) {
    starts.push_back(lp_solve(pr.weights, poly).x);
    for (Index l = 0; l < n; ++l) {
      starts.push_back(lp_solve(VectorXd::Unit(n, l), poly).x);
    }
  }
  std::optional<SolverReport> best;
  long total = 0;
  Index cuts = 0;
  std::optional<double> upper;
  for (const VectorXd& xi0 : starts) {
    SolverReport r = solve_linearized(pr, poly, xi0, options);
    total += r.iterations;
    cuts += r.cuts_added;
    if (r.polytope_upper) {
      upper = upper ? std::min(*upper, *r.polytope_upper) : *r.polytope_upper;
    }
    if (!best || better(r.objective_value, r.power, best->objective_value,
                        best->power)) {
      best = std::move(r);
    }
  }
  best->iterations = total;
  best->cuts_added = cuts;
  best->polytope_upper = upper;
  return *best;
}

SolverReport solve_lp_relax(const Problem& pr, const Polytope& poly,
                            double kkt_tolerance) {
  require_box(pr);
  const LpSolution lp = lp_solve(pr.weights, poly);
  const Lift lifted = lift(pr, poly, lp.x, true);
  SolverReport r = finalize(pr, lifted.power, "lp", kkt_tolerance);
  r.iterations = lp.iterations;
  r.termination =
      lifted.projected ? Termination::kProjected : Termination::kLpOptimal;
  r.lp_value = lp.value;
  r.vertex_objective = phi_log_sir(pr.weights, lp.x);
  r.trace = {r.objective_value};
  return r;
}

}  // namespace sumrate
