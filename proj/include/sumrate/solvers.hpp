#pragma once

// Local solvers for the weighted sum-rate problem on the power box, the
// KKT classification they stop on, and a brute-force grid oracle used to
// check them.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sumrate/channel.hpp"
#include "sumrate/polytope.hpp"
#include "sumrate/relaxations.hpp"

namespace sumrate {

enum class Termination { kKktSatisfied, kMaxIters, kLpOptimal, kProjected, kStalled };

std::string to_string(Termination t);

struct ActiveSets {
  std::vector<Index> at_cap;    // p_i = cap_i
  std::vector<Index> interior;  // 0 < p_i < cap_i
  std::vector<Index> at_zero;   // p_i = 0
};

struct KktResult {
  ActiveSets sets;
  VectorXd gradient;
  bool satisfied = false;
  double residual = 0.0;  // largest sign-condition violation
};

// Gradient >= -tol on caps, |gradient| <= tol inside, gradient <= tol at 0.
KktResult kkt_classify(const Problem& pr, const VectorXd& p,
                       double tolerance = 1e-7);

struct SolverReport {
  std::string algorithm;
  VectorXd power;
  VectorXd sir;
  double objective_value = 0.0;
  double kkt_residual = 0.0;
  bool kkt_satisfied = false;
  ActiveSets active_sets;
  long iterations = 0;
  Termination termination = Termination::kMaxIters;
  BoundsReport bounds;
  // Objective after each accepted iterate.
  std::vector<double> trace;
  // Polytope methods: the LP value at the last vertex, the objective
  // sum w log(1 + e^xi) there, and the polytope maximum when enumerable.
  std::optional<double> lp_value;
  std::optional<double> vertex_objective;
  std::optional<double> polytope_upper;
  Index cuts_added = 0;
};

struct GradientOptions {
  long max_iterations = 20000;
  double kkt_tolerance = 1e-7;
  double shrink = 0.5;
  double armijo = 1e-4;
  double min_step = 1e-12;
};

// Projected gradient ascent from p0 with backtracking from the largest step
// that stays in the box.
SolverReport solve_gradient(const Problem& pr, const VectorXd& p0,
                            const GradientOptions& options = {});

struct MultiStartOptions {
  int starts = 16;  // the caps plus starts - 1 uniform random points
  std::uint64_t seed = 1;
  GradientOptions gradient;
};

SolverReport solve_gradient_multistart(const Problem& pr,
                                       const MultiStartOptions& options = {});

struct LinearizedOptions {
  long max_iterations = 400;
  double kkt_tolerance = 1e-7;
  // Add supporting hyperplanes at each retracted vertex.
  bool adaptive_cuts = true;
  // Also run from the vertices maximizing w and each coordinate.
  bool multistart = true;
  bool compute_upper = true;
};

// Successive linearization over the polytope from the vertex xi0.
SolverReport solve_linearized(const Problem& pr, const Polytope& poly,
                              const VectorXd& xi0,
                              const LinearizedOptions& options = {});
// Starts from the floor corner -K 1 (and more vertices if multistart).
SolverReport solve_linearized(const Problem& pr, const Polytope& poly,
                              const LinearizedOptions& options = {});

// max w.xi over the polytope, lifted to powers P(e^xi) and clamped to the
// box. Only when P(e^xi) does not exist is xi first shifted onto the region
// boundary.
SolverReport solve_lp_relax(const Problem& pr, const Polytope& poly,
                            double kkt_tolerance = 1e-7);

// Lifts a log-SIR point to powers: coordinates at the floor become 0 and
// the result is clamped to [0, caps]. Retracts first when xi lies outside
// the SIR region of F.
VectorXd lift_to_power(const Problem& pr, const Polytope& poly,
                       const VectorXd& xi);

enum class OracleObjective { kSumRate, kLogSir };

struct OracleOptions {
  Index resolution = 201;
  bool refine = true;
  OracleObjective objective = OracleObjective::kSumRate;
  unsigned threads = 0;  // 0 picks the hardware concurrency
  double max_points = 2e8;
};

struct OracleResult {
  VectorXd best_power;
  double best_value = 0.0;
  Index grid_resolution = 0;
  bool refined = false;
};

// Exhaustive evaluation on the uniform grid over [0, caps]; with refine, a
// second pass 10 times finer over the cells around the best point. Ties go
// to the lexicographically smallest power.
OracleResult oracle_grid(const Problem& pr, const OracleOptions& options = {});

}  // namespace sumrate
