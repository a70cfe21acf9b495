// Command-line driver: solve, bounds, relax, oracle and gen subcommands.
// Exit codes: 0 success, 2 infeasible problem, 1 usage or other error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sumrate/errors.hpp"
#include "sumrate/polytope.hpp"
#include "sumrate/relaxations.hpp"
#include "sumrate/report.hpp"
#include "sumrate/scenario.hpp"
#include "sumrate/solvers.hpp"

namespace {

using namespace sumrate;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw UsageError("cannot write output file '" + out + "'");
  f << text;
}

SolverReport run_solver(const Problem& pr, const SolverSettings& s,
                        const std::string& algorithm) {
  if (algorithm == "gradient") {
    MultiStartOptions opts;
    opts.starts = s.multistart;
    opts.seed = s.seed;
    opts.gradient.max_iterations = s.max_iters;
    opts.gradient.kkt_tolerance = s.kkt_tol;
    return solve_gradient_multistart(pr, opts);
  }
  PolytopeOptions popts;
  popts.floor_depth = s.log_floor;
  popts.grid = s.grid;
  const Polytope poly = build_polytope(pr, popts);
  if (algorithm == "linearized") {
    LinearizedOptions opts;
    opts.kkt_tolerance = s.kkt_tol;
    return solve_linearized(pr, poly, opts);
  }
  return solve_lp_relax(pr, poly, s.kkt_tol);
}

std::optional<Index> parse_variant(const std::string& variant, Index users) {
  if (variant == "tilde" || variant == "noiseless") return std::nullopt;
  if (variant.rfind("cap:", 0) == 0) {
    const std::string rest = variant.substr(4);
    std::size_t used = 0;
    long l = -1;
    try {
      l = std::stol(rest, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == rest.size() && !rest.empty() && l >= 0 && l < users) return l;
    throw UsageError("variant '" + variant + "': user index must be in [0, " +
                     std::to_string(users) + ")");
  }
  throw UsageError("unknown variant '" + variant +
                   "'; valid: tilde, noiseless, cap:<l>");
}

int run(int argc, char** argv) {
  CLI::App app{"Weighted sum-rate power control on interference channels"};
  app.require_subcommand(1);

  std::string scenario_path, out_path, algorithm, variant = "tilde";
  bool oracle_check = false;
  Index resolution = 0;
  Index users = 0, tones = 1;
  std::uint64_t seed = 1;

  auto* solve = app.add_subcommand("solve", "run a power-control solver");
  solve->add_option("--scenario", scenario_path, "scenario file")->required();
  solve->add_option("--algorithm", algorithm, "solver (default from scenario)")
      ->check(CLI::IsMember({"gradient", "linearized", "lp"}));
  solve->add_flag("--oracle-check", oracle_check,
                  "compare against the grid oracle");
  solve->add_option("--out", out_path, "report file (default stdout)");

  auto* bounds = app.add_subcommand("bounds", "analytic objective bounds");
  bounds->add_option("--scenario", scenario_path, "scenario file")->required();
  bounds->add_option("--out", out_path, "report file (default stdout)");

  auto* relax = app.add_subcommand("relax", "log-SIR relaxation maximizer");
  relax->add_option("--scenario", scenario_path, "scenario file")->required();
  relax->add_option("--variant", variant, "tilde | noiseless | cap:<l>");
  relax->add_option("--out", out_path, "report file (default stdout)");

  auto* oracle = app.add_subcommand("oracle", "brute-force grid search");
  oracle->add_option("--scenario", scenario_path, "scenario file")->required();
  oracle->add_option("--resolution", resolution, "grid points per axis")
      ->check(CLI::Range(Index{11}, Index{100000}));
  oracle->add_option("--out", out_path, "report file (default stdout)");

  auto* gen = app.add_subcommand("gen", "generate a random scenario");
  gen->add_option("--users", users, "number of users")->required()
      ->check(CLI::Range(Index{2}, Index{1000}));
  gen->add_option("--tones", tones, "number of tones")
      ->check(CLI::Range(Index{1}, Index{1000}));
  gen->add_option("--seed", seed, "random seed")->required();
  gen->add_option("--out", out_path, "scenario file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (gen->parsed()) {
    emit(dump_json(scenario_to_json(generate_instance(users, tones, seed))),
         out_path);
    return 0;
  }

  const Scenario sc = load_scenario(scenario_path);
  const Problem pr = sc.problem();
  const std::string hash = scenario_hash(sc);

  if (solve->parsed()) {
    const std::string alg = algorithm.empty() ? sc.solver.algorithm : algorithm;
    const SolverReport r = run_solver(pr, sc.solver, alg);
    std::optional<OracleResult> o;
    if (oracle_check) {
      OracleOptions oo;
      oo.resolution = sc.solver.oracle_resolution;
      o = oracle_grid(pr, oo);
    }
    emit(dump_json(solver_report_json(pr, r, hash, o)), out_path);
  } else if (bounds->parsed()) {
    emit(dump_json(bounds_report_json(objective_bounds(pr), hash)), out_path);
  } else if (relax->parsed()) {
    const std::optional<Index> cap = parse_variant(variant, pr.users);
    const RelaxedSolution sol =
        variant == "tilde" ? relaxed_max_tilde(pr, pr.weights)
                           : relaxed_max_noiseless(pr, pr.weights, cap);
    emit(dump_json(relaxation_report_json(pr, sol, hash)), out_path);
  } else if (oracle->parsed()) {
    OracleOptions oo;
    oo.resolution = resolution > 0 ? resolution : sc.solver.oracle_resolution;
    emit(dump_json(oracle_report_json(oracle_grid(pr, oo), hash)), out_path);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const sumrate::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
