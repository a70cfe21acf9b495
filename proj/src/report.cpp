#include "sumrate/report.hpp"

#include <algorithm>
#include <cmath>

#include "sumrate/errors.hpp"

namespace sumrate {

using nlohmann::json;

namespace {

json vec(const VectorXd& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

VectorXd read_vec(const json& j) {
  VectorXd out(static_cast<Index>(j.size()));
  for (Index i = 0; i < out.size(); ++i) out[i] = j[static_cast<std::size_t>(i)].get<double>();
  return out;
}

json header(const char* kind, const std::string& hash) {
  json j;
  j["version"] = kReportVersion;
  j["kind"] = kind;
  j["scenario_hash"] = hash;
  return j;
}

}  // namespace

json bounds_json(const BoundsReport& b) {
  json j;
  j["R"] = b.R;
  j["lower"] = b.lower;
  j["upper"] = b.upper;
  j["argmax_user"] = b.argmax_user;
  j["candidate_power"] = vec(b.candidate_power);
  j["candidate_value"] = b.candidate_value;
  return j;
}

json solver_report_json(const Problem& pr, const SolverReport& r,
                        const std::string& scenario_hash,
                        const std::optional<OracleResult>& oracle) {
  json j = header("solve", scenario_hash);
  j["algorithm"] = r.algorithm;
  j["power"] = vec(r.power);
  j["sir"] = vec(r.sir);
  j["objective_value"] = r.objective_value;
  j["constraint_radii"] = vec(constraint_radii(pr, r.sir));
  j["kkt"] = {{"residual", r.kkt_residual}, {"satisfied", r.kkt_satisfied}};
  j["active_sets"] = {{"at_cap", r.active_sets.at_cap},
                      {"interior", r.active_sets.interior},
                      {"at_zero", r.active_sets.at_zero}};
  j["iterations"] = r.iterations;
  j["termination"] = to_string(r.termination);
  j["bounds"] = bounds_json(r.bounds);
  j["trace"] = r.trace;
  if (r.lp_value) j["lp_value"] = *r.lp_value;
  if (r.vertex_objective) j["vertex_objective"] = *r.vertex_objective;
  if (r.polytope_upper) j["polytope_upper"] = *r.polytope_upper;
  if (r.algorithm == "linearized") j["cuts_added"] = r.cuts_added;
  if (oracle) {
    json o = oracle_report_json(*oracle, scenario_hash)["oracle"];
    o["gap"] = oracle->best_value - r.objective_value;
    j["oracle"] = o;
  }
  return j;
}

json relaxation_report_json(const Problem& pr, const RelaxedSolution& sol,
                            const std::string& scenario_hash) {
  json j = header("relax", scenario_hash);
  const CertificateCheck check = verify_certificate(sol, pr.weights);
  j["variant"] = sol.variant;
  j["gamma_star"] = vec(sol.gamma_star);
  j["relaxed_value"] = sol.relaxed_value;
  j["certificate"] = {{"rho", sol.certificate.rho},
                      {"right", vec(sol.certificate.right)},
                      {"left", vec(sol.certificate.left)},
                      {"radius_error", check.radius_error},
                      {"weight_error", check.weight_error},
                      {"ok", check.ok}};
  if (sol.lifted_power) {
    j["lifted_power"] = vec(*sol.lifted_power);
  } else {
    j["lifted_power"] = nullptr;
  }
  j["lift_certified"] = sol.lift_certified;
  if (sol.lift_certified) j["lifted_objective"] = sol.lifted_objective;
  return j;
}

json bounds_report_json(const BoundsReport& b, const std::string& scenario_hash) {
  json j = header("bounds", scenario_hash);
  j["bounds"] = bounds_json(b);
  return j;
}

json oracle_report_json(const OracleResult& o, const std::string& scenario_hash) {
  json j = header("oracle", scenario_hash);
  j["oracle"] = {{"best_power", vec(o.best_power)},
                 {"best_value", o.best_value},
                 {"resolution", o.grid_resolution},
                 {"refined", o.refined}};
  return j;
}

ReportCheck verify_solver_report(const Problem& pr, const json& report,
                                 double tolerance) {
  const VectorXd p = read_vec(report.at("power"));
  const VectorXd sir = sir_of_power(pr, p);
  ReportCheck out;
  out.objective_error = std::abs(objective(pr.weights, sir) -
                                 report.at("objective_value").get<double>());
  out.sir_error = (sir - read_vec(report.at("sir"))).lpNorm<Eigen::Infinity>();
  out.radius_error = (constraint_radii(pr, sir) -
                      read_vec(report.at("constraint_radii")))
                         .lpNorm<Eigen::Infinity>();
  out.ok = out.objective_error <= tolerance && out.sir_error <= tolerance &&
           out.radius_error <= tolerance;
  return out;
}

}  // namespace sumrate
