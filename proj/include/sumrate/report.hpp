#pragma once

// Machine-readable reports. Every report stores the power vector it was
// computed from, so it can be re-verified without trusting the solver.

#include <optional>
#include <string>

#include <json.hpp>

#include "sumrate/relaxations.hpp"
#include "sumrate/solvers.hpp"

namespace sumrate {

inline constexpr const char* kReportVersion = "sumrate-report/1";

nlohmann::json bounds_json(const BoundsReport& b);

nlohmann::json solver_report_json(const Problem& pr, const SolverReport& r,
                                  const std::string& scenario_hash,
                                  const std::optional<OracleResult>& oracle = {});

nlohmann::json relaxation_report_json(const Problem& pr,
                                      const RelaxedSolution& sol,
                                      const std::string& scenario_hash);

nlohmann::json bounds_report_json(const BoundsReport& b,
                                  const std::string& scenario_hash);

nlohmann::json oracle_report_json(const OracleResult& o,
                                  const std::string& scenario_hash);

struct ReportCheck {
  double objective_error = 0.0;  // |stored - recomputed objective|
  double sir_error = 0.0;        // max |stored - recomputed SIR|
  double radius_error = 0.0;     // max |stored - recomputed radius|
  bool ok = false;               // all errors <= tolerance
};

// Recomputes objective, SIRs and constraint radii from the stored power of
// a solver report.
ReportCheck verify_solver_report(const Problem& pr, const nlohmann::json& report,
                                 double tolerance = 1e-10);

}  // namespace sumrate
