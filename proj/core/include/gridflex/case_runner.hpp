// End-to-end solve of one case: build the model, run the configured solver,
// extract the schedule, and audit it. Every returned schedule has passed
// verify_schedule; a solution that fails the audit is reported as an error,
// never as a result.
#pragma once

#include <string>

#include "gridflex/model.hpp"
#include "gridflex/network.hpp"
#include "gridflex/verify.hpp"

namespace gridflex {

enum class CaseStatus { Feasible, Infeasible, LimitReached, Error };
const char* to_string(CaseStatus s);

struct SolveStats {
  long nodes = 0;
  long lp_iterations = 0;
  double wall_ms = 0.0;
};

struct CaseResult {
  CaseStatus status = CaseStatus::Error;
  double cost = 0.0;        // meaningful when Feasible
  double best_bound = 0.0;  // lower bound proved when the search stopped
  DispatchSchedule schedule;
  ScheduleVerification verification;
  SolveStats stats;
  std::string message;
};

// Dispatches on scfg.solver (branch and bound, or the enumeration oracle).
CaseResult solve_case(const NetworkInstance& inst, const CaseConfig& cfg,
                      const SolverConfig& scfg);

// Independent oracle: solves each hour against every radial topology with a
// fixed-topology LP and keeps the cheapest (first in closed-set order on
// ties). Valid only while hours are independent, so instances with batteries
// under a ders-enabled config are refused with std::invalid_argument.
CaseResult solve_by_enumeration(const NetworkInstance& inst, const CaseConfig& cfg,
                                const SolverConfig& scfg);

}  // namespace gridflex
