// Penetration sweep: solve a grid of (configuration, EV penetration) cells
// against one network and audit the cross-cell monotonicity that must hold
// (extra capability never raises cost, extra EV load never restores
// feasibility).
#pragma once

#include <string>
#include <vector>

#include "gridflex/case_runner.hpp"
#include "gridflex/network.hpp"

namespace gridflex {

struct SweepPlan {
  // configurations in the order they are solved and reported
  std::vector<std::string> configs = {"sdn", "sdntr", "sdn-der", "sdntr-der"};
  std::vector<double> penetrations = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                      0.6, 0.7, 0.8, 0.9, 1.0};
  SolverConfig solver;
  int jobs = 1;  // > 1 solves cells concurrently; results are unaffected
  // when set, any cell ending in error/limit_reached leaves a JSON trace
  // file here named after the cell
  std::string artifact_dir;
};

struct SweepCell {
  std::string config;
  double penetration = 0.0;
  CaseResult result;
};

struct SweepResult {
  std::vector<SweepCell> cells;  // config-major, penetration inner, plan order
  std::vector<std::string> ordering_violations;
  // true when every cell is cleanly feasible or infeasible and no ordering
  // rule was broken
  bool ok() const;
};

// base must not already carry EV demand scaling; each cell applies
// penetration * profile on its own copy
SweepResult run_sweep(const NetworkInstance& base, const EvDemandProfile& profile,
                      const SweepPlan& plan);

// The monotonicity audit run_sweep applies, exposed for tests. Cells that
// errored or hit a limit are skipped (no conclusion can be drawn from them).
std::vector<std::string> audit_sweep_ordering(const std::vector<SweepCell>& cells);

// Last penetration in plan order at which the config stayed feasible,
// -1 when it never was. Used for frontier reporting.
double feasibility_frontier(const std::vector<SweepCell>& cells, const std::string& config);

}  // namespace gridflex
