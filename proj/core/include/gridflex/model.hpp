// Builds the day-ahead MILP: nodal balance with dc power flow, per-line
// switching under a big-M disjunction with a per-hour spanning-forest count,
// dispatchable generation, pv with curtailment, and battery state of charge
// with charge/discharge indicators.
//
// Fixed-topology builds drop every switching variable: open lines get a
// [0,0] flow window and closed lines a hard flow/angle equality, which is
// what the no-reconfiguration cases and the enumeration oracle use.
#pragma once

#include <map>
#include <set>
#include <utility>

#include "gridflex/lp.hpp"
#include "gridflex/network.hpp"
#include "gridflex/schedule.hpp"

namespace gridflex {

struct ModelBuild {
  MilpProblem problem;
  const NetworkInstance* instance = nullptr;
  int horizon = 0;
  int first_hour = 1;  // 1 except for single-hour builds
  bool reconfiguration = false;
  bool ders = false;
  std::set<int> fixed_closed;           // fixed-topology builds only
  std::map<int, double> line_big_m;     // per switchable line
  double angle_limit = 0.0;

  // variable locators keyed by (id, hour); -1 when absent
  int angle(int bus, int t) const { return lookup(angle_, bus, t); }
  int flow(int line, int t) const { return lookup(flow_, line, t); }
  int sub_import(int sub, int t) const { return lookup(sub_, sub, t); }
  int gen(int g, int t) const { return lookup(gen_, g, t); }
  int pv_curtail(int pv, int t) const { return lookup(curt_, pv, t); }
  int bess_charge(int b, int t) const { return lookup(chg_, b, t); }
  int bess_discharge(int b, int t) const { return lookup(dchg_, b, t); }
  int bess_soc(int b, int t) const { return lookup(soc_, b, t); }
  int line_switch(int line, int t) const { return lookup(sw_, line, t); }
  int bess_charge_on(int b, int t) const { return lookup(con_, b, t); }
  int bess_discharge_on(int b, int t) const { return lookup(don_, b, t); }

  DispatchSchedule extract(const std::vector<double>& x) const;

  using Locator = std::map<std::pair<int, int>, int>;
  Locator angle_, flow_, sub_, gen_, curt_, chg_, dchg_, soc_, sw_, con_, don_;

 private:
  static int lookup(const Locator& loc, int id, int t) {
    auto it = loc.find({id, t});
    return it == loc.end() ? -1 : it->second;
  }
};

// Case entry point: reconfiguration per the config, or the normally-closed
// topology when switching is disabled. The fixed topology must be radial.
ModelBuild build_case_model(const NetworkInstance& inst, const CaseConfig& cfg,
                            const SolverConfig& scfg);

// Fixed topology over the full horizon.
ModelBuild build_fixed_model(const NetworkInstance& inst, bool ders, const SolverConfig& scfg,
                             const std::set<int>& closed);

// Fixed topology, one hour only. Refuses instances with batteries when ders
// is on: state of charge couples hours and a single-hour cut would drop it.
ModelBuild build_fixed_hour_model(const NetworkInstance& inst, bool ders,
                                  const SolverConfig& scfg, const std::set<int>& closed,
                                  int hour);

// Case model cut to one hour, switching included. Same battery refusal as
// above; without batteries the day separates into these per-hour problems.
ModelBuild build_case_hour_model(const NetworkInstance& inst, const CaseConfig& cfg,
                                 const SolverConfig& scfg, int hour);

}  // namespace gridflex
