// Solver-independent view of a day-ahead operating plan: per-device hourly
// dispatch plus the switching state of every line. Vectors are indexed by
// hour-of-horizon (0-based); ids are the instance ids.
#pragma once

#include <map>
#include <set>
#include <vector>

#include "gridflex/network.hpp"

namespace gridflex {

struct DispatchSchedule {
  int horizon = 0;
  int first_hour = 1;  // absolute hour of index 0 (single-hour cuts move it)
  std::map<int, std::vector<double>> sub_import_mw;     // substation id
  std::map<int, std::vector<double>> gen_mw;            // generator id
  std::map<int, std::vector<double>> pv_curtail_mw;     // pv id
  std::map<int, std::vector<double>> bess_charge_mw;    // bess id
  std::map<int, std::vector<double>> bess_discharge_mw; // bess id
  std::map<int, std::vector<double>> bess_soc_mwh;      // bess id, end of hour
  std::map<int, std::vector<double>> line_flow_mw;      // line id
  std::map<int, std::vector<double>> bus_angle_rad;     // bus id
  std::map<int, std::vector<char>> line_closed;         // line id, 0/1
  double total_cost = 0.0;

  std::set<int> closed_lines(int hour) const;  // hour is 1-based

  // purchase + generation cost implied by the dispatch and the instance
  double priced_cost(const NetworkInstance& inst) const;
};

}  // namespace gridflex
