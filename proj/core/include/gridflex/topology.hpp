// Radiality checks and exhaustive topology enumeration.
//
// A closed-line set is accepted when it forms a spanning forest in which
// every tree contains exactly one substation bus: closed count equals
// |buses| - |substations|, no cycles, no de-energized bus, and no path
// between two substations.
#pragma once

#include <set>
#include <string>
#include <vector>

#include "gridflex/network.hpp"

namespace gridflex {

struct RadialityReport {
  bool radial = false;
  std::vector<std::string> violations;  // empty iff radial
};

// closed_line_ids may list ids in any order; unknown ids are a violation.
RadialityReport check_radial(const NetworkInstance& inst, const std::set<int>& closed_line_ids);

inline bool is_radial(const NetworkInstance& inst, const std::set<int>& closed) {
  return check_radial(inst, closed).radial;
}

// All radial closed-line sets reachable by toggling switchable lines only
// (non-switchable lines stay closed). Sets are returned in lexicographic
// order of their sorted id sequence. Throws std::invalid_argument when the
// instance has more than max_switchable switchable lines; the enumeration
// is 2^k and meant for small fixtures and oracles.
std::vector<std::set<int>> enumerate_radial_topologies(const NetworkInstance& inst,
                                                       int max_switchable = 12);

// Default topology: every normally_closed line.
std::set<int> base_closed_set(const NetworkInstance& inst);

// Radial topologies with a per-hour capacity screen: hour_ok[p][t - 1] says
// whether topology p can carry hour t at all. The test is necessary, not
// sufficient: every tree line must cover its subtree's demand net of the
// flexibility below it (pv availability, generator and discharge maxima
// when ders is on), and every tree must fit its substation's import cap.
// Without ders the screen is exact, since flows in a tree are determined.
struct HourlyPatternTable {
  std::vector<std::set<int>> closed_sets;   // enumerated radial topologies
  std::vector<std::vector<int>> sw_closed;  // per topology: sorted switchable ids
  std::vector<std::vector<char>> hour_ok;   // [topology][t - 1]
};

HourlyPatternTable screen_topologies_by_hour(const NetworkInstance& inst, bool ders,
                                             int max_switchable = 12);

}  // namespace gridflex
