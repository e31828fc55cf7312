#include "gridflex/schedule.hpp"

namespace gridflex {

std::set<int> DispatchSchedule::closed_lines(int hour) const {
  std::set<int> out;
  const int k = hour - first_hour;
  for (const auto& [line_id, closed] : line_closed) {
    if (k >= 0 && k < static_cast<int>(closed.size()) && closed[k]) out.insert(line_id);
  }
  return out;
}

double DispatchSchedule::priced_cost(const NetworkInstance& inst) const {
  double cost = 0.0;
  for (const Substation& s : inst.substations) {
    auto it = sub_import_mw.find(s.id);
    if (it == sub_import_mw.end()) continue;
    for (int k = 0; k < horizon && k < static_cast<int>(it->second.size()); ++k) {
      cost += s.price_profile[first_hour - 1 + k] * it->second[k];
    }
  }
  for (const Generator& g : inst.generators) {
    auto it = gen_mw.find(g.id);
    if (it == gen_mw.end()) continue;
    for (int k = 0; k < horizon && k < static_cast<int>(it->second.size()); ++k) {
      cost += g.cost_profile[first_hour - 1 + k] * it->second[k];
    }
  }
  return cost;
}

}  // namespace gridflex
