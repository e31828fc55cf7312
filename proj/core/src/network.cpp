#include "gridflex/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace gridflex {

namespace {

// Disjoint-set over bus ids, used for the connectivity check.
class UnionFind {
 public:
  int find(int x) {
    auto it = parent_.find(x);
    if (it == parent_.end()) {
      parent_[x] = x;
      return x;
    }
    int root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      int next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }
  void unite(int a, int b) { parent_[find(a)] = find(b); }

 private:
  std::map<int, int> parent_;
};

bool finite_profile(const HourlyProfile& p) {
  return std::all_of(p.begin(), p.end(), [](double v) { return std::isfinite(v); });
}

bool nonnegative_profile(const HourlyProfile& p) {
  return std::all_of(p.begin(), p.end(), [](double v) { return v >= 0.0; });
}

}  // namespace

int NetworkInstance::bus_index(int bus_id) const {
  for (size_t i = 0; i < buses.size(); ++i)
    if (buses[i].id == bus_id) return static_cast<int>(i);
  return -1;
}

int NetworkInstance::line_index(int line_id) const {
  for (size_t i = 0; i < lines.size(); ++i)
    if (lines[i].id == line_id) return static_cast<int>(i);
  return -1;
}

double NetworkInstance::load_mw(int bus_id, int t) const {
  int i = bus_index(bus_id);
  return i < 0 ? 0.0 : buses[i].load_profile[t - 1];
}

double NetworkInstance::ev_demand_mw(int bus_id, int t) const {
  auto it = ev_demand.find(bus_id);
  return it == ev_demand.end() ? 0.0 : it->second[t - 1];
}

CaseConfig case_config_from_name(const std::string& name) {
  if (name == "sdn") return {false, false, 0.0};
  if (name == "sdntr") return {true, false, 0.0};
  if (name == "sdn-der") return {false, true, 0.0};
  if (name == "sdntr-der") return {true, true, 0.0};
  throw ParseError("unknown configuration name: '" + name +
                   "' (expected sdn, sdntr, sdn-der, or sdntr-der)");
}

std::string case_config_name(const CaseConfig& c) {
  std::string s = c.reconfiguration_enabled ? "sdntr" : "sdn";
  if (c.ders_enabled) s += "-der";
  return s;
}

ValidationReport validate_instance(const NetworkInstance& inst) {
  ValidationReport rep;
  auto fail = [&rep](const std::string& msg) { rep.violations.push_back(msg); };

  if (inst.buses.empty()) fail("instance has no buses");
  if (inst.substations.empty()) fail("instance has no substations");
  if (inst.horizon < 1 || inst.horizon > kHoursPerDay)
    fail("horizon " + std::to_string(inst.horizon) + " outside 1..24");

  std::set<int> bus_ids;
  for (const auto& b : inst.buses) {
    std::string tag = "bus " + std::to_string(b.id);
    if (!bus_ids.insert(b.id).second) fail(tag + ": duplicate id");
    if (b.id < 1) fail(tag + ": id must be >= 1");
    if (!finite_profile(b.load_profile) || !nonnegative_profile(b.load_profile))
      fail(tag + ": load_profile must be finite and >= 0");
  }

  std::set<int> line_ids;
  for (const auto& l : inst.lines) {
    std::string tag = "line " + std::to_string(l.id);
    if (!line_ids.insert(l.id).second) fail(tag + ": duplicate id");
    if (l.reactance_x <= 0.0) fail(tag + ": reactance_x must be > 0");
    if (l.rating <= 0.0) fail(tag + ": rating must be > 0");
    if (l.from_bus == l.to_bus) fail(tag + ": from_bus equals to_bus");
    if (!bus_ids.count(l.from_bus))
      fail(tag + ": from_bus " + std::to_string(l.from_bus) + " unknown");
    if (!bus_ids.count(l.to_bus))
      fail(tag + ": to_bus " + std::to_string(l.to_bus) + " unknown");
    if (!l.switchable && !l.normally_closed)
      fail(tag + ": non-switchable lines must be normally closed");
  }

  std::set<int> sub_ids;
  for (const auto& s : inst.substations) {
    std::string tag = "substation " + std::to_string(s.id);
    if (!sub_ids.insert(s.id).second) fail(tag + ": duplicate id");
    if (!bus_ids.count(s.bus)) fail(tag + ": bus " + std::to_string(s.bus) + " unknown");
    if (!finite_profile(s.price_profile) || !nonnegative_profile(s.price_profile))
      fail(tag + ": price_profile must be finite and >= 0");
    if (s.import_cap <= 0.0) fail(tag + ": import_cap must be > 0");
  }

  std::set<int> gen_ids;
  for (const auto& g : inst.generators) {
    std::string tag = "generator " + std::to_string(g.id);
    if (!gen_ids.insert(g.id).second) fail(tag + ": duplicate id");
    if (!bus_ids.count(g.bus)) fail(tag + ": bus " + std::to_string(g.bus) + " unknown");
    if (g.p_min < 0.0 || g.p_max < g.p_min)
      fail(tag + ": requires 0 <= p_min <= p_max");
    if (!finite_profile(g.cost_profile) || !nonnegative_profile(g.cost_profile))
      fail(tag + ": cost_profile must be finite and >= 0");
  }

  std::set<int> pv_ids;
  for (const auto& p : inst.pv_units) {
    std::string tag = "pv " + std::to_string(p.id);
    if (!pv_ids.insert(p.id).second) fail(tag + ": duplicate id");
    if (!bus_ids.count(p.bus)) fail(tag + ": bus " + std::to_string(p.bus) + " unknown");
    if (!finite_profile(p.availability_profile) ||
        !nonnegative_profile(p.availability_profile))
      fail(tag + ": availability_profile must be finite and >= 0");
  }

  std::set<int> bess_ids;
  for (const auto& b : inst.bess_units) {
    std::string tag = "bess " + std::to_string(b.id);
    if (!bess_ids.insert(b.id).second) fail(tag + ": duplicate id");
    if (!bus_ids.count(b.bus)) fail(tag + ": bus " + std::to_string(b.bus) + " unknown");
    if (b.e_cap <= 0.0) fail(tag + ": e_cap must be > 0");
    if (!(0.0 <= b.soc_min && b.soc_min <= b.soc_max && b.soc_max <= 1.0))
      fail(tag + ": requires 0 <= soc_min <= soc_max <= 1");
    if (b.t_chg <= 0.0 || b.t_dchg <= 0.0)
      fail(tag + ": t_chg and t_dchg must be > 0");
    if (!(b.eta_chg > 0.0 && b.eta_chg <= 1.0 && b.eta_dchg > 0.0 && b.eta_dchg <= 1.0))
      fail(tag + ": efficiencies must be in (0, 1]");
    if (b.e_init < b.soc_min * b.e_cap - 1e-12 || b.e_init > b.soc_max * b.e_cap + 1e-12)
      fail(tag + ": e_init " + std::to_string(b.e_init) +
           " outside [soc_min*e_cap, soc_max*e_cap]");
  }

  for (const auto& [bus_id, prof] : inst.ev_demand) {
    std::string tag = "ev_demand bus " + std::to_string(bus_id);
    if (!bus_ids.count(bus_id)) fail(tag + ": unknown bus");
    if (!finite_profile(prof) || !nonnegative_profile(prof))
      fail(tag + ": values must be finite and >= 0");
  }

  // Connectivity over all lines, closed or not. A bus unreachable from the
  // rest can never be served and indicates a broken instance.
  if (!inst.buses.empty() && rep.ok()) {
    UnionFind uf;
    for (const auto& b : inst.buses) uf.find(b.id);
    for (const auto& l : inst.lines) uf.unite(l.from_bus, l.to_bus);
    int root = uf.find(inst.buses.front().id);
    for (const auto& b : inst.buses) {
      if (uf.find(b.id) != root) {
        fail("bus " + std::to_string(b.id) +
             ": not connected to the rest of the network by any line");
        break;
      }
    }
  }

  return rep;
}

double EvDemandProfile::total_energy_mwh() const {
  double e = 0.0;
  for (const auto& [bus, prof] : demand_mw)
    e += std::accumulate(prof.begin(), prof.end(), 0.0);
  return e;
}

NetworkInstance apply_ev_demand(const NetworkInstance& inst,
                                const EvDemandProfile& profile,
                                double penetration) {
  if (!(penetration >= 0.0) || !std::isfinite(penetration))
    throw std::invalid_argument("penetration must be finite and >= 0");
  NetworkInstance out = inst;
  out.ev_demand.clear();
  for (const auto& [bus_id, prof] : profile.demand_mw) {
    if (inst.bus_index(bus_id) < 0)
      throw ReferenceError("ev demand references unknown bus " + std::to_string(bus_id));
    HourlyProfile scaled{};
    for (int t = 0; t < kHoursPerDay; ++t) scaled[t] = penetration * prof[t];
    out.ev_demand[bus_id] = scaled;
  }
  return out;
}

NetworkInstance with_horizon(const NetworkInstance& inst, int hours) {
  if (hours < 1 || hours > kHoursPerDay)
    throw std::invalid_argument("horizon must be in 1..24, got " + std::to_string(hours));
  NetworkInstance out = inst;
  out.horizon = hours;
  return out;
}

}  // namespace gridflex
