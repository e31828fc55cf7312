#include "gridflex/topology.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>

namespace gridflex {
namespace {

// Small union-find over arbitrary int keys.
class UnionFind {
 public:
  int find(int a) {
    auto it = parent_.find(a);
    if (it == parent_.end()) {
      parent_[a] = a;
      return a;
    }
    int root = it->second;
    if (root != a) {
      root = find(root);
      parent_[a] = root;
    }
    return root;
  }

  // false when a and b were already connected.
  bool unite(int a, int b) {
    int ra = find(a);
    int rb = find(b);
    if (ra == rb) return false;
    parent_[std::max(ra, rb)] = std::min(ra, rb);
    return true;
  }

 private:
  std::map<int, int> parent_;
};

}  // namespace

RadialityReport check_radial(const NetworkInstance& inst, const std::set<int>& closed) {
  RadialityReport report;
  auto add = [&report](std::string v) { report.violations.push_back(std::move(v)); };

  std::map<int, const Line*> lines;
  for (const Line& l : inst.lines) lines[l.id] = &l;
  for (int id : closed) {
    if (!lines.count(id)) add("closed set names unknown line " + std::to_string(id));
  }
  for (const Line& l : inst.lines) {
    if (!l.switchable && !closed.count(l.id)) {
      add("non-switchable line " + std::to_string(l.id) + " is open");
    }
  }
  if (!report.violations.empty()) return report;

  const std::size_t expected = inst.buses.size() - inst.substations.size();
  if (closed.size() != expected) {
    add("closed line count " + std::to_string(closed.size()) + " differs from required " +
        std::to_string(expected));
  }

  UnionFind uf;
  for (const Bus& b : inst.buses) uf.find(b.id);
  bool cycle = false;
  for (int id : closed) {
    const Line& l = *lines.at(id);
    if (!uf.unite(l.from_bus, l.to_bus)) {
      if (!cycle) add("closing line " + std::to_string(id) + " creates a cycle");
      cycle = true;
    }
  }

  std::map<int, int> substations_in_component;
  for (const Substation& s : inst.substations) substations_in_component[uf.find(s.bus)]++;
  for (const auto& [root, count] : substations_in_component) {
    if (count > 1) {
      add("component containing bus " + std::to_string(root) + " holds " + std::to_string(count) +
          " substations");
    }
  }
  for (const Bus& b : inst.buses) {
    if (!substations_in_component.count(uf.find(b.id))) {
      add("bus " + std::to_string(b.id) + " is not connected to any substation");
    }
  }

  report.radial = report.violations.empty();
  return report;
}

std::set<int> base_closed_set(const NetworkInstance& inst) {
  std::set<int> closed;
  for (const Line& l : inst.lines) {
    if (l.normally_closed) closed.insert(l.id);
  }
  return closed;
}

std::vector<std::set<int>> enumerate_radial_topologies(const NetworkInstance& inst,
                                                       int max_switchable) {
  std::vector<int> switchable;
  std::set<int> fixed_closed;
  for (const Line& l : inst.lines) {
    if (l.switchable) {
      switchable.push_back(l.id);
    } else {
      fixed_closed.insert(l.id);
    }
  }
  std::sort(switchable.begin(), switchable.end());
  if (static_cast<int>(switchable.size()) > max_switchable) {
    throw std::invalid_argument("enumerate_radial_topologies: " +
                                std::to_string(switchable.size()) +
                                " switchable lines exceeds the cap of " +
                                std::to_string(max_switchable));
  }

  std::vector<std::set<int>> result;
  const std::size_t k = switchable.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    std::set<int> closed = fixed_closed;
    for (std::size_t i = 0; i < k; ++i) {
      if (mask & (std::uint64_t{1} << i)) closed.insert(switchable[i]);
    }
    if (is_radial(inst, closed)) result.push_back(std::move(closed));
  }
  // std::set's operator< compares element sequences lexicographically, which
  // is exactly the documented ordering of the full closed-id sequence.
  std::sort(result.begin(), result.end());
  return result;
}

HourlyPatternTable screen_topologies_by_hour(const NetworkInstance& inst, bool ders,
                                             int max_switchable) {
  HourlyPatternTable table;
  table.closed_sets = enumerate_radial_topologies(inst, max_switchable);
  const int nb = static_cast<int>(inst.buses.size());

  std::vector<double> flex(nb, 0.0);  // hour-independent part
  std::vector<std::vector<const PvUnit*>> pv_list(nb);
  if (ders) {
    for (const Generator& g : inst.generators) flex[inst.bus_index(g.bus)] += g.p_max;
    for (const BessUnit& u : inst.bess_units) {
      flex[inst.bus_index(u.bus)] += u.max_discharge_mw();
    }
    for (const PvUnit& u : inst.pv_units) pv_list[inst.bus_index(u.bus)].push_back(&u);
  }

  for (const std::set<int>& closed : table.closed_sets) {
    std::vector<int> sw;
    std::vector<std::vector<std::pair<const Line*, int>>> adj(nb);  // (line, neighbor index)
    for (const Line& l : inst.lines) {
      if (!closed.count(l.id)) continue;
      if (l.switchable) sw.push_back(l.id);
      const int a = inst.bus_index(l.from_bus);
      const int b = inst.bus_index(l.to_bus);
      adj[a].push_back({&l, b});
      adj[b].push_back({&l, a});
    }

    std::vector<char> ok(static_cast<std::size_t>(inst.horizon), 1);
    for (int t = 1; t <= inst.horizon; ++t) {
      bool pass = true;
      std::vector<char> seen(nb, 0);
      for (const Substation& s : inst.substations) {
        if (!pass) break;
        const int root = inst.bus_index(s.bus);
        // iterative post-order: net[v] = (demand - flex) below v, inclusive
        std::vector<double> net(nb, 0.0);
        std::vector<std::pair<int, const Line*>> order;  // (bus, line to parent)
        std::vector<std::pair<int, const Line*>> stack{{root, nullptr}};
        seen[root] = 1;
        while (!stack.empty()) {
          auto [v, via] = stack.back();
          stack.pop_back();
          order.push_back({v, via});
          double f = flex[v];
          for (const PvUnit* u : pv_list[v]) f += u->availability_profile[t - 1];
          net[v] = inst.load_mw(inst.buses[v].id, t) + inst.ev_demand_mw(inst.buses[v].id, t) - f;
          for (const auto& [l, w] : adj[v]) {
            if (seen[w]) continue;
            seen[w] = 1;
            stack.push_back({w, l});
          }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
          const auto& [v, via] = *it;
          if (!via) continue;
          if (net[v] > via->rating + 1e-9) {
            pass = false;
            break;
          }
          const int parent = inst.bus_index(via->from_bus) == v ? inst.bus_index(via->to_bus)
                                                                : inst.bus_index(via->from_bus);
          net[parent] += net[v];
        }
        if (pass && net[root] > s.import_cap + 1e-9) pass = false;
      }
      ok[t - 1] = pass ? 1 : 0;
    }
    std::sort(sw.begin(), sw.end());
    table.sw_closed.push_back(std::move(sw));
    table.hour_ok.push_back(std::move(ok));
  }
  return table;
}

}  // namespace gridflex
