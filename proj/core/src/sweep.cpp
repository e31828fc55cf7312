#include "gridflex/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <future>
#include <map>
#include <set>
#include <stdexcept>

#include "gridflex/instance_io.hpp"
#include "gridflex/results_io.hpp"

namespace gridflex {
namespace {

// capability pairs (weaker, stronger): the stronger configuration can always
// replicate the weaker one's schedule, so it is never infeasible where the
// weaker is feasible and never costs more
constexpr std::pair<const char*, const char*> kCapabilityPairs[] = {
    {"sdn", "sdntr"},
    {"sdn", "sdn-der"},
    {"sdntr", "sdntr-der"},
    {"sdn-der", "sdntr-der"},
};

std::string penetration_label(double p) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", p);
  return buf;
}

bool settled(const SweepCell& c) {
  return c.result.status == CaseStatus::Feasible || c.result.status == CaseStatus::Infeasible;
}

}  // namespace

bool SweepResult::ok() const {
  if (!ordering_violations.empty()) return false;
  for (const SweepCell& c : cells) {
    if (!settled(c)) return false;
  }
  return true;
}

std::vector<std::string> audit_sweep_ordering(const std::vector<SweepCell>& cells) {
  std::vector<std::string> violations;

  // per config, cells sorted by penetration
  std::map<std::string, std::vector<const SweepCell*>> by_config;
  std::set<double> penetrations;
  for (const SweepCell& c : cells) {
    by_config[c.config].push_back(&c);
    penetrations.insert(c.penetration);
  }
  for (auto& [name, list] : by_config) {
    std::sort(list.begin(), list.end(), [](const SweepCell* a, const SweepCell* b) {
      return a->penetration < b->penetration;
    });
  }

  // EV demand only adds load, so once a config goes infeasible it must stay so
  for (const auto& [name, list] : by_config) {
    double first_infeasible = -1.0;
    for (const SweepCell* c : list) {
      if (!settled(*c)) continue;
      if (c->result.status == CaseStatus::Infeasible) {
        if (first_infeasible < 0.0) first_infeasible = c->penetration;
      } else if (first_infeasible >= 0.0) {
        violations.push_back("config " + name + ": infeasible at penetration " +
                             penetration_label(first_infeasible) + " but feasible at " +
                             penetration_label(c->penetration));
      }
    }
  }

  auto find_cell = [&](const std::string& name, double p) -> const SweepCell* {
    auto it = by_config.find(name);
    if (it == by_config.end()) return nullptr;
    for (const SweepCell* c : it->second) {
      if (c->penetration == p) return c;
    }
    return nullptr;
  };

  for (double p : penetrations) {
    for (const auto& [weak_name, strong_name] : kCapabilityPairs) {
      const SweepCell* weak = find_cell(weak_name, p);
      const SweepCell* strong = find_cell(strong_name, p);
      if (weak == nullptr || strong == nullptr) continue;
      if (!settled(*weak) || !settled(*strong)) continue;
      if (weak->result.status != CaseStatus::Feasible) continue;
      if (strong->result.status == CaseStatus::Infeasible) {
        violations.push_back(std::string("penetration ") + penetration_label(p) + ": " +
                             weak_name + " is feasible but " + strong_name + " is not");
        continue;
      }
      const double wc = weak->result.cost;
      const double sc = strong->result.cost;
      if (sc > wc + 1e-6 * (1.0 + std::abs(wc))) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "penetration %s: %s costs %.6f which exceeds %s at %.6f",
                      penetration_label(p).c_str(), strong_name, sc, weak_name, wc);
        violations.push_back(buf);
      }
    }
  }
  return violations;
}

double feasibility_frontier(const std::vector<SweepCell>& cells, const std::string& config) {
  double frontier = -1.0;
  for (const SweepCell& c : cells) {
    if (c.config != config || c.result.status != CaseStatus::Feasible) continue;
    frontier = std::max(frontier, c.penetration);
  }
  return frontier;
}

SweepResult run_sweep(const NetworkInstance& base, const EvDemandProfile& profile,
                      const SweepPlan& plan) {
  if (plan.configs.empty() || plan.penetrations.empty()) {
    throw std::invalid_argument("sweep plan has no cells");
  }
  for (const std::string& name : plan.configs) {
    case_config_from_name(name);  // throws on an unknown name
  }
  for (double p : plan.penetrations) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("sweep penetrations must be finite and >= 0");
    }
  }

  SweepResult out;
  out.cells.resize(plan.configs.size() * plan.penetrations.size());
  for (std::size_t ci = 0; ci < plan.configs.size(); ++ci) {
    for (std::size_t pi = 0; pi < plan.penetrations.size(); ++pi) {
      SweepCell& cell = out.cells[ci * plan.penetrations.size() + pi];
      cell.config = plan.configs[ci];
      cell.penetration = plan.penetrations[pi];
    }
  }

  // cells are independent solves on private instance copies, so any worker
  // count produces identical results
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= out.cells.size()) return;
      SweepCell& cell = out.cells[i];
      try {
        CaseConfig cc = case_config_from_name(cell.config);
        cc.penetration = cell.penetration;
        const NetworkInstance inst = apply_ev_demand(base, profile, cell.penetration);
        cell.result = solve_case(inst, cc, plan.solver);
      } catch (const std::exception& e) {
        cell.result = CaseResult{};
        cell.result.status = CaseStatus::Error;
        cell.result.message = e.what();
      }
    }
  };

  const int jobs = std::max(1, plan.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::future<void>> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int j = 0; j < jobs; ++j) {
      pool.push_back(std::async(std::launch::async, worker));
    }
    for (std::future<void>& f : pool) f.get();
  }

  out.ordering_violations = audit_sweep_ordering(out.cells);

  if (!plan.artifact_dir.empty()) {
    for (const SweepCell& cell : out.cells) {
      if (settled(cell)) continue;
      RunManifest m;
      m.instance = base.name;
      m.config = cell.config;
      m.penetration = cell.penetration;
      m.hours = plan.solver.hours;
      m.solver = plan.solver.solver == SolverBackend::Enumeration ? "enum" : "bnb";
      m.bess_binaries =
          plan.solver.bess_binaries == BessBinaryMode::Relaxed ? "relaxed" : "exact";
      m.ev_profile = profile.provenance;
      std::filesystem::create_directories(plan.artifact_dir);
      const std::string path = plan.artifact_dir + "/cell_" + cell.config + "_p" +
                               penetration_label(cell.penetration) + ".json";
      write_text_file(path, results_to_json(m, cell.result));
    }
  }
  return out;
}

}  // namespace gridflex
