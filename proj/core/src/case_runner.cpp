#include "gridflex/case_runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "gridflex/bnb.hpp"
#include "gridflex/simplex.hpp"
#include "gridflex/topology.hpp"

namespace gridflex {
namespace {

class WallTimer {
 public:
  WallTimer() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    const std::chrono::duration<double, std::milli> d = std::chrono::steady_clock::now() - start_;
    return d.count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

CaseResult finish_with_schedule(const NetworkInstance& inst, const CaseConfig& cfg,
                                const SolverConfig& scfg, CaseResult res,
                                DispatchSchedule schedule) {
  res.schedule = std::move(schedule);
  res.cost = res.schedule.total_cost;
  res.verification = verify_schedule(inst, cfg, res.schedule, scfg.bess_binaries);
  if (!res.verification.ok()) {
    res.status = CaseStatus::Error;
    for (const VerificationCheck& c : res.verification.checks) {
      if (!c.passed) {
        res.message = "schedule failed verification: " + c.name +
                      (c.detail.empty() ? "" : " (" + c.detail + ")");
        break;
      }
    }
  }
  return res;
}

// Copies a one-hour schedule into slot k of a full-horizon one. Battery
// fields stay empty: every per-hour caller refuses coupled instances.
void merge_hour_into(const NetworkInstance& inst, const DispatchSchedule& hour_sched, int k,
                     DispatchSchedule& full) {
  auto copy_into = [&](const std::map<int, std::vector<double>>& src,
                       std::map<int, std::vector<double>>& dst) {
    for (const auto& [id, vals] : src) {
      auto [it, fresh] = dst.try_emplace(id, std::vector<double>(inst.horizon, 0.0));
      (void)fresh;
      it->second[k] = vals[0];
    }
  };
  copy_into(hour_sched.sub_import_mw, full.sub_import_mw);
  copy_into(hour_sched.gen_mw, full.gen_mw);
  copy_into(hour_sched.pv_curtail_mw, full.pv_curtail_mw);
  copy_into(hour_sched.line_flow_mw, full.line_flow_mw);
  copy_into(hour_sched.bus_angle_rad, full.bus_angle_rad);
  for (const auto& [id, closed] : hour_sched.line_closed) {
    auto [it, fresh] = full.line_closed.try_emplace(id, std::vector<char>(inst.horizon, 0));
    (void)fresh;
    it->second[k] = closed[0];
  }
}

// Search hooks for a switching model, joint or single-hour: reject and steer
// non-radial integral points, prefer fewer and lower-numbered closed switches
// on cost ties, and repair fractional points into screened radial proposals.
// The lambdas hold references, so the model and id lists must outlive them.
BnbCallbacks make_switching_callbacks(const ModelBuild& mb,
                                      const std::vector<int>& switchable_ids,
                                      const std::set<int>& always_closed,
                                      std::shared_ptr<const HourlyPatternTable> repair) {
  const int t_begin = mb.first_hour;
  const int t_end = mb.first_hour + mb.horizon;  // exclusive

  BnbCallbacks callbacks;
  callbacks.incumbent_filter = [&, t_begin, t_end](const std::vector<double>& x,
                                                   const std::vector<double>& lb,
                                                   const std::vector<double>& ub, int* suggest) {
    for (int t = t_begin; t < t_end; ++t) {
      std::set<int> closed = always_closed;
      for (int id : switchable_ids) {
        if (x[mb.line_switch(id, t)] > 0.5) closed.insert(id);
      }
      if (is_radial(*mb.instance, closed)) continue;
      for (int id : switchable_ids) {
        const int j = mb.line_switch(id, t);
        if (lb[j] < ub[j]) {
          *suggest = j;
          break;
        }
      }
      return false;
    }
    return true;
  };
  callbacks.tie_break_key = [&, t_begin, t_end](const std::vector<double>& x) {
    std::vector<int> key;
    key.reserve(static_cast<std::size_t>(mb.horizon) * switchable_ids.size());
    for (int t = t_begin; t < t_end; ++t) {
      for (int id : switchable_ids) {
        if (x[mb.line_switch(id, t)] > 0.5) key.push_back(id);
      }
    }
    return key;
  };
  if (repair) {
    // Branch one whole hour at a time: one child per screened pattern still
    // compatible with the node, preferred by relaxation weight. The weight
    // table is exhaustive for radial hours, so the children partition the
    // node's integral completions and an hour with no fit prunes it.
    callbacks.custom_branch =
        [&, repair, t_begin, t_end](
            const std::vector<double>& x, const std::vector<double>& lb,
            const std::vector<double>& ub)
        -> std::optional<std::vector<std::vector<BranchPin>>> {
      const std::size_t m = repair->sw_closed.size();
      for (int t = t_begin; t < t_end; ++t) {
        bool pinned = true;
        for (int id : switchable_ids) {
          const int j = mb.line_switch(id, t);
          if (lb[j] < ub[j]) {
            pinned = false;
            break;
          }
        }
        if (pinned) continue;
        std::vector<std::pair<double, std::size_t>> order;
        for (std::size_t i = 0; i < m; ++i) {
          if (!repair->hour_ok[i][t - 1]) continue;
          const std::vector<int>& closed = repair->sw_closed[i];
          bool fits = true;
          double w = 0.0;
          for (int id : switchable_ids) {
            const int j = mb.line_switch(id, t);
            const bool on = std::binary_search(closed.begin(), closed.end(), id);
            if ((on && ub[j] < 0.5) || (!on && lb[j] > 0.5)) {
              fits = false;
              break;
            }
            if (on) w += x[j];
          }
          if (fits) order.push_back({-w, i});
        }
        std::sort(order.begin(), order.end());
        std::vector<std::vector<BranchPin>> kids;
        kids.reserve(order.size());
        for (const auto& [neg_w, i] : order) {
          const std::vector<int>& closed = repair->sw_closed[i];
          std::vector<BranchPin> pins;
          pins.reserve(switchable_ids.size());
          for (int id : switchable_ids) {
            const int j = mb.line_switch(id, t);
            const double v =
                std::binary_search(closed.begin(), closed.end(), id) ? 1.0 : 0.0;
            pins.push_back({j, v, v});
          }
          kids.push_back(std::move(pins));
        }
        return kids;
      }
      return std::nullopt;  // every hour pinned; leftover binaries branch plainly
    };
    callbacks.incumbent_heuristic = [&, repair, t_begin, t_end](const std::vector<double>& x,
                                                                std::vector<double>& hlb,
                                                                std::vector<double>& hub) {
      // per hour, pin the screened topology whose closed switches carry
      // the most relaxation weight; ties keep the first, so the pick is
      // deterministic in the enumeration order
      const std::size_t m = repair->sw_closed.size();
      for (int t = t_begin; t < t_end; ++t) {
        std::size_t best = m;
        double best_w = -1.0;
        for (std::size_t i = 0; i < m; ++i) {
          if (!repair->hour_ok[i][t - 1]) continue;
          double w = 0.0;
          for (int id : repair->sw_closed[i]) w += x[mb.line_switch(id, t)];
          if (w > best_w + 1e-12) {
            best_w = w;
            best = i;
          }
        }
        if (best == m) return false;  // no screened candidate this hour
        const std::vector<int>& closed = repair->sw_closed[best];
        for (int id : switchable_ids) {
          const int j = mb.line_switch(id, t);
          const double v = std::binary_search(closed.begin(), closed.end(), id) ? 1.0 : 0.0;
          hlb[j] = hub[j] = v;
        }
      }
      return true;
    };
  }
  return callbacks;
}

// Builds the repair table when the switch count is enumerable; the search
// still works without it, just with a later first incumbent.
std::shared_ptr<const HourlyPatternTable> maybe_build_repair(const NetworkInstance& inst,
                                                             const CaseConfig& cfg,
                                                             const SolverConfig& scfg,
                                                             std::size_t switch_count) {
  if (switch_count > static_cast<std::size_t>(scfg.enumeration_cap)) return nullptr;
  return std::make_shared<const HourlyPatternTable>(
      screen_topologies_by_hour(inst, cfg.ders_enabled, scfg.enumeration_cap));
}

// Hour-by-hour exact solve for switching cases without battery coupling:
// the model is block separable over hours, so the day's optimum is the sum
// of the per-hour optima, and each hour gets its own small search tree. The
// joint tree wastes effort re-proving every hour's gap along each branch.
CaseResult solve_switching_by_hours(const NetworkInstance& inst, const CaseConfig& cfg,
                                    const SolverConfig& scfg) {
  WallTimer timer;
  CaseResult res;

  std::vector<int> switchable_ids;
  std::set<int> always_closed;
  for (const Line& l : inst.lines) {
    if (l.switchable) {
      switchable_ids.push_back(l.id);
    } else {
      always_closed.insert(l.id);
    }
  }
  std::sort(switchable_ids.begin(), switchable_ids.end());
  const std::shared_ptr<const HourlyPatternTable> repair =
      maybe_build_repair(inst, cfg, scfg, switchable_ids.size());

  DispatchSchedule full;
  full.horizon = inst.horizon;
  full.first_hour = 1;
  double total_cost = 0.0;

  SolverConfig sub = scfg;  // node, iteration, and time budgets span the day
  for (int t = 1; t <= inst.horizon; ++t) {
    const ModelBuild mb = build_case_hour_model(inst, cfg, scfg, t);
    const BnbCallbacks callbacks =
        make_switching_callbacks(mb, switchable_ids, always_closed, repair);
    sub.node_limit = scfg.node_limit - res.stats.nodes;
    sub.iteration_limit = scfg.iteration_limit - res.stats.lp_iterations;
    if (scfg.time_limit_s > 0.0) {
      sub.time_limit_s = std::max(1e-3, scfg.time_limit_s - timer.ms() / 1000.0);
    }
    const BnbResult bnb = branch_and_bound(mb.problem, sub, callbacks);
    res.stats.nodes += bnb.nodes;
    res.stats.lp_iterations += bnb.lp_iterations;
    if (bnb.status == BnbStatus::Optimal) {
      merge_hour_into(inst, mb.extract(bnb.x), t - 1, full);
      total_cost += bnb.objective;
      continue;
    }
    res.message = "hour " + std::to_string(t) + ": " + bnb.message;
    if (bnb.status == BnbStatus::Infeasible) {
      res.status = CaseStatus::Infeasible;
      res.best_bound = kInf;
    } else {
      res.status = bnb.status == BnbStatus::LimitReached ? CaseStatus::LimitReached
                                                         : CaseStatus::Error;
      // hours cost at least zero, so solved hours plus this bound undershoots
      res.best_bound = total_cost + std::max(0.0, bnb.best_bound);
    }
    res.stats.wall_ms = timer.ms();
    return res;
  }

  full.total_cost = total_cost;
  res.status = CaseStatus::Feasible;
  res.best_bound = total_cost;
  res = finish_with_schedule(inst, cfg, scfg, std::move(res), std::move(full));
  res.stats.wall_ms = timer.ms();
  return res;
}

}  // namespace

const char* to_string(CaseStatus s) {
  switch (s) {
    case CaseStatus::Feasible: return "feasible";
    case CaseStatus::Infeasible: return "infeasible";
    case CaseStatus::LimitReached: return "limit_reached";
    case CaseStatus::Error: return "error";
  }
  return "unknown";
}

CaseResult solve_case(const NetworkInstance& inst, const CaseConfig& cfg,
                      const SolverConfig& scfg) {
  if (scfg.hours > 0 && scfg.hours != inst.horizon) {
    SolverConfig sub = scfg;
    sub.hours = 0;
    return solve_case(with_horizon(inst, scfg.hours), cfg, sub);
  }
  if (scfg.solver == SolverBackend::Enumeration) {
    return solve_by_enumeration(inst, cfg, scfg);
  }
  if (cfg.reconfiguration_enabled && !(cfg.ders_enabled && !inst.bess_units.empty())) {
    return solve_switching_by_hours(inst, cfg, scfg);
  }

  WallTimer timer;
  CaseResult res;
  const ModelBuild mb = build_case_model(inst, cfg, scfg);

  std::vector<int> switchable_ids;
  std::set<int> always_closed;
  for (const Line& l : inst.lines) {
    if (l.switchable) {
      switchable_ids.push_back(l.id);
    } else {
      always_closed.insert(l.id);
    }
  }
  std::sort(switchable_ids.begin(), switchable_ids.end());

  BnbCallbacks callbacks;
  if (mb.reconfiguration) {
    callbacks = make_switching_callbacks(
        mb, switchable_ids, always_closed,
        maybe_build_repair(inst, cfg, scfg, switchable_ids.size()));
  }
  if (mb.horizon > 1) {
    // fix the earliest hours first: their contribution to the bound turns
    // exact once integral, and later hours never reopen them
    callbacks.branch_priority.resize(mb.problem.vars.size());
    for (std::size_t j = 0; j < mb.problem.vars.size(); ++j) {
      callbacks.branch_priority[j] = mb.problem.vars[j].hour;
    }
  }
  if (mb.reconfiguration && mb.ders && !inst.bess_units.empty()) {
    // Batteries keep the day joint. Seed the incumbent with the topology of
    // the battery-less day, solved hour by hour: dropping units only removes
    // flexibility, so that trajectory stays feasible here, and the proposal
    // side solve prices it with the batteries back in.
    NetworkInstance bare = inst;
    bare.bess_units.clear();
    const CaseResult day = solve_switching_by_hours(bare, cfg, scfg);
    res.stats.nodes += day.stats.nodes;
    res.stats.lp_iterations += day.stats.lp_iterations;
    if (day.status == CaseStatus::Feasible) {
      auto pins = std::make_shared<std::vector<std::pair<int, double>>>();
      for (int t = 1; t <= mb.horizon; ++t) {
        for (int id : switchable_ids) {
          const double v = day.schedule.line_closed.at(id)[t - 1] ? 1.0 : 0.0;
          pins->push_back({mb.line_switch(id, t), v});
        }
      }
      const IncumbentHeuristic base = callbacks.incumbent_heuristic;
      auto used = std::make_shared<bool>(false);
      callbacks.incumbent_heuristic = [base, pins, used](const std::vector<double>& x,
                                                         std::vector<double>& hlb,
                                                         std::vector<double>& hub) {
        if (!*used) {
          *used = true;
          for (const auto& [j, v] : *pins) hlb[j] = hub[j] = v;
          return true;
        }
        return base ? base(x, hlb, hub) : false;
      };
    }
  }
  if (mb.ders && !inst.bess_units.empty() && scfg.bess_binaries == BessBinaryMode::Exact) {
    callbacks.incumbent_polish = [&](std::vector<double>& x, const std::vector<double>& lb,
                                     const std::vector<double>& ub) {
      // indicator variables cost nothing, so whenever charge and discharge
      // are not simultaneously active they can be pinned to the exact 0/1
      // the activity implies, clamped into the node's bounds
      constexpr double kActive = 1e-9;
      for (const BessUnit& u : inst.bess_units) {
        for (int t = 1; t <= mb.horizon; ++t) {
          const double chg = x[mb.bess_charge(u.id, t)];
          const double dchg = x[mb.bess_discharge(u.id, t)];
          if (chg > kActive && dchg > kActive) continue;
          const int ic = mb.bess_charge_on(u.id, t);
          const int id = mb.bess_discharge_on(u.id, t);
          const double tc = chg > kActive ? 1.0 : 0.0;
          const double td = dchg > kActive ? 1.0 : 0.0;
          x[ic] = std::min(ub[ic], std::max(lb[ic], tc));
          x[id] = std::min(ub[id], std::max(lb[id], td));
        }
      }
    };
  }

  const BnbResult bnb = branch_and_bound(mb.problem, scfg, callbacks);
  res.stats.nodes += bnb.nodes;
  res.stats.lp_iterations += bnb.lp_iterations;
  res.best_bound = bnb.best_bound;
  res.message = bnb.message;

  switch (bnb.status) {
    case BnbStatus::Optimal: res.status = CaseStatus::Feasible; break;
    case BnbStatus::Infeasible: res.status = CaseStatus::Infeasible; break;
    case BnbStatus::LimitReached: res.status = CaseStatus::LimitReached; break;
    case BnbStatus::Error: res.status = CaseStatus::Error; break;
  }
  if (bnb.has_solution && res.status == CaseStatus::Feasible) {
    res = finish_with_schedule(inst, cfg, scfg, std::move(res), mb.extract(bnb.x));
  }
  res.stats.wall_ms = timer.ms();
  return res;
}

CaseResult solve_by_enumeration(const NetworkInstance& inst, const CaseConfig& cfg,
                                const SolverConfig& scfg) {
  if (scfg.hours > 0 && scfg.hours != inst.horizon) {
    SolverConfig sub = scfg;
    sub.hours = 0;
    return solve_by_enumeration(with_horizon(inst, scfg.hours), cfg, sub);
  }
  if (cfg.ders_enabled && !inst.bess_units.empty()) {
    throw std::invalid_argument(
        "enumeration oracle: batteries couple the hours, so per-hour enumeration does not "
        "apply");
  }

  WallTimer timer;
  CaseResult res;

  std::vector<std::set<int>> topologies;
  if (cfg.reconfiguration_enabled) {
    topologies = enumerate_radial_topologies(inst, scfg.enumeration_cap);
  } else {
    std::set<int> base = base_closed_set(inst);
    const RadialityReport rr = check_radial(inst, base);
    if (!rr.radial) {
      throw std::invalid_argument("enumeration oracle: normally-closed topology is not radial: " +
                                  rr.violations.front());
    }
    topologies.push_back(std::move(base));
  }
  if (topologies.empty()) {
    res.status = CaseStatus::Infeasible;
    res.message = "no radial topology exists";
    res.stats.wall_ms = timer.ms();
    return res;
  }

  DispatchSchedule full;
  full.horizon = inst.horizon;
  full.first_hour = 1;
  double total_cost = 0.0;

  for (int t = 1; t <= inst.horizon; ++t) {
    bool found = false;
    double best_cost = kInf;
    DispatchSchedule best_sched;
    for (const std::set<int>& closed : topologies) {
      const ModelBuild mb = build_fixed_hour_model(inst, cfg.ders_enabled, scfg, closed, t);
      const LpSolution sol = solve_lp(mb.problem, scfg);
      res.stats.lp_iterations += sol.iterations;
      if (sol.status == LpStatus::Infeasible) continue;
      if (sol.status != LpStatus::Optimal) {
        res.status = CaseStatus::Error;
        res.message = "oracle hour " + std::to_string(t) + ": relaxation returned " +
                      std::string(to_string(sol.status));
        res.stats.wall_ms = timer.ms();
        return res;
      }
      found = true;
      // strict improvement only: on (near) ties the earlier topology in
      // closed-set order stays, making the pick lexicographically smallest
      if (!std::isfinite(best_cost) ||
          sol.objective < best_cost - 1e-9 * (1.0 + std::abs(best_cost))) {
        best_cost = sol.objective;
        best_sched = mb.extract(sol.x);
      }
    }
    if (!found) {
      res.status = CaseStatus::Infeasible;
      res.message = "hour " + std::to_string(t) + " is infeasible under every radial topology";
      res.stats.wall_ms = timer.ms();
      return res;
    }
    merge_hour_into(inst, best_sched, t - 1, full);
    total_cost += best_cost;
  }

  full.total_cost = total_cost;
  res.status = CaseStatus::Feasible;
  res.best_bound = total_cost;
  res = finish_with_schedule(inst, cfg, scfg, std::move(res), std::move(full));
  res.stats.wall_ms = timer.ms();
  return res;
}

}  // namespace gridflex
