#include "gridflex/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gridflex/topology.hpp"

namespace gridflex {
namespace {

std::string hour_tag(const char* name, int id, int t) {
  std::string s(name);
  s += "[";
  s += std::to_string(id);
  s += ",t";
  s += std::to_string(t);
  s += "]";
  return s;
}

struct BuildSpec {
  bool reconfig = false;
  bool ders = false;
  std::set<int> closed;  // ignored when reconfig
  int hour = 0;          // 0 = full horizon
};

ModelBuild build(const NetworkInstance& inst, const BuildSpec& spec, const SolverConfig& scfg) {
  {
    const ValidationReport vr = validate_instance(inst);
    if (!vr.ok()) {
      throw std::invalid_argument("model build: instance invalid: " + vr.violations.front());
    }
  }

  ModelBuild mb;
  mb.instance = &inst;
  mb.reconfiguration = spec.reconfig;
  mb.ders = spec.ders;
  mb.fixed_closed = spec.closed;

  std::vector<int> hours;
  if (spec.hour > 0) {
    if (spec.hour > inst.horizon) {
      throw std::invalid_argument("model build: hour " + std::to_string(spec.hour) +
                                  " beyond horizon " + std::to_string(inst.horizon));
    }
    hours.push_back(spec.hour);
  } else {
    for (int t = 1; t <= inst.horizon; ++t) hours.push_back(t);
  }
  mb.horizon = static_cast<int>(hours.size());
  mb.first_hour = hours.front();

  const bool with_bess = spec.ders && !inst.bess_units.empty();
  if (with_bess && spec.hour > 0) {
    throw std::invalid_argument(
        "model build: single-hour models cannot carry batteries (state of charge couples "
        "hours)");
  }

  // every angle fits in [-A, A]: walking any open path multiplies at most
  // all ratings by their reactances
  double angle_limit = 0.0;
  for (const Line& l : inst.lines) angle_limit += l.rating * l.reactance_x;
  mb.angle_limit = angle_limit;
  for (const Line& l : inst.lines) {
    if (l.switchable) {
      const double m = scfg.big_m_override > 0.0
                           ? scfg.big_m_override
                           : l.rating + 2.0 * angle_limit / l.reactance_x;
      mb.line_big_m[l.id] = m;
      mb.problem.big_m = std::max(mb.problem.big_m, m);
    }
  }

  const int reference_bus =
      std::min_element(inst.buses.begin(), inst.buses.end(),
                       [](const Bus& a, const Bus& b) { return a.id < b.id; })
          ->id;

  MilpProblem& p = mb.problem;
  auto add = [&p](VarKind kind, int entity, int t, double lb, double ub, bool integral) {
    VariableDef v;
    v.kind = kind;
    v.entity = entity;
    v.hour = t;
    v.lb = lb;
    v.ub = ub;
    v.integral = integral;
    return p.add_var(std::move(v));
  };

  for (const Bus& b : inst.buses) {
    for (int t : hours) {
      const bool ref = b.id == reference_bus;
      mb.angle_[{b.id, t}] =
          add(VarKind::Angle, b.id, t, ref ? 0.0 : -angle_limit, ref ? 0.0 : angle_limit, false);
    }
  }
  for (const Line& l : inst.lines) {
    for (int t : hours) {
      double lo = -l.rating, hi = l.rating;
      if (!spec.reconfig && !spec.closed.count(l.id)) lo = hi = 0.0;  // open
      mb.flow_[{l.id, t}] = add(VarKind::Flow, l.id, t, lo, hi, false);
    }
  }
  for (const Substation& s : inst.substations) {
    for (int t : hours) {
      const int j = add(VarKind::SubImport, s.id, t, 0.0, s.import_cap, false);
      mb.sub_[{s.id, t}] = j;
      p.objective[j] = s.price_profile[t - 1];
    }
  }
  if (spec.ders) {
    for (const Generator& g : inst.generators) {
      for (int t : hours) {
        const int j = add(VarKind::Gen, g.id, t, g.p_min, g.p_max, false);
        mb.gen_[{g.id, t}] = j;
        p.objective[j] = g.cost_profile[t - 1];
      }
    }
    for (const PvUnit& u : inst.pv_units) {
      for (int t : hours) {
        mb.curt_[{u.id, t}] =
            add(VarKind::PvCurt, u.id, t, 0.0, u.availability_profile[t - 1], false);
      }
    }
    for (const BessUnit& u : inst.bess_units) {
      for (int t : hours) {
        mb.chg_[{u.id, t}] = add(VarKind::Charge, u.id, t, 0.0, u.max_charge_mw(), false);
      }
    }
    for (const BessUnit& u : inst.bess_units) {
      for (int t : hours) {
        mb.dchg_[{u.id, t}] = add(VarKind::Discharge, u.id, t, 0.0, u.max_discharge_mw(), false);
      }
    }
    for (const BessUnit& u : inst.bess_units) {
      for (int t : hours) {
        double lo = u.soc_min * u.e_cap, hi = u.soc_max * u.e_cap;
        if (t == inst.horizon) lo = hi = u.e_init;  // end the day where it began
        mb.soc_[{u.id, t}] = add(VarKind::Soc, u.id, t, lo, hi, false);
      }
    }
  }
  if (spec.reconfig) {
    for (const Line& l : inst.lines) {
      if (!l.switchable) continue;
      for (int t : hours) {
        mb.sw_[{l.id, t}] = add(VarKind::Switch, l.id, t, 0.0, 1.0, true);
      }
    }
  }
  if (with_bess) {
    const bool exact = scfg.bess_binaries == BessBinaryMode::Exact;
    for (const BessUnit& u : inst.bess_units) {
      for (int t : hours) {
        mb.con_[{u.id, t}] = add(VarKind::ChargeOn, u.id, t, 0.0, 1.0, exact);
      }
    }
    for (const BessUnit& u : inst.bess_units) {
      for (int t : hours) {
        mb.don_[{u.id, t}] = add(VarKind::DischargeOn, u.id, t, 0.0, 1.0, exact);
      }
    }
  }

  // flow/angle coupling
  for (const Line& l : inst.lines) {
    const double inv_x = 1.0 / l.reactance_x;
    for (int t : hours) {
      const int f = mb.flow_.at({l.id, t});
      const int a_from = mb.angle_.at({l.from_bus, t});
      const int a_to = mb.angle_.at({l.to_bus, t});
      if (spec.reconfig && l.switchable) {
        const int j = mb.sw_.at({l.id, t});
        const double m = mb.line_big_m.at(l.id);
        LinearConstraint up;
        up.terms = {{f, 1.0}, {a_from, -inv_x}, {a_to, inv_x}, {j, m}};
        up.rel = Relation::Le;
        up.rhs = m;
        up.tag = hour_tag("bigm_up", l.id, t);
        p.add_constraint(std::move(up));
        LinearConstraint dn;
        dn.terms = {{f, 1.0}, {a_from, -inv_x}, {a_to, inv_x}, {j, -m}};
        dn.rel = Relation::Ge;
        dn.rhs = -m;
        dn.tag = hour_tag("bigm_dn", l.id, t);
        p.add_constraint(std::move(dn));
        LinearConstraint cap_up;
        cap_up.terms = {{f, 1.0}, {j, -l.rating}};
        cap_up.rel = Relation::Le;
        cap_up.rhs = 0.0;
        cap_up.tag = hour_tag("cap_up", l.id, t);
        p.add_constraint(std::move(cap_up));
        LinearConstraint cap_dn;
        cap_dn.terms = {{f, 1.0}, {j, l.rating}};
        cap_dn.rel = Relation::Ge;
        cap_dn.rhs = 0.0;
        cap_dn.tag = hour_tag("cap_dn", l.id, t);
        p.add_constraint(std::move(cap_dn));
      } else if (spec.reconfig || spec.closed.count(l.id)) {
        LinearConstraint eq;
        eq.terms = {{f, 1.0}, {a_from, -inv_x}, {a_to, inv_x}};
        eq.rel = Relation::Eq;
        eq.rhs = 0.0;
        eq.tag = hour_tag("dcflow", l.id, t);
        p.add_constraint(std::move(eq));
      }
      // fixed open lines carry their [0,0] flow window and no row
    }
  }

  // nodal balance
  for (const Bus& b : inst.buses) {
    for (int t : hours) {
      LinearConstraint bal;
      bal.rel = Relation::Eq;
      double rhs = inst.load_mw(b.id, t) + inst.ev_demand_mw(b.id, t);
      for (const Line& l : inst.lines) {
        if (l.to_bus == b.id) bal.terms.push_back({mb.flow_.at({l.id, t}), 1.0});
        if (l.from_bus == b.id) bal.terms.push_back({mb.flow_.at({l.id, t}), -1.0});
      }
      for (const Substation& s : inst.substations) {
        if (s.bus == b.id) bal.terms.push_back({mb.sub_.at({s.id, t}), 1.0});
      }
      if (spec.ders) {
        for (const Generator& g : inst.generators) {
          if (g.bus == b.id) bal.terms.push_back({mb.gen_.at({g.id, t}), 1.0});
        }
        for (const PvUnit& u : inst.pv_units) {
          if (u.bus == b.id) {
            bal.terms.push_back({mb.curt_.at({u.id, t}), -1.0});
            rhs -= u.availability_profile[t - 1];
          }
        }
        for (const BessUnit& u : inst.bess_units) {
          if (u.bus == b.id) {
            bal.terms.push_back({mb.dchg_.at({u.id, t}), 1.0});
            bal.terms.push_back({mb.chg_.at({u.id, t}), -1.0});
          }
        }
      }
      bal.rhs = rhs;
      bal.tag = hour_tag("balance", b.id, t);
      p.add_constraint(std::move(bal));
    }
  }

  // radiality of the switch pattern, hour by hour
  int switch_count = 0;
  for (const Line& l : inst.lines) {
    if (l.switchable) ++switch_count;
  }
  if (spec.reconfig && switch_count <= scfg.enumeration_cap) {
    // Few enough switches to enumerate: tie each hour's pattern to a convex
    // mixture of the radial topologies that pass that hour's capacity
    // screen. Their hull is the tightest linear relaxation of the pattern
    // alone, so the forest count and the cycle and path cuts come for free,
    // and any integral pattern is one of the enumerated topologies. The
    // screen only discards patterns that no dispatch can make feasible, so
    // no solution is lost.
    const HourlyPatternTable table =
        screen_topologies_by_hour(inst, spec.ders, scfg.enumeration_cap);
    const std::size_t np = table.sw_closed.size();
    for (int t : hours) {
      std::vector<int> weight_var(np, -1);
      LinearConstraint sum;
      sum.rel = Relation::Eq;
      sum.rhs = 1.0;
      for (std::size_t pi = 0; pi < np; ++pi) {
        if (!table.hour_ok[pi][t - 1]) continue;
        weight_var[pi] = add(VarKind::PatternWeight, static_cast<int>(pi), t, 0.0, 1.0, false);
        sum.terms.push_back({weight_var[pi], 1.0});
      }
      // an hour no screened topology can carry leaves an empty sum, which
      // reads 0 = 1: correctly infeasible
      sum.tag = hour_tag("mix_sum", 0, t);
      p.add_constraint(std::move(sum));
      for (const Line& l : inst.lines) {
        if (!l.switchable) continue;
        LinearConstraint link;
        link.rel = Relation::Eq;
        link.rhs = 0.0;
        link.terms.push_back({mb.sw_.at({l.id, t}), -1.0});
        for (std::size_t pi = 0; pi < np; ++pi) {
          if (weight_var[pi] < 0) continue;
          if (std::binary_search(table.sw_closed[pi].begin(), table.sw_closed[pi].end(), l.id)) {
            link.terms.push_back({weight_var[pi], 1.0});
          }
        }
        link.tag = hour_tag("mix", l.id, t);
        p.add_constraint(std::move(link));
      }
    }
  } else if (spec.reconfig) {
    // too many switches to enumerate: per-hour spanning forest count plus
    // the cut families below
    int fixed_closed_count = 0;
    for (const Line& l : inst.lines) {
      if (!l.switchable) ++fixed_closed_count;
    }
    const int required = static_cast<int>(inst.buses.size() - inst.substations.size());
    for (int t : hours) {
      LinearConstraint count;
      count.rel = Relation::Eq;
      count.rhs = static_cast<double>(required - fixed_closed_count);
      for (const Line& l : inst.lines) {
        if (l.switchable) count.terms.push_back({mb.sw_.at({l.id, t}), 1.0});
      }
      count.tag = "count[t" + std::to_string(t) + "]";
      p.add_constraint(std::move(count));
    }

    // The count row alone admits a cycle plus a detached piece, and the
    // relaxation exploits that freely: a cycle carries flow both ways and
    // dodges line limits at no cost. Cut those points off. Contract the
    // always-closed lines; any switchable subset forming a simple cycle, or
    // a simple path joining two substations, must keep at least one line
    // open. Subsets stay enumerable because switchable counts are small.
    const int nb = static_cast<int>(inst.buses.size());
    std::vector<int> comp(nb);
    for (int i = 0; i < nb; ++i) comp[i] = i;
    auto find = [&comp](int a) {
      while (comp[a] != a) {
        comp[a] = comp[comp[a]];
        a = comp[a];
      }
      return a;
    };
    for (const Line& l : inst.lines) {
      if (l.switchable) continue;
      const int ra = find(inst.bus_index(l.from_bus));
      const int rb = find(inst.bus_index(l.to_bus));
      if (ra != rb) comp[std::max(ra, rb)] = std::min(ra, rb);
    }
    std::set<int> sub_comp;
    for (const Substation& s : inst.substations) sub_comp.insert(find(inst.bus_index(s.bus)));

    struct SwEdge {
      int id, a, b;
    };
    std::vector<SwEdge> sw;
    for (const Line& l : inst.lines) {
      if (!l.switchable) continue;
      sw.push_back({l.id, find(inst.bus_index(l.from_bus)), find(inst.bus_index(l.to_bus))});
    }
    const int k = static_cast<int>(sw.size());
    int cycle_cuts = 0, path_cuts = 0;
    for (unsigned mask = 1; k <= 16 && mask < (1u << k); ++mask) {
      std::map<int, int> deg;
      std::map<int, int> sub_parent;  // subset union-find over touched comps
      int edges = 0;
      for (int e = 0; e < k; ++e) {
        if (!(mask >> e & 1)) continue;
        ++edges;
        deg[sw[e].a] += 1;
        deg[sw[e].b] += 1;  // a self-loop counts twice, which is intended
        sub_parent.try_emplace(sw[e].a, sw[e].a);
        sub_parent.try_emplace(sw[e].b, sw[e].b);
      }
      auto sfind = [&sub_parent](int a) {
        while (sub_parent[a] != a) {
          sub_parent[a] = sub_parent[sub_parent[a]];
          a = sub_parent[a];
        }
        return a;
      };
      for (int e = 0; e < k; ++e) {
        if (!(mask >> e & 1)) continue;
        const int ra = sfind(sw[e].a);
        const int rb = sfind(sw[e].b);
        if (ra != rb) sub_parent[std::max(ra, rb)] = std::min(ra, rb);
      }
      int roots = 0;
      for (const auto& [v, par] : sub_parent) {
        if (sfind(v) == v) ++roots;
      }
      if (roots != 1) continue;  // disconnected subsets never cut anything

      const int vertices = static_cast<int>(deg.size());
      bool all_two = true;
      std::vector<int> ends;
      for (const auto& [v, d] : deg) {
        if (d == 1) ends.push_back(v);
        if (d != 2) all_two = false;
      }
      const bool cycle = all_two && edges == vertices;
      bool sub_path = false;
      if (ends.size() == 2 && edges == vertices - 1) {
        sub_path = sub_comp.count(ends[0]) && sub_comp.count(ends[1]);
        for (const auto& [v, d] : deg) {
          // a path through a third substation is dominated by its prefix
          if (d == 2 && sub_comp.count(v)) sub_path = false;
        }
      }
      if (!cycle && !sub_path) continue;

      const int idx = cycle ? cycle_cuts++ : path_cuts++;
      for (int t : hours) {
        LinearConstraint cut;
        cut.rel = Relation::Le;
        cut.rhs = static_cast<double>(edges - 1);
        for (int e = 0; e < k; ++e) {
          if (mask >> e & 1) cut.terms.push_back({mb.sw_.at({sw[e].id, t}), 1.0});
        }
        cut.tag = hour_tag(cycle ? "cycle_cut" : "path_cut", idx, t);
        p.add_constraint(std::move(cut));
      }
    }
  }

  // battery coupling
  if (with_bess) {
    for (const BessUnit& u : inst.bess_units) {
      const double pc = u.max_charge_mw();
      const double pd = u.max_discharge_mw();
      for (int t : hours) {
        LinearConstraint soc;
        soc.rel = Relation::Eq;
        soc.terms = {{mb.soc_.at({u.id, t}), 1.0},
                     {mb.chg_.at({u.id, t}), -u.eta_chg},
                     {mb.dchg_.at({u.id, t}), 1.0 / u.eta_dchg}};
        if (t == 1) {
          soc.rhs = u.e_init;
        } else {
          soc.terms.push_back({mb.soc_.at({u.id, t - 1}), -1.0});
          soc.rhs = 0.0;
        }
        soc.tag = hour_tag("soc", u.id, t);
        p.add_constraint(std::move(soc));

        LinearConstraint excl;
        excl.rel = Relation::Le;
        excl.rhs = 1.0;
        excl.terms = {{mb.con_.at({u.id, t}), 1.0}, {mb.don_.at({u.id, t}), 1.0}};
        excl.tag = hour_tag("excl", u.id, t);
        p.add_constraint(std::move(excl));

        LinearConstraint chg_cap;
        chg_cap.rel = Relation::Le;
        chg_cap.rhs = 0.0;
        chg_cap.terms = {{mb.chg_.at({u.id, t}), 1.0}, {mb.con_.at({u.id, t}), -pc}};
        chg_cap.tag = hour_tag("chgcap", u.id, t);
        p.add_constraint(std::move(chg_cap));

        LinearConstraint dchg_cap;
        dchg_cap.rel = Relation::Le;
        dchg_cap.rhs = 0.0;
        dchg_cap.terms = {{mb.dchg_.at({u.id, t}), 1.0}, {mb.don_.at({u.id, t}), -pd}};
        dchg_cap.tag = hour_tag("dchgcap", u.id, t);
        p.add_constraint(std::move(dchg_cap));
      }
    }
  }

  p.check_consistent();
  return mb;
}

}  // namespace

DispatchSchedule ModelBuild::extract(const std::vector<double>& x) const {
  DispatchSchedule s;
  s.horizon = horizon;
  s.first_hour = first_hour;
  const NetworkInstance& inst = *instance;

  auto fill = [&](const Locator& loc, std::map<int, std::vector<double>>& dst) {
    for (const auto& [key, var] : loc) {
      auto [it, fresh] = dst.try_emplace(key.first, std::vector<double>(horizon, 0.0));
      (void)fresh;
      it->second[key.second - first_hour] = x[var];
    }
  };
  fill(angle_, s.bus_angle_rad);
  fill(flow_, s.line_flow_mw);
  fill(sub_, s.sub_import_mw);
  fill(gen_, s.gen_mw);
  fill(curt_, s.pv_curtail_mw);
  fill(chg_, s.bess_charge_mw);
  fill(dchg_, s.bess_discharge_mw);
  fill(soc_, s.bess_soc_mwh);

  for (const Line& l : inst.lines) {
    std::vector<char> closed(horizon, 0);
    for (int k = 0; k < horizon; ++k) {
      const int t = first_hour + k;
      if (reconfiguration && l.switchable) {
        closed[k] = x[sw_.at({l.id, t})] > 0.5 ? 1 : 0;
      } else if (reconfiguration) {
        closed[k] = 1;  // non-switchable lines stay closed
      } else {
        closed[k] = fixed_closed.count(l.id) ? 1 : 0;
      }
    }
    s.line_closed[l.id] = std::move(closed);
  }

  double cost = 0.0;
  for (std::size_t j = 0; j < problem.vars.size(); ++j) {
    if (problem.objective[j] != 0.0) cost += problem.objective[j] * x[j];
  }
  s.total_cost = cost;
  return s;
}

ModelBuild build_case_model(const NetworkInstance& inst, const CaseConfig& cfg,
                            const SolverConfig& scfg) {
  BuildSpec spec;
  spec.reconfig = cfg.reconfiguration_enabled;
  spec.ders = cfg.ders_enabled;
  if (!spec.reconfig) {
    spec.closed = base_closed_set(inst);
    const RadialityReport rr = check_radial(inst, spec.closed);
    if (!rr.radial) {
      throw std::invalid_argument("model build: normally-closed topology is not radial: " +
                                  rr.violations.front());
    }
  }
  return build(inst, spec, scfg);
}

ModelBuild build_fixed_model(const NetworkInstance& inst, bool ders, const SolverConfig& scfg,
                             const std::set<int>& closed) {
  BuildSpec spec;
  spec.ders = ders;
  spec.closed = closed;
  return build(inst, spec, scfg);
}

ModelBuild build_fixed_hour_model(const NetworkInstance& inst, bool ders,
                                  const SolverConfig& scfg, const std::set<int>& closed,
                                  int hour) {
  BuildSpec spec;
  spec.ders = ders;
  spec.closed = closed;
  spec.hour = hour;
  return build(inst, spec, scfg);
}

ModelBuild build_case_hour_model(const NetworkInstance& inst, const CaseConfig& cfg,
                                 const SolverConfig& scfg, int hour) {
  BuildSpec spec;
  spec.reconfig = cfg.reconfiguration_enabled;
  spec.ders = cfg.ders_enabled;
  spec.hour = hour;
  if (!spec.reconfig) {
    spec.closed = base_closed_set(inst);
    const RadialityReport rr = check_radial(inst, spec.closed);
    if (!rr.radial) {
      throw std::invalid_argument("model build: normally-closed topology is not radial: " +
                                  rr.violations.front());
    }
  }
  return build(inst, spec, scfg);
}

}  // namespace gridflex
