#include "gridflex/verify.hpp"

#include <algorithm>
#include <cmath>

#include "gridflex/topology.hpp"

namespace gridflex {
namespace {

// pinned audit tolerances
constexpr double kBalanceTol = 1e-6;
constexpr double kFlowTol = 1e-6;
constexpr double kAngleTol = 1e-6;
constexpr double kOpenFlowTol = 1e-6;
constexpr double kBoundTol = 1e-6;
constexpr double kSocTol = 1e-9;
constexpr double kExclusivityTol = 1e-6;
constexpr double kCostTol = 1e-6;

double at(const std::map<int, std::vector<double>>& m, int id, int k) {
  auto it = m.find(id);
  if (it == m.end() || k < 0 || k >= static_cast<int>(it->second.size())) return 0.0;
  return it->second[k];
}

class CheckBuilder {
 public:
  explicit CheckBuilder(std::string name) { check_.name = std::move(name); }

  void offend(double deviation, const std::string& what) {
    if (deviation > check_.worst) check_.worst = deviation;
    if (check_.detail.empty()) check_.detail = what;
    dirty_ = true;
  }

  VerificationCheck done(bool warn_only = false) {
    check_.passed = !dirty_ || warn_only;
    check_.warning = dirty_ && warn_only;
    if (check_.warning && !check_.detail.empty()) {
      check_.detail = "tolerated in relaxed mode: " + check_.detail;
    }
    return std::move(check_);
  }

 private:
  VerificationCheck check_;
  bool dirty_ = false;
};

std::string hour_label(const char* kind, int id, int t) {
  return std::string(kind) + " " + std::to_string(id) + " at hour " + std::to_string(t);
}

}  // namespace

bool ScheduleVerification::ok() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const VerificationCheck& c) { return c.passed; });
}

const VerificationCheck* ScheduleVerification::find(const std::string& name) const {
  for (const VerificationCheck& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

ScheduleVerification verify_schedule(const NetworkInstance& inst, const CaseConfig& cfg,
                                     const DispatchSchedule& s, BessBinaryMode bess_mode) {
  ScheduleVerification out;

  auto closed_at = [&s](int line_id, int k) {
    auto it = s.line_closed.find(line_id);
    return it != s.line_closed.end() && k < static_cast<int>(it->second.size()) &&
           it->second[k] != 0;
  };

  {
    CheckBuilder c("nodal_balance");
    for (const Bus& b : inst.buses) {
      for (int k = 0; k < s.horizon; ++k) {
        const int t = s.first_hour + k;
        double injection = 0.0;
        for (const Line& l : inst.lines) {
          if (l.to_bus == b.id) injection += at(s.line_flow_mw, l.id, k);
          if (l.from_bus == b.id) injection -= at(s.line_flow_mw, l.id, k);
        }
        for (const Substation& sub : inst.substations) {
          if (sub.bus == b.id) injection += at(s.sub_import_mw, sub.id, k);
        }
        if (cfg.ders_enabled) {
          for (const Generator& g : inst.generators) {
            if (g.bus == b.id) injection += at(s.gen_mw, g.id, k);
          }
          for (const PvUnit& u : inst.pv_units) {
            if (u.bus == b.id) {
              injection += u.availability_profile[t - 1] - at(s.pv_curtail_mw, u.id, k);
            }
          }
          for (const BessUnit& u : inst.bess_units) {
            if (u.bus == b.id) {
              injection += at(s.bess_discharge_mw, u.id, k) - at(s.bess_charge_mw, u.id, k);
            }
          }
        }
        const double demand = inst.load_mw(b.id, t) + inst.ev_demand_mw(b.id, t);
        const double dev = std::abs(injection - demand);
        if (dev > kBalanceTol) c.offend(dev, hour_label("bus", b.id, t));
      }
    }
    out.checks.push_back(c.done());
  }

  {
    CheckBuilder c("flow_limits");
    for (const Line& l : inst.lines) {
      for (int k = 0; k < s.horizon; ++k) {
        const double f = std::abs(at(s.line_flow_mw, l.id, k));
        if (closed_at(l.id, k) && f > l.rating + kFlowTol) {
          c.offend(f - l.rating, hour_label("line", l.id, s.first_hour + k));
        }
      }
    }
    out.checks.push_back(c.done());
  }

  {
    CheckBuilder c("flow_angle_consistency");
    for (const Line& l : inst.lines) {
      for (int k = 0; k < s.horizon; ++k) {
        if (!closed_at(l.id, k)) continue;
        const double expected = (at(s.bus_angle_rad, l.from_bus, k) -
                                 at(s.bus_angle_rad, l.to_bus, k)) /
                                l.reactance_x;
        const double dev = std::abs(at(s.line_flow_mw, l.id, k) - expected);
        if (dev > kAngleTol) c.offend(dev, hour_label("line", l.id, s.first_hour + k));
      }
    }
    out.checks.push_back(c.done());
  }

  {
    CheckBuilder c("open_line_zero_flow");
    for (const Line& l : inst.lines) {
      for (int k = 0; k < s.horizon; ++k) {
        if (closed_at(l.id, k)) continue;
        const double f = std::abs(at(s.line_flow_mw, l.id, k));
        if (f > kOpenFlowTol) c.offend(f, hour_label("line", l.id, s.first_hour + k));
      }
    }
    out.checks.push_back(c.done());
  }

  {
    CheckBuilder c("device_bounds");
    auto window = [&c](double v, double lo, double hi, const std::string& what) {
      if (v < lo - kBoundTol) c.offend(lo - v, what);
      if (v > hi + kBoundTol) c.offend(v - hi, what);
    };
    for (const Substation& sub : inst.substations) {
      for (int k = 0; k < s.horizon; ++k) {
        window(at(s.sub_import_mw, sub.id, k), 0.0, sub.import_cap,
               hour_label("substation", sub.id, s.first_hour + k));
      }
    }
    if (cfg.ders_enabled) {
      for (const Generator& g : inst.generators) {
        for (int k = 0; k < s.horizon; ++k) {
          window(at(s.gen_mw, g.id, k), g.p_min, g.p_max,
                 hour_label("generator", g.id, s.first_hour + k));
        }
      }
      for (const PvUnit& u : inst.pv_units) {
        for (int k = 0; k < s.horizon; ++k) {
          window(at(s.pv_curtail_mw, u.id, k), 0.0,
                 u.availability_profile[s.first_hour + k - 1],
                 hour_label("pv", u.id, s.first_hour + k));
        }
      }
      for (const BessUnit& u : inst.bess_units) {
        for (int k = 0; k < s.horizon; ++k) {
          const int t = s.first_hour + k;
          window(at(s.bess_charge_mw, u.id, k), 0.0, u.max_charge_mw(),
                 hour_label("battery charge", u.id, t));
          window(at(s.bess_discharge_mw, u.id, k), 0.0, u.max_discharge_mw(),
                 hour_label("battery discharge", u.id, t));
          window(at(s.bess_soc_mwh, u.id, k), u.soc_min * u.e_cap, u.soc_max * u.e_cap,
                 hour_label("battery soc", u.id, t));
        }
      }
    }
    out.checks.push_back(c.done());
  }

  {
    CheckBuilder c("soc_replay");
    if (cfg.ders_enabled) {
      for (const BessUnit& u : inst.bess_units) {
        double energy = u.e_init;
        for (int k = 0; k < s.horizon; ++k) {
          energy += u.eta_chg * at(s.bess_charge_mw, u.id, k) -
                    at(s.bess_discharge_mw, u.id, k) / u.eta_dchg;
          const double dev = std::abs(energy - at(s.bess_soc_mwh, u.id, k));
          if (dev > kSocTol) {
            c.offend(dev, hour_label("battery", u.id, s.first_hour + k));
          }
        }
        if (s.horizon == inst.horizon && s.first_hour == 1) {
          const double dev = std::abs(energy - u.e_init);
          if (dev > kSocTol) {
            c.offend(dev, "battery " + std::to_string(u.id) + " does not end at its initial "
                          "state of charge");
          }
        }
      }
    }
    out.checks.push_back(c.done());
  }

  {
    CheckBuilder c("bess_exclusivity");
    if (cfg.ders_enabled) {
      for (const BessUnit& u : inst.bess_units) {
        for (int k = 0; k < s.horizon; ++k) {
          const double both =
              std::min(at(s.bess_charge_mw, u.id, k), at(s.bess_discharge_mw, u.id, k));
          if (both > kExclusivityTol) {
            c.offend(both, hour_label("battery", u.id, s.first_hour + k));
          }
        }
      }
    }
    out.checks.push_back(c.done(bess_mode == BessBinaryMode::Relaxed));
  }

  {
    CheckBuilder c("radiality");
    for (int k = 0; k < s.horizon; ++k) {
      const int t = s.first_hour + k;
      const RadialityReport rr = check_radial(inst, s.closed_lines(t));
      if (!rr.radial) c.offend(1.0, "hour " + std::to_string(t) + ": " + rr.violations.front());
    }
    out.checks.push_back(c.done());
  }

  {
    CheckBuilder c("cost_recompute");
    const double recomputed = s.priced_cost(inst);
    const double dev = std::abs(recomputed - s.total_cost);
    if (dev > kCostTol * (1.0 + std::abs(s.total_cost))) {
      c.offend(dev, "schedule cost disagrees with prices times dispatch");
    }
    out.checks.push_back(c.done());
  }

  return out;
}

}  // namespace gridflex
