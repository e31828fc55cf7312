#include "gridflex/results_io.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include <json.hpp>

namespace gridflex {
namespace {

using nlohmann::json;

// non-finite doubles have no JSON representation; emit null
json num_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

json manifest_json(const RunManifest& m) {
  json j;
  j["instance"] = m.instance;
  j["instance_path"] = m.instance_path;
  j["config"] = m.config;
  j["penetration"] = m.penetration;
  j["seed"] = m.seed;
  j["hours"] = m.hours;
  j["solver"] = m.solver;
  j["bess_binaries"] = m.bess_binaries;
  j["ev_profile"] = m.ev_profile;
  return j;
}

json stats_json(const SolveStats& s) {
  json j;
  j["nodes"] = s.nodes;
  j["lp_iterations"] = s.lp_iterations;
  j["wall_ms"] = s.wall_ms;
  return j;
}

json verification_json(const ScheduleVerification& v) {
  json checks = json::array();
  for (const VerificationCheck& c : v.checks) {
    json jc;
    jc["name"] = c.name;
    jc["passed"] = c.passed;
    jc["warning"] = c.warning;
    jc["worst"] = num_or_null(c.worst);
    jc["detail"] = c.detail;
    checks.push_back(std::move(jc));
  }
  json j;
  j["ok"] = v.ok();
  j["checks"] = std::move(checks);
  return j;
}

json series_map_json(const std::map<int, std::vector<double>>& m) {
  json j = json::object();
  for (const auto& [id, vals] : m) j[std::to_string(id)] = vals;
  return j;
}

json schedule_json(const DispatchSchedule& s) {
  json j;
  j["first_hour"] = s.first_hour;
  j["horizon"] = s.horizon;
  j["total_cost_usd"] = s.total_cost;
  j["substation_import_mw"] = series_map_json(s.sub_import_mw);
  j["generator_mw"] = series_map_json(s.gen_mw);
  j["pv_curtail_mw"] = series_map_json(s.pv_curtail_mw);
  j["bess_charge_mw"] = series_map_json(s.bess_charge_mw);
  j["bess_discharge_mw"] = series_map_json(s.bess_discharge_mw);
  j["bess_soc_mwh"] = series_map_json(s.bess_soc_mwh);
  j["line_flow_mw"] = series_map_json(s.line_flow_mw);
  j["bus_angle_rad"] = series_map_json(s.bus_angle_rad);
  json closed = json::object();
  for (const auto& [id, vals] : s.line_closed) {
    json arr = json::array();
    for (char v : vals) arr.push_back(v ? 1 : 0);
    closed[std::to_string(id)] = std::move(arr);
  }
  j["line_closed"] = std::move(closed);
  return j;
}

// hours (1-based, absolute) in which each line is open; always-closed lines
// are omitted, which keeps sweep artifacts readable
json open_hours_json(const DispatchSchedule& s) {
  json j = json::object();
  for (const auto& [id, vals] : s.line_closed) {
    json hours = json::array();
    for (std::size_t k = 0; k < vals.size(); ++k) {
      if (!vals[k]) hours.push_back(s.first_hour + static_cast<int>(k));
    }
    if (!hours.empty()) j[std::to_string(id)] = std::move(hours);
  }
  return j;
}

json case_core_json(const CaseResult& r) {
  json j;
  j["status"] = to_string(r.status);
  j["cost_usd"] = r.status == CaseStatus::Feasible ? num_or_null(r.cost) : json(nullptr);
  j["best_bound_usd"] = num_or_null(r.best_bound);
  j["message"] = r.message;
  j["stats"] = stats_json(r.stats);
  return j;
}

void scrub_wall_clock(json& j) {
  if (j.is_object()) {
    j.erase("wall_ms");
    for (auto& [key, value] : j.items()) scrub_wall_clock(value);
  } else if (j.is_array()) {
    for (json& v : j) scrub_wall_clock(v);
  }
}

}  // namespace

std::string results_to_json(const RunManifest& manifest, const CaseResult& result) {
  json root = case_core_json(result);
  root["manifest"] = manifest_json(manifest);
  if (result.status == CaseStatus::Feasible) {
    root["schedule"] = schedule_json(result.schedule);
  }
  root["verification"] = verification_json(result.verification);
  return root.dump(2) + "\n";
}

std::string sweep_to_json(const RunManifest& manifest, const SweepPlan& plan,
                          const SweepResult& sweep) {
  json m = manifest_json(manifest);
  m.erase("config");
  m.erase("penetration");
  m["configs"] = plan.configs;
  m["penetrations"] = plan.penetrations;

  json cells = json::array();
  for (const SweepCell& c : sweep.cells) {
    json jc = case_core_json(c.result);
    jc["config"] = c.config;
    jc["penetration"] = c.penetration;
    if (!c.result.verification.checks.empty()) {
      jc["verification_ok"] = c.result.verification.ok();
    }
    if (c.result.status == CaseStatus::Feasible) {
      jc["open_hours"] = open_hours_json(c.result.schedule);
    }
    cells.push_back(std::move(jc));
  }

  json frontier = json::object();
  for (const std::string& name : plan.configs) {
    const double f = feasibility_frontier(sweep.cells, name);
    frontier[name] = f < 0.0 ? json(nullptr) : json(f);
  }

  json root;
  root["manifest"] = std::move(m);
  root["cells"] = std::move(cells);
  root["frontier"] = std::move(frontier);
  root["ordering_violations"] = sweep.ordering_violations;
  root["ok"] = sweep.ok();
  return root.dump(2) + "\n";
}

std::string sweep_to_csv(const SweepResult& sweep) {
  std::string out = "config,penetration,status,cost_usd,best_bound_usd,nodes,lp_iterations,wall_ms\n";
  char buf[256];
  for (const SweepCell& c : sweep.cells) {
    std::string cost;
    if (c.result.status == CaseStatus::Feasible) {
      std::snprintf(buf, sizeof(buf), "%.10g", c.result.cost);
      cost = buf;
    }
    std::string bound;
    if (std::isfinite(c.result.best_bound)) {
      std::snprintf(buf, sizeof(buf), "%.10g", c.result.best_bound);
      bound = buf;
    }
    std::snprintf(buf, sizeof(buf), "%s,%g,%s,%s,%s,%ld,%ld,%.3f\n", c.config.c_str(),
                  c.penetration, to_string(c.result.status), cost.c_str(), bound.c_str(),
                  c.result.stats.nodes, c.result.stats.lp_iterations, c.result.stats.wall_ms);
    out += buf;
  }
  return out;
}

bool results_equivalent(const std::string& json_a, const std::string& json_b) {
  json a = json::parse(json_a, nullptr, false);
  json b = json::parse(json_b, nullptr, false);
  if (a.is_discarded() || b.is_discarded()) return false;
  scrub_wall_clock(a);
  scrub_wall_clock(b);
  return a == b;
}

}  // namespace gridflex
