#include "gridflex/instance_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gridflex {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

const json& member(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.is_object()) fail(where, "expected a JSON object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(where, "missing field '" + key + "'");
  return *it;
}

double num(const json& obj, const std::string& where, const std::string& key) {
  const json& v = member(obj, where, key);
  if (!v.is_number()) fail(where, "field '" + key + "' must be a number");
  return v.get<double>();
}

double num_or(const json& obj, const std::string& where, const std::string& key, double fallback) {
  if (!obj.is_object()) fail(where, "expected a JSON object");
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) fail(where, "field '" + key + "' must be a number");
  return it->get<double>();
}

int integer(const json& obj, const std::string& where, const std::string& key) {
  const json& v = member(obj, where, key);
  if (!v.is_number_integer()) fail(where, "field '" + key + "' must be an integer");
  return v.get<int>();
}

bool boolean_or(const json& obj, const std::string& where, const std::string& key, bool fallback) {
  if (!obj.is_object()) fail(where, "expected a JSON object");
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) fail(where, "field '" + key + "' must be a boolean");
  return it->get<bool>();
}

std::string text_or(const json& obj, const std::string& where, const std::string& key,
                    const std::string& fallback) {
  if (!obj.is_object()) fail(where, "expected a JSON object");
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_string()) fail(where, "field '" + key + "' must be a string");
  return it->get<std::string>();
}

HourlyProfile profile(const json& obj, const std::string& where, const std::string& key) {
  const json& v = member(obj, where, key);
  if (!v.is_array() || v.size() != kHoursPerDay) {
    fail(where, "field '" + key + "' must be an array of " + std::to_string(kHoursPerDay) +
                    " numbers");
  }
  HourlyProfile p{};
  for (std::size_t t = 0; t < kHoursPerDay; ++t) {
    if (!v[t].is_number()) fail(where, "field '" + key + "' must contain only numbers");
    p[t] = v[t].get<double>();
  }
  return p;
}

json profile_json(const HourlyProfile& p) {
  json arr = json::array();
  for (double v : p) arr.push_back(v);
  return arr;
}

}  // namespace

NetworkInstance load_instance(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("instance is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("instance: top level must be a JSON object");

  NetworkInstance inst;
  inst.name = text_or(root, "instance", "name", "");
  if (root.contains("horizon")) inst.horizon = integer(root, "instance", "horizon");

  const json& buses = member(root, "instance", "buses");
  if (!buses.is_array()) fail("instance", "field 'buses' must be an array");
  for (std::size_t i = 0; i < buses.size(); ++i) {
    const std::string where = "buses[" + std::to_string(i) + "]";
    Bus b;
    b.id = integer(buses[i], where, "id");
    b.name = text_or(buses[i], where, "name", "");
    b.load_profile = profile(buses[i], where, "load_profile");
    inst.buses.push_back(std::move(b));
  }

  const json& lines = member(root, "instance", "lines");
  if (!lines.is_array()) fail("instance", "field 'lines' must be an array");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string where = "lines[" + std::to_string(i) + "]";
    Line l;
    l.id = integer(lines[i], where, "id");
    l.from_bus = integer(lines[i], where, "from_bus");
    l.to_bus = integer(lines[i], where, "to_bus");
    l.reactance_x = num(lines[i], where, "reactance_x");
    l.rating = num(lines[i], where, "rating");
    l.switchable = boolean_or(lines[i], where, "switchable", false);
    l.normally_closed = boolean_or(lines[i], where, "normally_closed", true);
    inst.lines.push_back(std::move(l));
  }

  const json& subs = member(root, "instance", "substations");
  if (!subs.is_array()) fail("instance", "field 'substations' must be an array");
  for (std::size_t i = 0; i < subs.size(); ++i) {
    const std::string where = "substations[" + std::to_string(i) + "]";
    Substation s;
    s.id = integer(subs[i], where, "id");
    s.bus = integer(subs[i], where, "bus");
    s.price_profile = profile(subs[i], where, "price_profile");
    s.import_cap = num(subs[i], where, "import_cap");
    inst.substations.push_back(std::move(s));
  }

  if (root.contains("generators")) {
    const json& gens = root["generators"];
    if (!gens.is_array()) fail("instance", "field 'generators' must be an array");
    for (std::size_t i = 0; i < gens.size(); ++i) {
      const std::string where = "generators[" + std::to_string(i) + "]";
      Generator g;
      g.id = integer(gens[i], where, "id");
      g.bus = integer(gens[i], where, "bus");
      g.p_min = num(gens[i], where, "p_min");
      g.p_max = num(gens[i], where, "p_max");
      g.cost_profile = profile(gens[i], where, "cost_profile");
      inst.generators.push_back(std::move(g));
    }
  }

  if (root.contains("pv_units")) {
    const json& pvs = root["pv_units"];
    if (!pvs.is_array()) fail("instance", "field 'pv_units' must be an array");
    for (std::size_t i = 0; i < pvs.size(); ++i) {
      const std::string where = "pv_units[" + std::to_string(i) + "]";
      PvUnit u;
      u.id = integer(pvs[i], where, "id");
      u.bus = integer(pvs[i], where, "bus");
      u.availability_profile = profile(pvs[i], where, "availability_profile");
      inst.pv_units.push_back(std::move(u));
    }
  }

  if (root.contains("bess_units")) {
    const json& units = root["bess_units"];
    if (!units.is_array()) fail("instance", "field 'bess_units' must be an array");
    for (std::size_t i = 0; i < units.size(); ++i) {
      const std::string where = "bess_units[" + std::to_string(i) + "]";
      BessUnit u;
      u.id = integer(units[i], where, "id");
      u.bus = integer(units[i], where, "bus");
      u.e_cap = num(units[i], where, "e_cap");
      u.soc_min = num(units[i], where, "soc_min");
      u.soc_max = num(units[i], where, "soc_max");
      u.t_chg = num(units[i], where, "t_chg");
      u.t_dchg = num(units[i], where, "t_dchg");
      u.eta_chg = num(units[i], where, "eta_chg");
      u.eta_dchg = num(units[i], where, "eta_dchg");
      u.e_init = num_or(units[i], where, "e_init", 0.5 * (u.soc_min + u.soc_max) * u.e_cap);
      inst.bess_units.push_back(std::move(u));
    }
  }

  if (root.contains("ev_demand")) {
    const json& ev = root["ev_demand"];
    if (!ev.is_object()) fail("instance", "field 'ev_demand' must map bus id to a 24-entry array");
    for (auto it = ev.begin(); it != ev.end(); ++it) {
      int bus_id = 0;
      try {
        std::size_t pos = 0;
        bus_id = std::stoi(it.key(), &pos);
        if (pos != it.key().size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        fail("instance", "ev_demand key '" + it.key() + "' is not a bus id");
      }
      json holder;
      holder["p"] = it.value();
      inst.ev_demand[bus_id] = profile(holder, "ev_demand[" + it.key() + "]", "p");
    }
  }

  return inst;
}

NetworkInstance load_instance_file(const std::string& path) {
  return load_instance(read_text_file(path));
}

std::string emit_instance(const NetworkInstance& inst) {
  json root;
  root["name"] = inst.name;
  root["horizon"] = inst.horizon;

  json buses = json::array();
  for (const Bus& b : inst.buses) {
    json j;
    j["id"] = b.id;
    if (!b.name.empty()) j["name"] = b.name;
    j["load_profile"] = profile_json(b.load_profile);
    buses.push_back(std::move(j));
  }
  root["buses"] = std::move(buses);

  json lines = json::array();
  for (const Line& l : inst.lines) {
    json j;
    j["id"] = l.id;
    j["from_bus"] = l.from_bus;
    j["to_bus"] = l.to_bus;
    j["reactance_x"] = l.reactance_x;
    j["rating"] = l.rating;
    j["switchable"] = l.switchable;
    j["normally_closed"] = l.normally_closed;
    lines.push_back(std::move(j));
  }
  root["lines"] = std::move(lines);

  json subs = json::array();
  for (const Substation& s : inst.substations) {
    json j;
    j["id"] = s.id;
    j["bus"] = s.bus;
    j["price_profile"] = profile_json(s.price_profile);
    j["import_cap"] = s.import_cap;
    subs.push_back(std::move(j));
  }
  root["substations"] = std::move(subs);

  if (!inst.generators.empty()) {
    json gens = json::array();
    for (const Generator& g : inst.generators) {
      json j;
      j["id"] = g.id;
      j["bus"] = g.bus;
      j["p_min"] = g.p_min;
      j["p_max"] = g.p_max;
      j["cost_profile"] = profile_json(g.cost_profile);
      gens.push_back(std::move(j));
    }
    root["generators"] = std::move(gens);
  }

  if (!inst.pv_units.empty()) {
    json pvs = json::array();
    for (const PvUnit& u : inst.pv_units) {
      json j;
      j["id"] = u.id;
      j["bus"] = u.bus;
      j["availability_profile"] = profile_json(u.availability_profile);
      pvs.push_back(std::move(j));
    }
    root["pv_units"] = std::move(pvs);
  }

  if (!inst.bess_units.empty()) {
    json units = json::array();
    for (const BessUnit& u : inst.bess_units) {
      json j;
      j["id"] = u.id;
      j["bus"] = u.bus;
      j["e_cap"] = u.e_cap;
      j["soc_min"] = u.soc_min;
      j["soc_max"] = u.soc_max;
      j["t_chg"] = u.t_chg;
      j["t_dchg"] = u.t_dchg;
      j["eta_chg"] = u.eta_chg;
      j["eta_dchg"] = u.eta_dchg;
      j["e_init"] = u.e_init;
      units.push_back(std::move(j));
    }
    root["bess_units"] = std::move(units);
  }

  if (!inst.ev_demand.empty()) {
    json ev = json::object();
    for (const auto& [bus_id, p] : inst.ev_demand) {
      ev[std::to_string(bus_id)] = profile_json(p);
    }
    root["ev_demand"] = std::move(ev);
  }

  return root.dump(2) + "\n";
}

EvDemandProfile load_ev_profile_csv(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("ev profile: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "bus_id,hour,demand_mw") {
    throw ParseError("ev profile: expected header 'bus_id,hour,demand_mw', got '" + line + "'");
  }

  EvDemandProfile profile;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    int bus_id = 0;
    int hour = 0;
    double demand = 0.0;
    char trail = '\0';
    int got = std::sscanf(line.c_str(), "%d,%d,%lf %c", &bus_id, &hour, &demand, &trail);
    if (got != 3) {
      throw ParseError("ev profile line " + std::to_string(line_no) +
                       ": expected 'bus_id,hour,demand_mw', got '" + line + "'");
    }
    if (hour < 1 || hour > static_cast<int>(kHoursPerDay)) {
      throw ParseError("ev profile line " + std::to_string(line_no) + ": hour " +
                       std::to_string(hour) + " outside 1..24");
    }
    if (!(demand >= 0.0) || !std::isfinite(demand)) {
      throw ParseError("ev profile line " + std::to_string(line_no) +
                       ": demand_mw must be finite and nonnegative");
    }
    auto [it, inserted] = profile.demand_mw.try_emplace(bus_id, HourlyProfile{});
    (void)inserted;
    it->second[hour - 1] += demand;
  }
  return profile;
}

EvDemandProfile load_ev_profile_file(const std::string& path) {
  return load_ev_profile_csv(read_text_file(path));
}

std::string emit_ev_profile_csv(const EvDemandProfile& profile) {
  std::ostringstream out;
  out << "bus_id,hour,demand_mw\n";
  char buf[64];
  for (const auto& [bus_id, p] : profile.demand_mw) {
    for (std::size_t t = 0; t < kHoursPerDay; ++t) {
      std::snprintf(buf, sizeof(buf), "%.17g", p[t]);
      out << bus_id << ',' << (t + 1) << ',' << buf << '\n';
    }
  }
  return out.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw FileError("cannot read '" + path + "'");
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FileError("cannot write '" + tmp + "'");
    out << content;
    out.flush();
    if (!out) throw FileError("cannot write '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw FileError("cannot move '" + tmp + "' to '" + path + "'");
  }
}

}  // namespace gridflex
