// Distribution-network instance: buses, lines, substations, DER fleets, and
// the per-hour demand data the optimizer consumes.
#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridflex {

inline constexpr int kHoursPerDay = 24;

using HourlyProfile = std::array<double, kHoursPerDay>;

// Thrown when a document is structurally broken (missing field, wrong type,
// wrong profile length). The message names the offending field.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when an id cross-reference does not resolve (line endpoint, DER bus,
// EV profile bus).
struct ReferenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a file cannot be opened or written at all, as opposed to a file
// whose content is malformed.
struct FileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Bus {
  int id = 0;
  std::string name;
  HourlyProfile load_profile{};  // MW, hours 1..24

  bool operator==(const Bus&) const = default;
};

struct Line {
  int id = 0;
  int from_bus = 0;
  int to_bus = 0;
  double reactance_x = 0.0;  // > 0; flow = angle difference / reactance
  double rating = 0.0;       // MW, symmetric limit
  bool switchable = false;
  // Base switch state. Non-switchable lines are always closed; for switchable
  // lines this is the state used when reconfiguration is disabled.
  bool normally_closed = true;

  bool operator==(const Line&) const = default;
};

struct Substation {
  int id = 0;
  int bus = 0;
  HourlyProfile price_profile{};  // $/MWh
  double import_cap = 0.0;        // MW

  bool operator==(const Substation&) const = default;
};

struct Generator {
  int id = 0;
  int bus = 0;
  double p_min = 0.0;
  double p_max = 0.0;
  HourlyProfile cost_profile{};  // $/MWh

  bool operator==(const Generator&) const = default;
};

struct PvUnit {
  int id = 0;
  int bus = 0;
  HourlyProfile availability_profile{};  // MW available before curtailment

  bool operator==(const PvUnit&) const = default;
};

struct BessUnit {
  int id = 0;
  int bus = 0;
  double e_cap = 0.0;    // MWh
  double soc_min = 0.0;  // fraction of e_cap
  double soc_max = 1.0;  // fraction of e_cap
  double t_chg = 1.0;    // h; max charge power = e_cap / t_chg
  double t_dchg = 1.0;   // h; max discharge power = e_cap / t_dchg
  double eta_chg = 1.0;
  double eta_dchg = 1.0;
  double e_init = 0.0;  // MWh stored at the start of the horizon

  double max_charge_mw() const { return e_cap / t_chg; }
  double max_discharge_mw() const { return e_cap / t_dchg; }

  bool operator==(const BessUnit&) const = default;
};

struct NetworkInstance {
  std::string name;
  std::vector<Bus> buses;
  std::vector<Line> lines;
  std::vector<Substation> substations;
  std::vector<Generator> generators;
  std::vector<PvUnit> pv_units;
  std::vector<BessUnit> bess_units;
  // Extra EV demand in MW per bus and hour; absent bus means zero.
  std::map<int, HourlyProfile> ev_demand;
  // Number of leading hours the optimizer models (1..24).
  int horizon = kHoursPerDay;

  int bus_index(int bus_id) const;   // -1 when unknown
  int line_index(int line_id) const;

  double load_mw(int bus_id, int t) const;       // base load, t is 1-based
  double ev_demand_mw(int bus_id, int t) const;  // EV addition, t is 1-based

  bool operator==(const NetworkInstance&) const = default;
};

// Which of the four studied configurations a solve represents.
struct CaseConfig {
  bool reconfiguration_enabled = false;
  bool ders_enabled = false;
  double penetration = 0.0;  // bookkeeping: the EV scaling already applied

  bool operator==(const CaseConfig&) const = default;
};

CaseConfig case_config_from_name(const std::string& name);  // "sdn", "sdntr", ...
std::string case_config_name(const CaseConfig& c);

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Checks every invariant the types promise: profile values, bounds ordering,
// cross-references, duplicate ids, and connectivity of the full line graph.
ValidationReport validate_instance(const NetworkInstance& inst);

// EV demand shaped per bus and hour-of-day, produced by the scenario pipeline
// or read from CSV. demand_mw is the mean-day profile for penetration 1.0.
struct EvDemandProfile {
  std::map<int, HourlyProfile> demand_mw;
  std::string provenance;  // free-form: seed, generator settings
  int days_aggregated = 1;

  double total_energy_mwh() const;
};

// Returns a copy of inst whose ev_demand equals penetration * profile.
// penetration must be >= 0; profile buses must exist in the instance.
NetworkInstance apply_ev_demand(const NetworkInstance& inst,
                                const EvDemandProfile& profile,
                                double penetration);

// Returns a copy with the modeled horizon set to the first `hours` hours.
NetworkInstance with_horizon(const NetworkInstance& inst, int hours);

}  // namespace gridflex
