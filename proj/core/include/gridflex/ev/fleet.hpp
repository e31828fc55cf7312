// Fleet demand synthesis: fit per-class density models to extracted charging
// events, then roll a fleet of EVs through simulated days and average the
// hourly energy they draw into a mean-day MW profile.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "gridflex/ev/events.hpp"
#include "gridflex/ev/kde.hpp"
#include "gridflex/network.hpp"

namespace gridflex {

struct FleetConfig {
  int num_evs = 1500;
  int days = 30;
  double participation = 0.9;  // chance an EV charges on a given day
  double share_low = 0.25;
  double share_normal = 0.55;
  double share_high = 0.20;
};

// per-class start/duration/energy densities; classes with no events are absent
class FleetModel {
 public:
  struct ClassModel {
    std::unique_ptr<GaussianKde> start_minute;  // wrapped on the clock
    std::unique_ptr<GaussianKde> duration_min;  // positive
    std::unique_ptr<GaussianKde> energy_kwh;    // positive
    std::size_t events = 0;
  };

  bool has(EvClass c) const { return classes_[static_cast<int>(c)].events > 0; }
  const ClassModel& of(EvClass c) const { return classes_[static_cast<int>(c)]; }
  ClassModel& of(EvClass c) { return classes_[static_cast<int>(c)]; }
  std::size_t total_events() const;

 private:
  std::array<ClassModel, 3> classes_;
};

// throws std::invalid_argument when events is empty
FleetModel fit_fleet_model(const std::vector<ChargingEvent>& events);

// mean-day hourly MW drawn by the whole fleet; hour buckets wrap over
// midnight so every simulated session's energy is conserved
HourlyProfile simulate_fleet_profile(const FleetModel& model, const FleetConfig& cfg,
                                     std::uint64_t seed);

// splits a fleet profile over buses by nonnegative weights (sum within 1e-9
// of 1), producing the demand block a network instance consumes
EvDemandProfile distribute_profile(const HourlyProfile& fleet_mw,
                                   const std::map<int, double>& bus_weights);

// weights file: JSON object { "bus_id": weight, ... }
std::map<int, double> load_bus_weights(const std::string& json_text);

}  // namespace gridflex
