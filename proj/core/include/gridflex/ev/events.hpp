// Charging-event extraction from metered series: maximal runs of slots at or
// above a power threshold, kept when long enough, with the run's energy
// integrated as metered (household base load and all).
#pragma once

#include <vector>

#include "gridflex/ev/corpus.hpp"

namespace gridflex {

struct ExtractionConfig {
  double power_threshold_kw = 3.0;
  double min_duration_min = 30.0;
};

struct ChargingEvent {
  int meter = 0;
  double start_minute = 0.0;  // offset from series start
  double duration_min = 0.0;
  double energy_kwh = 0.0;
  double mean_power_kw = 0.0;
  EvClass ev_class = EvClass::Low;
};

// band edges (0, 3.7], (3.7, 11], (11, inf) in kW
EvClass classify_power_kw(double kw);

std::vector<ChargingEvent> extract_events(const MeterSeries& series,
                                          const ExtractionConfig& cfg);
std::vector<ChargingEvent> extract_events(const SyntheticCorpus& corpus,
                                          const ExtractionConfig& cfg);

}  // namespace gridflex
