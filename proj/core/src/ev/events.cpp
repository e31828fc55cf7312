#include "gridflex/ev/events.hpp"

namespace gridflex {

EvClass classify_power_kw(double kw) {
  if (kw <= 3.7) return EvClass::Low;
  if (kw <= 11.0) return EvClass::Normal;
  return EvClass::High;
}

std::vector<ChargingEvent> extract_events(const MeterSeries& series,
                                          const ExtractionConfig& cfg) {
  std::vector<ChargingEvent> events;
  const int n = static_cast<int>(series.kw.size());
  int s = 0;
  while (s < n) {
    if (series.kw[s] < cfg.power_threshold_kw) {
      ++s;
      continue;
    }
    int e = s;
    while (e + 1 < n && series.kw[e + 1] >= cfg.power_threshold_kw) ++e;
    const double duration = (e - s + 1) * kSlotMinutes;
    if (duration >= cfg.min_duration_min) {
      double energy = 0.0;
      for (int k = s; k <= e; ++k) energy += series.kw[k] * (kSlotMinutes / 60.0);
      ChargingEvent ev;
      ev.meter = series.meter;
      ev.start_minute = s * kSlotMinutes;
      ev.duration_min = duration;
      ev.energy_kwh = energy;
      ev.mean_power_kw = energy / (duration / 60.0);
      ev.ev_class = classify_power_kw(ev.mean_power_kw);
      events.push_back(ev);
    }
    s = e + 1;
  }
  return events;
}

std::vector<ChargingEvent> extract_events(const SyntheticCorpus& corpus,
                                          const ExtractionConfig& cfg) {
  std::vector<ChargingEvent> events;
  for (const MeterSeries& s : corpus.series) {
    const std::vector<ChargingEvent> found = extract_events(s, cfg);
    events.insert(events.end(), found.begin(), found.end());
  }
  return events;
}

}  // namespace gridflex
