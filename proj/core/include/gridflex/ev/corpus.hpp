// Synthetic smart-meter corpus: 15-minute household series with charging
// sessions injected at known times, powers, and energies. The injected list
// is the ground truth that extraction is measured against.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gridflex {

inline constexpr int kSlotsPerDay = 96;     // 15-minute metering
inline constexpr double kSlotMinutes = 15.0;
inline constexpr double kMinutesPerDay = 1440.0;

enum class EvClass { Low = 0, Normal = 1, High = 2 };
const char* to_string(EvClass c);

struct CorpusConfig {
  int meters = 40;
  int days = 120;
  double event_probability = 0.6;  // one charging session per meter-day at most
  double share_low = 0.25;
  double share_normal = 0.55;
  double share_high = 0.20;
  double base_load_min_kw = 0.05;
  double base_load_max_kw = 0.35;
};

struct InjectedEvent {
  int meter = 0;
  double start_minute = 0.0;   // offset from the start of the whole series
  double duration_min = 0.0;   // realized (clipped at the series end)
  double energy_kwh = 0.0;     // realized
  double power_kw = 0.0;
  EvClass ev_class = EvClass::Low;
};

struct MeterSeries {
  int meter = 0;
  std::vector<double> kw;  // days * kSlotsPerDay samples
};

struct SyntheticCorpus {
  int days = 0;
  std::vector<MeterSeries> series;
  std::vector<InjectedEvent> injected;  // ground truth, in generation order
};

SyntheticCorpus generate_corpus(const CorpusConfig& cfg, std::uint64_t seed);

// CSV header "meter,slot,kw"; loading reconstructs the series only (ground
// truth does not survive the trip, real corpora never had one).
std::string emit_corpus_csv(const SyntheticCorpus& corpus);
SyntheticCorpus load_corpus_csv(const std::string& text);

}  // namespace gridflex
