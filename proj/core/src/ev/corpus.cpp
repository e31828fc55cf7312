#include "gridflex/ev/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "gridflex/ev/rng.hpp"
#include "gridflex/network.hpp"

namespace gridflex {
namespace {

// charging power bands (kW) and session energy lognormals per class
constexpr double kPowerLo[3] = {1.4, 3.7, 11.0};
constexpr double kPowerHi[3] = {3.7, 11.0, 22.0};
constexpr double kEnergyMu[3] = {1.55, 2.45, 3.0};
constexpr double kEnergySigma[3] = {0.45, 0.40, 0.35};
constexpr double kMinDuration = 20.0;
constexpr double kMaxDuration = 840.0;

// start-of-session mixture: evening bulk, a small overnight tail, and a
// midday component, all wrapped onto the clock
struct StartComponent {
  double weight, mean_min, sd_min;
};
constexpr StartComponent kStartMix[3] = {
    {0.7, 1260.0, 110.0},
    {0.2, 80.0, 90.0},
    {0.1, 780.0, 240.0},
};

double wrap_minutes(double m) {
  m = std::fmod(m, kMinutesPerDay);
  return m < 0.0 ? m + kMinutesPerDay : m;
}

}  // namespace

const char* to_string(EvClass c) {
  switch (c) {
    case EvClass::Low: return "low";
    case EvClass::Normal: return "normal";
    case EvClass::High: return "high";
  }
  return "unknown";
}

SyntheticCorpus generate_corpus(const CorpusConfig& cfg, std::uint64_t seed) {
  if (cfg.meters <= 0 || cfg.days <= 0) {
    throw std::invalid_argument("corpus: meters and days must be positive");
  }
  SyntheticCorpus corpus;
  corpus.days = cfg.days;
  const int total_slots = cfg.days * kSlotsPerDay;
  const double series_minutes = cfg.days * kMinutesPerDay;

  Rng rng(child_seed(seed, "corpus"));
  const std::vector<double> shares = {cfg.share_low, cfg.share_normal, cfg.share_high};

  for (int m = 0; m < cfg.meters; ++m) {
    MeterSeries series;
    series.meter = m;
    series.kw.assign(total_slots, 0.0);

    const double base = rng.uniform(cfg.base_load_min_kw, cfg.base_load_max_kw);
    for (int s = 0; s < total_slots; ++s) {
      series.kw[s] = std::max(0.0, base + rng.uniform(-0.02, 0.02));
    }

    const EvClass cls = static_cast<EvClass>(rng.pick_weighted(shares));
    const int ci = static_cast<int>(cls);

    for (int day = 0; day < cfg.days; ++day) {
      if (!rng.bernoulli(cfg.event_probability)) continue;

      // start component, then the session itself
      double cw = rng.uniform();
      int comp = 2;
      for (int k = 0; k < 3; ++k) {
        cw -= kStartMix[k].weight;
        if (cw < 0.0) {
          comp = k;
          break;
        }
      }
      const double start_of_day = wrap_minutes(rng.normal(kStartMix[comp].mean_min,
                                                          kStartMix[comp].sd_min));
      const double power = rng.uniform(kPowerLo[ci], kPowerHi[ci]);
      const double energy = rng.lognormal(kEnergyMu[ci], kEnergySigma[ci]);
      double duration = std::clamp(energy / power * 60.0, kMinDuration, kMaxDuration);

      const double start = day * kMinutesPerDay + start_of_day;
      if (start + duration > series_minutes) duration = series_minutes - start;
      if (duration <= 0.0) continue;

      // spread over the slots it overlaps, conserving energy
      const int first_slot = static_cast<int>(start / kSlotMinutes);
      const int last_slot =
          std::min(total_slots - 1, static_cast<int>((start + duration) / kSlotMinutes));
      for (int s = first_slot; s <= last_slot; ++s) {
        const double slot_begin = s * kSlotMinutes;
        const double slot_end = slot_begin + kSlotMinutes;
        const double overlap =
            std::min(start + duration, slot_end) - std::max(start, slot_begin);
        if (overlap > 0.0) series.kw[s] += power * overlap / kSlotMinutes;
      }

      InjectedEvent ev;
      ev.meter = m;
      ev.start_minute = start;
      ev.duration_min = duration;
      ev.energy_kwh = power * duration / 60.0;
      ev.power_kw = power;
      ev.ev_class = cls;
      corpus.injected.push_back(ev);
    }
    corpus.series.push_back(std::move(series));
  }
  return corpus;
}

std::string emit_corpus_csv(const SyntheticCorpus& corpus) {
  std::ostringstream out;
  out << "meter,slot,kw\n";
  char buf[48];
  for (const MeterSeries& s : corpus.series) {
    for (std::size_t i = 0; i < s.kw.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", s.kw[i]);
      out << s.meter << ',' << i << ',' << buf << '\n';
    }
  }
  return out.str();
}

SyntheticCorpus load_corpus_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("corpus: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "meter,slot,kw") {
    throw ParseError("corpus: expected header 'meter,slot,kw', got '" + line + "'");
  }
  std::map<int, std::map<int, double>> cells;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    int meter = 0, slot = 0;
    double kw = 0.0;
    char trail = '\0';
    if (std::sscanf(line.c_str(), "%d,%d,%lf %c", &meter, &slot, &kw, &trail) != 3) {
      throw ParseError("corpus line " + std::to_string(line_no) + ": expected 'meter,slot,kw'");
    }
    if (slot < 0 || kw < 0.0 || !std::isfinite(kw)) {
      throw ParseError("corpus line " + std::to_string(line_no) + ": bad slot or kw");
    }
    cells[meter][slot] = kw;
  }
  SyntheticCorpus corpus;
  for (auto& [meter, slots] : cells) {
    if (slots.empty()) continue;
    const int max_slot = slots.rbegin()->first;
    MeterSeries series;
    series.meter = meter;
    series.kw.assign(max_slot + 1, 0.0);
    for (const auto& [slot, kw] : slots) series.kw[slot] = kw;
    corpus.series.push_back(std::move(series));
  }
  for (const MeterSeries& s : corpus.series) {
    corpus.days = std::max(corpus.days,
                           static_cast<int>((s.kw.size() + kSlotsPerDay - 1) / kSlotsPerDay));
  }
  return corpus;
}

}  // namespace gridflex
