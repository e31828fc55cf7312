#include "gridflex/ev/fleet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "gridflex/ev/corpus.hpp"
#include "gridflex/ev/rng.hpp"

namespace gridflex {

std::size_t FleetModel::total_events() const {
  std::size_t n = 0;
  for (const auto& cm : classes_) n += cm.events;
  return n;
}

FleetModel fit_fleet_model(const std::vector<ChargingEvent>& events) {
  if (events.empty()) {
    throw std::invalid_argument("fleet model needs at least one charging event");
  }
  std::array<std::vector<double>, 3> starts;
  std::array<std::vector<double>, 3> durations;
  std::array<std::vector<double>, 3> energies;
  for (const auto& ev : events) {
    const int c = static_cast<int>(ev.ev_class);
    // sessions live at a minute of day, not a minute of the recording
    starts[c].push_back(std::fmod(ev.start_minute, kMinutesPerDay));
    durations[c].push_back(ev.duration_min);
    energies[c].push_back(ev.energy_kwh);
  }
  FleetModel model;
  for (int c = 0; c < 3; ++c) {
    if (starts[c].empty()) continue;
    auto& cm = model.of(static_cast<EvClass>(c));
    cm.start_minute =
        std::make_unique<GaussianKde>(starts[c], GaussianKde::Support::WrapMinutes);
    cm.duration_min =
        std::make_unique<GaussianKde>(durations[c], GaussianKde::Support::Positive);
    cm.energy_kwh =
        std::make_unique<GaussianKde>(energies[c], GaussianKde::Support::Positive);
    cm.events = starts[c].size();
  }
  return model;
}

namespace {

// one charging session folded into hour-of-day energy buckets (kWh); the
// clock wraps at midnight so nothing is lost at the end of the day
void deposit_session(double start_minute, double duration_min, double energy_kwh,
                     std::array<double, kHoursPerDay>& bucket_kwh) {
  const double power_kw = energy_kwh / (duration_min / 60.0);
  double at = std::fmod(start_minute, kMinutesPerDay);
  if (at < 0.0) at += kMinutesPerDay;
  double left = duration_min;
  while (left > 1e-9) {
    const int hour = static_cast<int>(at / 60.0) % kHoursPerDay;
    const double hour_end = (std::floor(at / 60.0) + 1.0) * 60.0;
    const double span = std::min(left, hour_end - at);
    bucket_kwh[hour] += power_kw * span / 60.0;
    left -= span;
    at += span;
    if (at >= kMinutesPerDay) at -= kMinutesPerDay;
  }
}

}  // namespace

HourlyProfile simulate_fleet_profile(const FleetModel& model, const FleetConfig& cfg,
                                     std::uint64_t seed) {
  if (cfg.num_evs <= 0 || cfg.days <= 0) {
    throw std::invalid_argument("fleet simulation needs a positive fleet size and day count");
  }
  if (model.total_events() == 0) {
    throw std::invalid_argument("fleet model holds no fitted classes");
  }
  Rng rng(child_seed(seed, "fleet"));

  // classes the model can actually sample from
  std::vector<EvClass> cand;
  std::vector<double> cand_share;
  const double shares[3] = {cfg.share_low, cfg.share_normal, cfg.share_high};
  for (int c = 0; c < 3; ++c) {
    if (!model.has(static_cast<EvClass>(c))) continue;
    cand.push_back(static_cast<EvClass>(c));
    cand_share.push_back(shares[c]);
  }

  // each vehicle keeps its charger class for the whole horizon
  std::vector<EvClass> ev_class(static_cast<std::size_t>(cfg.num_evs));
  for (int e = 0; e < cfg.num_evs; ++e) {
    ev_class[e] = cand[rng.pick_weighted(cand_share)];
  }

  std::array<double, kHoursPerDay> total_kwh{};
  for (int day = 0; day < cfg.days; ++day) {
    for (int e = 0; e < cfg.num_evs; ++e) {
      if (!rng.bernoulli(cfg.participation)) continue;
      const auto& cm = model.of(ev_class[e]);
      const double start = cm.start_minute->sample(rng);
      double duration = cm.duration_min->sample(rng);
      double energy = cm.energy_kwh->sample(rng);
      // keep KDE tail draws inside physically sane session shapes
      duration = std::clamp(duration, 5.0, kMinutesPerDay);
      energy = std::max(energy, 0.05);
      deposit_session(start, duration, energy, total_kwh);
    }
  }

  HourlyProfile mw{};
  for (int h = 0; h < kHoursPerDay; ++h) {
    mw[h] = total_kwh[h] / static_cast<double>(cfg.days) / 1000.0;
  }
  return mw;
}

EvDemandProfile distribute_profile(const HourlyProfile& fleet_mw,
                                   const std::map<int, double>& bus_weights) {
  if (bus_weights.empty()) {
    throw std::invalid_argument("bus weight map is empty");
  }
  double sum = 0.0;
  for (const auto& [bus, w] : bus_weights) {
    if (w < 0.0) {
      throw std::invalid_argument("bus " + std::to_string(bus) + " has a negative weight");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("bus weights sum to " + std::to_string(sum) +
                                ", expected 1");
  }
  EvDemandProfile out;
  for (const auto& [bus, w] : bus_weights) {
    HourlyProfile p{};
    for (int h = 0; h < kHoursPerDay; ++h) p[h] = w * fleet_mw[h];
    out.demand_mw[bus] = p;
  }
  return out;
}

std::map<int, double> load_bus_weights(const std::string& json_text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("bus weights: ") + e.what());
  }
  if (!root.is_object()) {
    throw ParseError("bus weights: expected a JSON object of bus -> weight");
  }
  std::map<int, double> weights;
  for (const auto& [key, value] : root.items()) {
    int bus = 0;
    try {
      bus = std::stoi(key);
    } catch (const std::exception&) {
      throw ParseError("bus weights: key '" + key + "' is not a bus id");
    }
    if (!value.is_number()) {
      throw ParseError("bus weights: value for bus " + key + " is not a number");
    }
    weights[bus] = value.get<double>();
  }
  return weights;
}

}  // namespace gridflex
