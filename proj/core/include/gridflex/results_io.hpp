// Serialization of solve results and sweep tables. Every artifact embeds a
// manifest echoing the inputs that produced it, so a results file is
// self-describing and reruns can be compared field by field.
#pragma once

#include <cstdint>
#include <string>

#include "gridflex/case_runner.hpp"
#include "gridflex/sweep.hpp"

namespace gridflex {

// inputs of a run, echoed verbatim into the artifact
struct RunManifest {
  std::string instance;       // instance name from the file
  std::string instance_path;  // where it was loaded from
  std::string config;         // single-case runs; ignored by sweep writers
  double penetration = 0.0;
  std::uint64_t seed = 0;     // meaningful when the EV profile was generated
  int hours = 0;              // 0: the instance's own horizon
  std::string solver = "bnb";
  std::string bess_binaries = "exact";
  std::string ev_profile;     // path or provenance note; empty when unused
};

// single case: manifest, status, cost, full schedule, verification, stats
std::string results_to_json(const RunManifest& manifest, const CaseResult& result);

// sweep: manifest (configs and penetrations as arrays), one entry per cell
// with cost and the switchable-line closed pattern, feasibility frontier per
// config, and any ordering violations
std::string sweep_to_json(const RunManifest& manifest, const SweepPlan& plan,
                          const SweepResult& sweep);

// flat table, one row per cell: config, penetration, status, cost, stats
std::string sweep_to_csv(const SweepResult& sweep);

// Semantic comparison of two result documents: parses both and ignores wall
// clock fields, which differ run to run even when the solve is identical.
bool results_equivalent(const std::string& json_a, const std::string& json_b);

}  // namespace gridflex
