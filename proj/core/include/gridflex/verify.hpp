// Independent feasibility audit of a dispatch schedule against its instance.
// Everything is recomputed from the schedule values themselves, never from
// solver internals, so a lying solver cannot pass.
#pragma once

#include <string>
#include <vector>

#include "gridflex/lp.hpp"
#include "gridflex/network.hpp"
#include "gridflex/schedule.hpp"

namespace gridflex {

struct VerificationCheck {
  std::string name;
  bool passed = false;
  bool warning = false;  // passed, but with a caveat in detail
  double worst = 0.0;    // largest deviation encountered
  std::string detail;    // first offender, empty when clean
};

struct ScheduleVerification {
  std::vector<VerificationCheck> checks;
  bool ok() const;
  const VerificationCheck* find(const std::string& name) const;
};

// bess_mode Relaxed downgrades the charge/discharge exclusivity check to a
// warning, matching a run whose indicator variables stayed continuous.
ScheduleVerification verify_schedule(const NetworkInstance& inst, const CaseConfig& cfg,
                                     const DispatchSchedule& s,
                                     BessBinaryMode bess_mode = BessBinaryMode::Exact);

}  // namespace gridflex
