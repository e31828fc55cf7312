// JSON ingest/emit for network instances and CSV ingest/emit for EV demand
// profiles. Loading resolves and checks every cross-reference; value-level
// diagnostics live in validate_instance.
#pragma once

#include <string>

#include "gridflex/network.hpp"

namespace gridflex {

NetworkInstance load_instance(const std::string& json_text);
NetworkInstance load_instance_file(const std::string& path);

// Emits JSON that load_instance maps back to an identical instance
// (exact double round-trip).
std::string emit_instance(const NetworkInstance& inst);

// CSV with header "bus_id,hour,demand_mw", hour in 1..24. Missing pairs are
// zero; duplicate pairs accumulate.
EvDemandProfile load_ev_profile_csv(const std::string& csv_text);
EvDemandProfile load_ev_profile_file(const std::string& path);
std::string emit_ev_profile_csv(const EvDemandProfile& profile);

std::string read_text_file(const std::string& path);  // throws FileError when unreadable
// Writes atomically (temp file + rename); throws FileError on failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace gridflex
