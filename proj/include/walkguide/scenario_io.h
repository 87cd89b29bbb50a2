#ifndef WALKGUIDE_SCENARIO_IO_H_
#define WALKGUIDE_SCENARIO_IO_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "walkguide/analysis.h"
#include "walkguide/simulator.h"
#include "walkguide/sweep.h"

namespace walkguide {

using Json = nlohmann::json;

// Reads a JSON config. Throws Error(kIo) if unreadable, Error(kConfig) if
// malformed.
Json load_config_file(const std::filesystem::path& file);
Json parse_config(std::string_view text);

// The shipped demo scenario.
std::string_view demo_config_text();

// Applies "a.b.c=value". Numeric components index arrays; missing object
// members are created. The value is parsed as JSON when possible and taken
// as a string otherwise. Throws Error(kConfig) on a malformed assignment.
void apply_override(Json& config, std::string_view assignment);
void set_value(Json& config, std::string_view dotted_key, const Json& value);

// Builds a scenario. A "path" given as a string names a path file, resolved
// against `base_dir`. Unknown keys are rejected with Error(kConfig); path
// construction errors keep their own codes.
Scenario scenario_from_json(const Json& config,
                            const std::filesystem::path& base_dir = {});
Path path_from_json(const Json& path_spec);
DeltaProfile delta_profile_from_json(const Json& spec);

// Expands the config's "sweep" block into one job per grid cell: the
// product of every parameter axis (outer, in key order) with the initial
// offsets l_norm x theta_tilde (inner). Axis values are lists or
// {"from", "to", "count"} ranges. Throws Error(kEmptyGrid) when the block is
// missing or yields no cells.
std::vector<SweepJob> sweep_jobs(const Json& config,
                                 const std::filesystem::path& base_dir = {});

Json summary_to_json(const RunSummary& summary, const TraceInfo& info);
Json sweep_to_json(const std::vector<SweepOutcome>& outcomes);

}  // namespace walkguide

#endif  // WALKGUIDE_SCENARIO_IO_H_
