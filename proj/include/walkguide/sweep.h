#ifndef WALKGUIDE_SWEEP_H_
#define WALKGUIDE_SWEEP_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "walkguide/analysis.h"
#include "walkguide/simulator.h"

namespace walkguide {

// key/value pairs describing how a cell differs from the base scenario.
using ScenarioDelta = std::vector<std::pair<std::string, std::string>>;

struct SweepJob {
  ScenarioDelta delta;
  // Empty when the cell could not be turned into a scenario; `error` says why.
  std::optional<Scenario> scenario;
  std::string error;
};

struct SweepOutcome {
  ScenarioDelta delta;
  std::optional<RunSummary> summary;
  std::string error;
  std::optional<Trace> trace;  // kept only on request
};

// Runs every job on up to `parallel` threads. Results are in job order and a
// failing run becomes an error entry instead of aborting the sweep. Throws
// Error(kEmptyGrid) when `jobs` is empty.
std::vector<SweepOutcome> sweep(const std::vector<SweepJob>& jobs,
                                int parallel, bool keep_traces = false);

}  // namespace walkguide

#endif  // WALKGUIDE_SWEEP_H_
