#pragma once

// Single-CPC sensitivity sweeps: which one contextual change most reduces
// the predicted failure probability of a task analysis.

#include <optional>
#include <string>
#include <vector>

#include "creamkit/extended.hpp"
#include "creamkit/hta.hpp"
#include "creamkit/screening.hpp"

namespace creamkit {

struct WhatIfDelta {
  int cpc_id;
  std::string from_state;
  std::string to_state;
  ControlMode mode_before;
  ControlMode mode_after;
  double aggregate_before;
  double aggregate_after;
  HepInterval interval_before;
  HepInterval interval_after;

  bool operator==(const WhatIfDelta&) const = default;
};

/// One delta per (CPC, alternative state), each re-running screening and
/// analysis with only that CPC changed. Sorted by aggregate_after
/// ascending, then by better mode_after, then by CPC id and state order.
std::vector<WhatIfDelta> single_cpc_sweep(const TaskTree& tree, const CpcAssessment& baseline,
                                          const Taxonomy& t);

/// The strictly improving delta with the lowest aggregate_after (lowest
/// CPC id on ties), or nothing when no change helps.
std::optional<WhatIfDelta> best_improvement(const std::vector<WhatIfDelta>& sweep);

/// True when no delta moves the aggregate; the ranking then reflects mode
/// changes only.
bool sweep_is_flat(const std::vector<WhatIfDelta>& sweep);

}  // namespace creamkit
