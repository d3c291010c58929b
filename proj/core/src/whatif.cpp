#include "creamkit/whatif.hpp"

#include <algorithm>

namespace creamkit {

std::vector<WhatIfDelta> single_cpc_sweep(const TaskTree& tree, const CpcAssessment& baseline,
                                          const Taxonomy& t) {
  const auto base_screen = screen(baseline, t);
  const auto base_analysis = analyze(tree, baseline, t);

  struct Keyed {
    WhatIfDelta delta;
    std::size_t state_index;
  };
  std::vector<Keyed> out;
  for (const auto& cpc : t.cpcs) {
    const auto& from = baseline.state_of(cpc.id);
    for (std::size_t k = 0; k < cpc.states.size(); ++k) {
      const auto& to = cpc.states[k].name;
      if (to == from) continue;
      const auto changed = baseline.with_choice(cpc.id, to, t).value();
      const auto s = screen(changed, t);
      const auto a = analyze(tree, changed, t);
      out.push_back({WhatIfDelta{cpc.id, from, to, base_screen.mode, s.mode,
                                 base_analysis.aggregate_failure_p, a.aggregate_failure_p,
                                 base_screen.interval, s.interval},
                     k});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Keyed& x, const Keyed& y) {
    const auto& a = x.delta;
    const auto& b = y.delta;
    if (a.aggregate_after != b.aggregate_after) return a.aggregate_after < b.aggregate_after;
    if (a.mode_after != b.mode_after) return a.mode_after > b.mode_after;
    if (a.cpc_id != b.cpc_id) return a.cpc_id < b.cpc_id;
    return x.state_index < y.state_index;
  });

  std::vector<WhatIfDelta> deltas;
  deltas.reserve(out.size());
  for (auto& k : out) deltas.push_back(std::move(k.delta));
  return deltas;
}

std::optional<WhatIfDelta> best_improvement(const std::vector<WhatIfDelta>& sweep) {
  const WhatIfDelta* best = nullptr;
  for (const auto& d : sweep) {
    if (!(d.aggregate_after < d.aggregate_before)) continue;
    if (best == nullptr || d.aggregate_after < best->aggregate_after ||
        (d.aggregate_after == best->aggregate_after && d.cpc_id < best->cpc_id)) {
      best = &d;
    }
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

bool sweep_is_flat(const std::vector<WhatIfDelta>& sweep) {
  return std::all_of(sweep.begin(), sweep.end(), [](const WhatIfDelta& d) {
    return d.aggregate_after == d.aggregate_before;
  });
}

}  // namespace creamkit
