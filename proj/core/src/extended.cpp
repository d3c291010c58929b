#include "creamkit/extended.hpp"

#include <algorithm>
#include <numeric>

namespace creamkit {

int DemandProfile::total() const { return std::accumulate(counts.begin(), counts.end(), 0); }

std::string DemandProfile::scope_label() const { return scope ? scope->str() : "all"; }

std::string_view to_string(CfpSource s) {
  return s == CfpSource::Override ? "override" : "computed";
}

namespace {

void count_node(const TaskNode& n, DemandProfile& p) {
  for (const auto& a : n.assignments) ++p.counts[static_cast<std::size_t>(a.function)];
  for (const auto& c : n.children) count_node(c, p);
}

}  // namespace

DemandProfile demand_profile(const TaskTree& tree, const std::optional<TaskNumber>& scope) {
  DemandProfile p;
  p.scope = scope;
  if (!scope) {
    for (const auto& r : tree.roots) count_node(r, p);
    return p;
  }
  const auto* node = tree.find(*scope);
  if (node == nullptr) throw Error("unknown scope node " + scope->str());
  count_node(*node, p);
  return p;
}

std::vector<DemandProfile> step_profiles(const TaskTree& tree) {
  std::vector<DemandProfile> out;
  out.reserve(tree.roots.size());
  for (const auto& r : tree.roots) out.push_back(demand_profile(tree, r.number));
  return out;
}

double adjusted_cfp(double nominal, CognitiveFunction function, const CpcAssessment& context,
                    const Taxonomy& t) {
  double product = 1.0;
  for (const auto& cpc : t.cpcs) {
    product *= t.weights.weight(cpc.id, context.state_of(cpc.id), function);
  }
  return std::clamp(nominal * product, kMinCfp, kMaxCfp);
}

std::string assign_cff(const CfAssignment& assignment, const Taxonomy& t,
                       const CpcAssessment& context) {
  if (assignment.cff) return *assignment.cff;
  const GenericFailureType* best = nullptr;
  double best_p = -1.0;
  for (const auto& g : t.failure_types) {
    if (g.function != assignment.function) continue;
    const double p = adjusted_cfp(g.nominal_cfp, g.function, context, t);
    if (p > best_p) {
      best = &g;
      best_p = p;
    }
  }
  if (best == nullptr) {
    throw Error("taxonomy has no failure type for " + std::string(to_string(assignment.function)));
  }
  return best->id;
}

double aggregate_failure_probability(std::span<const double> cfps) {
  // Running form of 1 - prod(1 - p); exact for a single term and for p = 1.
  double any = 0.0;
  for (double p : cfps) any += (1.0 - any) * p;
  return any;
}

ExtendedResult analyze(const TaskTree& tree, const CpcAssessment& context, const Taxonomy& t) {
  if (auto problems = validate_hta(tree, t); !problems.empty()) {
    std::string msg = "task analysis is not valid against the taxonomy:";
    for (const auto& d : problems) msg += "\n  " + to_string(d);
    throw Error(msg);
  }
  if (auto problems = check_assessment(context.draft(), t); !problems.empty()) {
    throw Error("assessment does not fit the taxonomy: " + to_string(problems.front()));
  }

  ExtendedResult r;
  r.context = context.draft();
  std::vector<double> cfps;
  for (const auto& [node, a] : collect_assignments(tree)) {
    const auto code = assign_cff(a, t, context);
    const double nominal = nominal_cfp(t, code);
    AssignmentResult ar{node, a.function, code, nominal, 0.0, CfpSource::Computed};
    if (a.cfp_override) {
      ar.adjusted_cfp = std::clamp(*a.cfp_override, kMinCfp, kMaxCfp);
      ar.source = CfpSource::Override;
    } else {
      ar.adjusted_cfp = adjusted_cfp(nominal, a.function, context, t);
    }
    cfps.push_back(ar.adjusted_cfp);

    if (r.per_node_worst.empty() || r.per_node_worst.back().node != node) {
      r.per_node_worst.push_back(ar);
    } else if (ar.adjusted_cfp > r.per_node_worst.back().adjusted_cfp) {
      r.per_node_worst.back() = ar;
    }
    r.per_assignment.push_back(std::move(ar));
  }
  r.profile = demand_profile(tree);
  r.aggregate_failure_p = aggregate_failure_probability(cfps);
  return r;
}

std::vector<AssignmentResult> rank_critical(const ExtendedResult& result, std::size_t k) {
  auto ranked = result.per_assignment;
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.adjusted_cfp > b.adjusted_cfp;
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

}  // namespace creamkit
