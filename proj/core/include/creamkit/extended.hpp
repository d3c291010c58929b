#pragma once

// Extended-mode CREAM: cognitive demand profiles, selection of the most
// likely cognitive function failure, context-adjusted failure
// probabilities and their aggregation over a task sequence.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "creamkit/hta.hpp"
#include "creamkit/screening.hpp"
#include "creamkit/taxonomy.hpp"

namespace creamkit {

inline constexpr double kMinCfp = 1e-6;
inline constexpr double kMaxCfp = 1.0;

struct DemandProfile {
  std::array<int, 4> counts{};     // indexed by CognitiveFunction
  std::optional<TaskNumber> scope;  // nullopt: whole tree

  int count(CognitiveFunction f) const { return counts[static_cast<std::size_t>(f)]; }
  int total() const;
  std::string scope_label() const;

  bool operator==(const DemandProfile&) const = default;
};

enum class CfpSource { Override, Computed };

std::string_view to_string(CfpSource s);

struct AssignmentResult {
  TaskNumber node;
  CognitiveFunction function;
  std::string cff;
  double nominal;
  double adjusted_cfp;
  CfpSource source;

  bool operator==(const AssignmentResult&) const = default;
};

struct ExtendedResult {
  std::vector<AssignmentResult> per_assignment;   // document order
  std::vector<AssignmentResult> per_node_worst;   // one per node with assignments, document order
  DemandProfile profile;
  double aggregate_failure_p = 0.0;
  AssessmentDraft context;

  bool operator==(const ExtendedResult&) const = default;
};

/// Counts assignments on `scope` and all its descendants, or over the whole
/// tree when `scope` is empty. Throws Error if the scope node is absent.
DemandProfile demand_profile(const TaskTree& tree, const std::optional<TaskNumber>& scope = {});

/// One profile per root, in document order.
std::vector<DemandProfile> step_profiles(const TaskTree& tree);

/// nominal x product of the chosen states' weights for `function`, clamped
/// to [kMinCfp, kMaxCfp].
double adjusted_cfp(double nominal, CognitiveFunction function, const CpcAssessment& context,
                    const Taxonomy& t);

/// The analyst's code when given; otherwise the failure type of the
/// assignment's function with the largest adjusted CFP, earliest listed on
/// ties.
std::string assign_cff(const CfAssignment& assignment, const Taxonomy& t,
                       const CpcAssessment& context);

/// 1 - prod(1 - p), treating the failures as independent.
double aggregate_failure_probability(std::span<const double> cfps);

/// Validates `tree` against `t` first; throws Error listing the violations.
ExtendedResult analyze(const TaskTree& tree, const CpcAssessment& context, const Taxonomy& t);

/// Top `k` by adjusted CFP, descending, document order on ties.
std::vector<AssignmentResult> rank_critical(const ExtendedResult& result, std::size_t k);

}  // namespace creamkit
