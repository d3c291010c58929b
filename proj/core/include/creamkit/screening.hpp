#pragma once

// Basic-mode CREAM: working context -> combined score -> control mode ->
// human error probability interval.

#include <map>
#include <string>

#include "creamkit/result.hpp"
#include "creamkit/taxonomy.hpp"

namespace creamkit {

/// Unvalidated assessment as read from a file or request body.
struct AssessmentDraft {
  std::string label;
  std::string timestamp;
  std::map<int, std::string> choices;  // cpc id -> state name

  bool operator==(const AssessmentDraft&) const = default;
};

/// One chosen state for every CPC of a taxonomy. Only constructible through
/// create(), which checks coverage and state names.
class CpcAssessment {
 public:
  static Result<CpcAssessment> create(AssessmentDraft draft, const Taxonomy& t);

  /// Every CPC at its first state with the highest (resp. lowest) effect.
  static CpcAssessment best(const Taxonomy& t);
  static CpcAssessment worst(const Taxonomy& t);
  /// Every CPC at its first Neutral state. Throws Error if a CPC has none.
  static CpcAssessment neutral(const Taxonomy& t);

  /// Copy with one CPC moved to `state`.
  Result<CpcAssessment> with_choice(int cpc, std::string state, const Taxonomy& t) const;

  const std::string& label() const { return draft_.label; }
  const std::string& timestamp() const { return draft_.timestamp; }
  const std::map<int, std::string>& choices() const { return draft_.choices; }
  const std::string& state_of(int cpc) const;
  const AssessmentDraft& draft() const { return draft_; }

  bool operator==(const CpcAssessment&) const = default;

 private:
  explicit CpcAssessment(AssessmentDraft d) : draft_(std::move(d)) {}
  AssessmentDraft draft_;
};

/// Diagnostics for `draft` against `t`; empty when it is a valid assessment.
std::vector<Diagnostic> check_assessment(const AssessmentDraft& draft, const Taxonomy& t);

Result<CpcAssessment> parse_assessment(std::string_view json_text, const Taxonomy& t);
std::string serialize_assessment(const CpcAssessment& a);

struct CombinedScore {
  int reduce = 0;
  int neutral = 0;
  int improve = 0;

  int total() const { return reduce + neutral + improve; }
  bool operator==(const CombinedScore&) const = default;
};

struct ScreeningResult {
  CombinedScore score;
  ControlMode mode;
  HepInterval interval;

  bool operator==(const ScreeningResult&) const = default;
};

/// Counts chosen states by effect. Throws Error if `a` does not fit `t`.
CombinedScore score_assessment(const CpcAssessment& a, const Taxonomy& t);

/// COCOM lookup. Throws Error for scores outside the grid.
ControlMode determine_control_mode(const CombinedScore& s, const Taxonomy& t);

ScreeningResult screen(const CpcAssessment& a, const Taxonomy& t);

}  // namespace creamkit
