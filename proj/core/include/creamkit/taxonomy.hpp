#pragma once

// CREAM reference data: cognitive functions, generic failure types with
// their nominal probabilities, the common performance condition (CPC)
// catalog, the COCOM decision grid, control-mode intervals and the CPC
// weight table used by the extended method.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "creamkit/result.hpp"

namespace creamkit {

enum class CognitiveFunction { Observation, Interpretation, Planning, Execution };

inline constexpr std::array<CognitiveFunction, 4> kAllFunctions = {
    CognitiveFunction::Observation, CognitiveFunction::Interpretation,
    CognitiveFunction::Planning, CognitiveFunction::Execution};

std::string_view to_string(CognitiveFunction f);
/// Leading letter of the generic failure type codes owned by `f` (O, I, P, E).
char function_letter(CognitiveFunction f);
/// Accepts the canonical names plus "Observer", a common spelling in task analyses.
std::optional<CognitiveFunction> parse_function(std::string_view name);

/// Effect of a CPC state on performance reliability. Ordered worst to best.
enum class Effect { Reduce, Neutral, Improve };

std::string_view to_string(Effect e);
std::optional<Effect> parse_effect(std::string_view name);

/// Ordered from least to most reliable.
enum class ControlMode { Scrambled, Opportunistic, Tactical, Strategic };

inline constexpr std::array<ControlMode, 4> kAllModes = {
    ControlMode::Scrambled, ControlMode::Opportunistic, ControlMode::Tactical,
    ControlMode::Strategic};

std::string_view to_string(ControlMode m);
std::optional<ControlMode> parse_control_mode(std::string_view name);

struct FunctionInfo {
  CognitiveFunction id;
  std::string display_name;

  bool operator==(const FunctionInfo&) const = default;
};

struct GenericFailureType {
  std::string id;  // e.g. "O2"
  CognitiveFunction function;
  std::string description;
  double nominal_cfp;

  bool operator==(const GenericFailureType&) const = default;
};

struct CpcState {
  std::string name;
  Effect effect;

  bool operator==(const CpcState&) const = default;
};

struct CpcDefinition {
  int id;
  std::string name;
  std::string description;
  std::vector<CpcState> states;

  const CpcState* find_state(std::string_view state_name) const;
  bool operator==(const CpcDefinition&) const = default;
};

struct HepInterval {
  double lower;
  double upper;

  bool operator==(const HepInterval&) const = default;
};

struct ControlModeInfo {
  ControlMode id;
  HepInterval interval;

  bool operator==(const ControlModeInfo&) const = default;
};

/// Dense lookup from (sum_reduce, sum_improve) to a control mode.
/// Rows are indexed by sum_reduce, columns by sum_improve.
class CocomMap {
 public:
  CocomMap() = default;
  CocomMap(int rows, int cols, std::vector<ControlMode> cells);

  /// Grid where the mode is a function of improve - reduce, banded by the
  /// three lower bounds for Opportunistic, Tactical and Strategic.
  static CocomMap from_score_bands(int max_reduce, int max_improve,
                                   int opportunistic_from, int tactical_from,
                                   int strategic_from);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int max_reduce() const { return rows_ - 1; }
  int max_improve() const { return cols_ - 1; }
  const std::vector<ControlMode>& cells() const { return cells_; }

  bool contains(int sum_reduce, int sum_improve) const;
  /// Throws Error when the score lies outside the grid.
  ControlMode at(int sum_reduce, int sum_improve) const;

  /// Totality, monotonicity and corner anchoring violations; empty if none.
  std::vector<std::string> check() const;

  bool operator==(const CocomMap&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<ControlMode> cells_;
};

struct WeightKey {
  int cpc;
  std::string state;
  CognitiveFunction function;

  auto operator<=>(const WeightKey&) const = default;
  bool operator==(const WeightKey&) const = default;
};

/// Multipliers applied to nominal CFPs by the chosen CPC states. Entries
/// that are not listed weigh 1.0.
class WeightTable {
 public:
  static WeightTable unit() { return {}; }

  double weight(int cpc, std::string_view state, CognitiveFunction f) const;
  void set(int cpc, std::string state, CognitiveFunction f, double multiplier);
  const std::map<WeightKey, double>& entries() const { return entries_; }

  bool operator==(const WeightTable&) const = default;

 private:
  std::map<WeightKey, double> entries_;
};

struct Taxonomy {
  std::string name;
  std::string version;
  std::vector<FunctionInfo> functions;
  std::vector<GenericFailureType> failure_types;  // listing order matters for tie-breaks
  std::vector<CpcDefinition> cpcs;
  std::vector<ControlModeInfo> control_modes;
  CocomMap cocom;
  WeightTable weights;
  std::vector<std::pair<std::string, CognitiveFunction>> activity_map;

  const GenericFailureType* find_failure_type(std::string_view code) const;
  const CpcDefinition* find_cpc(int id) const;
  /// Throws Error if the mode is not listed.
  HepInterval interval(ControlMode mode) const;

  bool operator==(const Taxonomy&) const = default;
};

/// The built-in NDT radiograph-interpretation dataset.
const Taxonomy& default_taxonomy();

/// Parses a taxonomy JSON document and checks every invariant. On failure
/// the result lists all violations found, not just the first.
Result<Taxonomy> load_taxonomy(std::string_view document);
std::string serialize_taxonomy(const Taxonomy& t);
std::vector<Diagnostic> validate_taxonomy(const Taxonomy& t);

/// Table value for `code`, unmodified. Throws Error for unknown codes.
double nominal_cfp(const Taxonomy& t, std::string_view code);

std::optional<CognitiveFunction> function_for_activity(const Taxonomy& t,
                                                       std::string_view activity);

/// Largest achievable count of Improve (resp. Reduce) choices.
int max_improve_sum(const Taxonomy& t);
int max_reduce_sum(const Taxonomy& t);

}  // namespace creamkit
