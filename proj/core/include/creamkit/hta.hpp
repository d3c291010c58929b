#pragma once

// Hierarchical task analysis trees with cognitive-function annotations,
// and the line-oriented `.hta` text format:
//
//   # comment
//   #@ name: Film interpretation
//   3.3.2 "Determining the area to be interpreted" cf=Planning:P2@1.00E-02 cf=Execution:E3
//
// Hierarchy comes from the dotted numbers alone; indentation is ignored.

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "creamkit/result.hpp"
#include "creamkit/taxonomy.hpp"

namespace creamkit {

/// Dotted task number such as 3.3.4.2. Components are positive.
class TaskNumber {
 public:
  TaskNumber() = default;
  explicit TaskNumber(std::vector<int> parts) : parts_(std::move(parts)) {}

  static std::optional<TaskNumber> parse(std::string_view text);

  const std::vector<int>& parts() const { return parts_; }
  std::size_t depth() const { return parts_.size(); }
  bool empty() const { return parts_.empty(); }
  int last() const { return parts_.back(); }

  TaskNumber parent() const;
  TaskNumber child(int index) const;
  /// True if `other` equals this number or lies beneath it.
  bool is_prefix_of(const TaskNumber& other) const;

  std::string str() const;

  auto operator<=>(const TaskNumber&) const = default;
  bool operator==(const TaskNumber&) const = default;

 private:
  std::vector<int> parts_;
};

struct CfAssignment {
  CognitiveFunction function;
  std::optional<std::string> cff;  // generic failure type code
  std::optional<double> cfp_override;

  bool operator==(const CfAssignment&) const = default;
};

struct TaskNode {
  TaskNumber number;
  std::string title;
  std::vector<CfAssignment> assignments;
  std::vector<TaskNode> children;

  bool operator==(const TaskNode&) const = default;
};

struct TreeMetadata {
  std::string name;
  std::string version;
  std::string notes;

  bool operator==(const TreeMetadata&) const = default;
};

struct TaskTree {
  TreeMetadata metadata;
  std::vector<TaskNode> roots;

  /// Depth-first, document order. Returns nullptr if absent.
  const TaskNode* find(const TaskNumber& number) const;
  std::size_t node_count() const;

  bool operator==(const TaskTree&) const = default;
};

/// Parses `.hta` text. Either the whole document parses or the result holds
/// every line-addressed diagnostic; there is no partial tree.
Result<TaskTree> parse_hta(std::string_view text);

/// Canonical text. parse_hta(serialize_hta(t)) == t for any valid tree.
std::string serialize_hta(const TaskTree& tree);

/// Structural and taxonomy checks. Empty iff the tree is valid against `t`.
std::vector<Diagnostic> validate_hta(const TaskTree& tree, const Taxonomy& t);

struct NumberedAssignment {
  TaskNumber node;
  CfAssignment assignment;

  bool operator==(const NumberedAssignment&) const = default;
};

/// Every assignment of every node, in document order.
std::vector<NumberedAssignment> collect_assignments(const TaskTree& tree);

/// JSON export of the same structure (used by the HTTP API and projects).
std::string hta_to_json(const TaskTree& tree);
Result<TaskTree> hta_from_json(std::string_view document);

/// Accepts both "0.07" and the comma-decimal "7,00E-02" spelling.
std::optional<double> parse_probability_literal(std::string_view text);

}  // namespace creamkit
