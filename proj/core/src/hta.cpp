#include "creamkit/hta.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "creamkit/format.hpp"
#include "json_codec.hpp"

namespace creamkit {

// ---------------------------------------------------------------------------
// TaskNumber

std::optional<TaskNumber> TaskNumber::parse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::vector<int> parts;
  std::size_t pos = 0;
  while (true) {
    const auto dot = text.find('.', pos);
    const auto piece = text.substr(pos, dot == std::string_view::npos ? text.npos : dot - pos);
    if (piece.empty() || piece.size() > 9) return std::nullopt;
    int value = 0;
    auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), value);
    if (ec != std::errc() || ptr != piece.data() + piece.size() || value <= 0) {
      return std::nullopt;
    }
    parts.push_back(value);
    if (dot == std::string_view::npos) break;
    pos = dot + 1;
  }
  return TaskNumber(std::move(parts));
}

TaskNumber TaskNumber::parent() const {
  std::vector<int> p(parts_.begin(), parts_.end() - (parts_.empty() ? 0 : 1));
  return TaskNumber(std::move(p));
}

TaskNumber TaskNumber::child(int index) const {
  auto p = parts_;
  p.push_back(index);
  return TaskNumber(std::move(p));
}

bool TaskNumber::is_prefix_of(const TaskNumber& other) const {
  return parts_.size() <= other.parts_.size() &&
         std::equal(parts_.begin(), parts_.end(), other.parts_.begin());
}

std::string TaskNumber::str() const {
  std::string out;
  for (std::size_t k = 0; k < parts_.size(); ++k) {
    if (k > 0) out += '.';
    out += std::to_string(parts_[k]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// TaskTree

namespace {

const TaskNode* find_in(const std::vector<TaskNode>& nodes, const TaskNumber& number) {
  for (const auto& n : nodes) {
    if (n.number == number) return &n;
    if (n.number.is_prefix_of(number)) return find_in(n.children, number);
  }
  return nullptr;
}

std::size_t count_in(const std::vector<TaskNode>& nodes) {
  std::size_t n = nodes.size();
  for (const auto& c : nodes) n += count_in(c.children);
  return n;
}

}  // namespace

const TaskNode* TaskTree::find(const TaskNumber& number) const {
  return find_in(roots, number);
}

std::size_t TaskTree::node_count() const { return count_in(roots); }

std::optional<double> parse_probability_literal(std::string_view text) {
  std::string s(text);
  std::replace(s.begin(), s.end(), ',', '.');
  if (s.empty() || s.front() == '+') return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

bool valid_probability(double p) { return std::isfinite(p) && p > 0.0 && p <= 1.0; }

bool is_gft_code(std::string_view code) {
  if (code.size() < 2) return false;
  return std::all_of(code.begin() + 1, code.end(), [](char c) { return c >= '0' && c <= '9'; }) &&
         std::isupper(static_cast<unsigned char>(code.front()));
}

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

struct FlatNode {
  TaskNumber number;
  std::string title;
  std::vector<CfAssignment> assignments;
  std::size_t line;
};

class LineParser {
 public:
  LineParser(std::string_view text, std::size_t line, std::vector<Diagnostic>& errors)
      : text_(text), line_(line), errors_(errors) {}

  std::optional<FlatNode> parse() {
    skip_ws();
    const auto num_end = text_.find_first_of(" \t", pos_);
    const auto num_text = text_.substr(pos_, num_end == text_.npos ? text_.npos : num_end - pos_);
    node_ = std::string(num_text);
    auto number = TaskNumber::parse(num_text);
    if (!number) {
      fail("bad dotted number '" + std::string(num_text) + "'");
      return std::nullopt;
    }
    pos_ = num_end == text_.npos ? text_.size() : num_end;
    skip_ws();

    FlatNode node{*number, {}, {}, line_};
    auto title = quoted();
    if (!title) return std::nullopt;
    node.title = std::move(*title);
    if (trim(node.title).empty()) {
      fail("empty title");
      return std::nullopt;
    }

    bool ok = true;
    while (true) {
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] == '#') break;
      const auto end = text_.find_first_of(" \t", pos_);
      const auto token = text_.substr(pos_, end == text_.npos ? text_.npos : end - pos_);
      pos_ = end == text_.npos ? text_.size() : end;
      if (token.substr(0, 3) != "cf=") {
        fail("unexpected token '" + std::string(token) + "'");
        ok = false;
        continue;
      }
      auto a = assignment(token.substr(3));
      if (a) {
        node.assignments.push_back(std::move(*a));
      } else {
        ok = false;
      }
    }
    if (!ok) return std::nullopt;
    return node;
  }

 private:
  void fail(std::string msg) { errors_.push_back(Diagnostic{line_, node_, std::move(msg)}); }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  std::optional<std::string> quoted() {
    if (pos_ >= text_.size() || text_[pos_] != '"') {
      fail("expected a quoted title");
      return std::nullopt;
    }
    ++pos_;
    std::string out;
    while (pos_ < text_.size()) {
      const char c = text_[pos_++];
      if (c == '"') return out;
      if (c == '\\') {
        if (pos_ >= text_.size()) break;
        const char e = text_[pos_++];
        if (e != '"' && e != '\\') {
          fail(std::string("bad escape '\\") + e + "' in title");
          return std::nullopt;
        }
        out += e;
      } else {
        out += c;
      }
    }
    fail("unterminated title");
    return std::nullopt;
  }

  // <Function>[:<GFT>][@<cfp>]
  std::optional<CfAssignment> assignment(std::string_view token) {
    std::optional<std::string_view> prob_text;
    if (auto at = token.find('@'); at != token.npos) {
      prob_text = token.substr(at + 1);
      token = token.substr(0, at);
    }
    std::optional<std::string_view> gft_text;
    if (auto colon = token.find(':'); colon != token.npos) {
      gft_text = token.substr(colon + 1);
      token = token.substr(0, colon);
    }
    auto function = parse_function(token);
    if (!function) {
      fail("unknown function '" + std::string(token) + "'");
      return std::nullopt;
    }
    CfAssignment a{*function, std::nullopt, std::nullopt};
    if (gft_text) {
      if (!is_gft_code(*gft_text)) {
        fail("unknown GFT token '" + std::string(*gft_text) + "'");
        return std::nullopt;
      }
      const char letter = gft_text->front();
      if (letter != function_letter(*function)) {
        auto owner = std::find_if(kAllFunctions.begin(), kAllFunctions.end(),
                                  [&](CognitiveFunction f) { return function_letter(f) == letter; });
        if (owner == kAllFunctions.end()) {
          fail("unknown GFT token '" + std::string(*gft_text) + "'");
        } else {
          fail("GFT " + std::string(*gft_text) + " belongs to " + std::string(to_string(*owner)));
        }
        return std::nullopt;
      }
      a.cff = std::string(*gft_text);
    }
    if (prob_text) {
      auto p = parse_probability_literal(*prob_text);
      if (!p) {
        fail("bad probability '" + std::string(*prob_text) + "'");
        return std::nullopt;
      }
      if (!valid_probability(*p)) {
        fail("probability must be in (0,1]");
        return std::nullopt;
      }
      a.cfp_override = *p;
    }
    return a;
  }

  std::string_view text_;
  std::size_t line_;
  std::vector<Diagnostic>& errors_;
  std::size_t pos_ = 0;
  std::string node_;
};

// Assembles flat nodes (any order that lists parents first) into a tree.
std::vector<TaskNode> assemble(std::vector<FlatNode> flat) {
  std::stable_sort(flat.begin(), flat.end(),
                   [](const FlatNode& a, const FlatNode& b) { return a.number < b.number; });
  std::vector<TaskNode> roots;
  std::vector<TaskNode*> stack;
  // Sorted order is pre-order, so each node's parent is on the stack.
  for (auto& f : flat) {
    while (!stack.empty() && !stack.back()->number.is_prefix_of(f.number)) stack.pop_back();
    auto& siblings = stack.empty() ? roots : stack.back()->children;
    siblings.push_back(TaskNode{std::move(f.number), std::move(f.title), std::move(f.assignments), {}});
    // Pointers into `siblings` stay valid: only the newest element's children grow.
    stack.push_back(&siblings.back());
  }
  return roots;
}

void apply_metadata(std::string_view directive, TreeMetadata& meta) {
  const auto colon = directive.find(':');
  if (colon == directive.npos) return;
  const auto key = trim(directive.substr(0, colon));
  const auto value = std::string(trim(directive.substr(colon + 1)));
  if (key == "name") {
    meta.name = value;
  } else if (key == "version") {
    meta.version = value;
  } else if (key == "notes") {
    if (!meta.notes.empty()) meta.notes += '\n';
    meta.notes += value;
  }
}

}  // namespace

Result<TaskTree> parse_hta(std::string_view text) {
  std::vector<Diagnostic> errors;
  TaskTree tree;
  std::vector<FlatNode> flat;
  std::set<TaskNumber> seen;
  std::map<TaskNumber, int> last_child;  // keyed by parent; roots under the empty number

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto raw = text.substr(pos, nl == text.npos ? text.npos : nl - pos);
    pos = nl == text.npos ? text.size() + 1 : nl + 1;
    ++line_no;
    auto line = trim(raw);
    if (line.empty()) continue;
    if (line.substr(0, 2) == "#@") {
      apply_metadata(line.substr(2), tree.metadata);
      continue;
    }
    if (line.front() == '#') continue;

    LineParser lp(line, line_no, errors);
    auto node = lp.parse();
    if (!node) continue;

    const auto& number = node->number;
    const auto key = number.str();
    if (seen.count(number) != 0) {
      errors.push_back({line_no, key, "duplicate number " + key});
      continue;
    }
    const auto parent = number.parent();
    if (!parent.empty() && seen.count(parent) == 0) {
      errors.push_back({line_no, key, "missing parent " + parent.str() + " for " + key});
      continue;
    }
    auto it = last_child.find(parent);
    if (it == last_child.end()) {
      // The first root may start anywhere so that a single step keeps its numbering.
      if (!parent.empty() && number.last() != 1) {
        errors.push_back({line_no, key,
                          "numbering gap: " + key + " is the first child of " + parent.str() +
                              " but must be " + parent.child(1).str()});
      }
    } else if (number.last() != it->second + 1) {
      const auto prev = parent.child(it->second).str();
      if (number.last() > it->second + 1) {
        errors.push_back({line_no, key, "numbering gap after " + prev});
      } else {
        errors.push_back({line_no, key, "out-of-order number " + key + " after " + prev});
      }
    }
    last_child[parent] = std::max(number.last(), it == last_child.end() ? 0 : it->second);
    seen.insert(number);
    flat.push_back(std::move(*node));
  }

  if (!errors.empty()) return errors;
  tree.roots = assemble(std::move(flat));
  return tree;
}

// ---------------------------------------------------------------------------
// Serializer

namespace {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

void write_nodes(const std::vector<TaskNode>& nodes, std::string& out) {
  for (const auto& n : nodes) {
    out += n.number.str();
    out += ' ';
    out += quote(n.title);
    for (const auto& a : n.assignments) {
      out += " cf=";
      out += to_string(a.function);
      if (a.cff) out += ":" + *a.cff;
      if (a.cfp_override) out += "@" + format_shortest(*a.cfp_override);
    }
    out += '\n';
    write_nodes(n.children, out);
  }
}

void write_lines(std::string_view key, std::string_view value, std::string& out) {
  std::size_t pos = 0;
  while (pos <= value.size()) {
    auto nl = value.find('\n', pos);
    out += "#@ ";
    out += key;
    out += ": ";
    out += value.substr(pos, nl == value.npos ? value.npos : nl - pos);
    out += '\n';
    if (nl == value.npos) break;
    pos = nl + 1;
  }
}

}  // namespace

std::string serialize_hta(const TaskTree& tree) {
  std::string out = "# creamkit task analysis v1\n";
  if (!tree.metadata.name.empty()) write_lines("name", tree.metadata.name, out);
  if (!tree.metadata.version.empty()) write_lines("version", tree.metadata.version, out);
  if (!tree.metadata.notes.empty()) write_lines("notes", tree.metadata.notes, out);
  write_nodes(tree.roots, out);
  return out;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void validate_nodes(const std::vector<TaskNode>& nodes, const TaskNumber& parent,
                    const Taxonomy& t, std::set<TaskNumber>& seen,
                    std::vector<Diagnostic>& out) {
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto& n = nodes[k];
    const auto key = n.number.str();
    auto fail = [&](std::string msg) { out.push_back(Diagnostic{0, key, std::move(msg)}); };

    if (n.number.empty() || n.number.parent() != parent) {
      fail("number " + key + " is not a child of " + (parent.empty() ? "the root" : parent.str()));
    } else if (k > 0 && n.number.last() != nodes[k - 1].number.last() + 1) {
      fail("numbering gap after " + nodes[k - 1].number.str());
    } else if (k == 0 && !parent.empty() && n.number.last() != 1) {
      fail("numbering gap: first child of " + parent.str() + " must be " + parent.child(1).str());
    }
    if (!seen.insert(n.number).second) fail("duplicate number " + key);
    if (trim(n.title).empty()) fail("empty title");
    if (n.title.find('\n') != std::string::npos) fail("title spans several lines");

    for (const auto& a : n.assignments) {
      const bool known_function =
          std::any_of(t.functions.begin(), t.functions.end(),
                      [&](const FunctionInfo& f) { return f.id == a.function; });
      if (!known_function) {
        fail("function " + std::string(to_string(a.function)) + " is not in the taxonomy");
      }
      if (a.cff) {
        const auto* g = t.find_failure_type(*a.cff);
        if (g == nullptr) {
          fail("unknown GFT " + *a.cff);
        } else if (g->function != a.function) {
          fail("GFT " + *a.cff + " belongs to " + std::string(to_string(g->function)));
        }
      }
      if (a.cfp_override && !valid_probability(*a.cfp_override)) {
        fail("probability must be in (0,1]");
      }
    }
    validate_nodes(n.children, n.number, t, seen, out);
  }
}

void collect(const std::vector<TaskNode>& nodes, std::vector<NumberedAssignment>& out) {
  for (const auto& n : nodes) {
    for (const auto& a : n.assignments) out.push_back({n.number, a});
    collect(n.children, out);
  }
}

}  // namespace

std::vector<Diagnostic> validate_hta(const TaskTree& tree, const Taxonomy& t) {
  std::vector<Diagnostic> out;
  std::set<TaskNumber> seen;
  validate_nodes(tree.roots, TaskNumber(), t, seen, out);
  return out;
}

std::vector<NumberedAssignment> collect_assignments(const TaskTree& tree) {
  std::vector<NumberedAssignment> out;
  collect(tree.roots, out);
  return out;
}

// ---------------------------------------------------------------------------
// JSON

std::string hta_to_json(const TaskTree& tree) { return codec::tree_to_json(tree).dump(2) + "\n"; }

Result<TaskTree> hta_from_json(std::string_view document) {
  auto j = nlohmann::json::parse(document, nullptr, false);
  if (j.is_discarded()) return std::vector<Diagnostic>{{0, "", "malformed JSON document"}};
  return codec::tree_from_json(j);
}

}  // namespace creamkit
