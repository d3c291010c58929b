#include "json_codec.hpp"

namespace creamkit::codec {

namespace {

template <class Enum, class Parser>
Enum enum_at(const json& j, const char* key, Parser parse) {
  const auto text = j.at(key).get<std::string>();
  auto v = parse(text);
  if (!v) throw Error(std::string("unknown value '") + text + "' for '" + key + "'");
  return *v;
}

TaskNumber number_at(const json& j, const char* key) {
  const auto text = j.at(key).get<std::string>();
  auto n = TaskNumber::parse(text);
  if (!n) throw Error("bad dotted number '" + text + "'");
  return *n;
}

json node_to_json(const TaskNode& n) {
  json assignments = json::array();
  for (const auto& a : n.assignments) {
    json e{{"function", to_string(a.function)}};
    if (a.cff) e["cff"] = *a.cff;
    if (a.cfp_override) e["cfp"] = *a.cfp_override;
    assignments.push_back(std::move(e));
  }
  json children = json::array();
  for (const auto& c : n.children) children.push_back(node_to_json(c));
  return {{"number", n.number.str()},
          {"title", n.title},
          {"assignments", assignments},
          {"children", children}};
}

TaskNode node_from_json(const json& j) {
  TaskNode n;
  n.number = number_at(j, "number");
  n.title = j.at("title").get<std::string>();
  if (j.contains("assignments")) {
    for (const auto& a : j.at("assignments")) {
      CfAssignment ca{enum_at<CognitiveFunction>(a, "function", parse_function), std::nullopt,
                      std::nullopt};
      if (a.contains("cff") && !a.at("cff").is_null()) ca.cff = a.at("cff").get<std::string>();
      if (a.contains("cfp") && !a.at("cfp").is_null()) ca.cfp_override = a.at("cfp").get<double>();
      n.assignments.push_back(std::move(ca));
    }
  }
  if (j.contains("children")) {
    for (const auto& c : j.at("children")) n.children.push_back(node_from_json(c));
  }
  return n;
}

}  // namespace

json tree_to_json(const TaskTree& tree) {
  json roots = json::array();
  for (const auto& r : tree.roots) roots.push_back(node_to_json(r));
  return {{"metadata",
           {{"name", tree.metadata.name},
            {"version", tree.metadata.version},
            {"notes", tree.metadata.notes}}},
          {"roots", roots}};
}

Result<TaskTree> tree_from_json(const json& j) {
  TaskTree tree;
  try {
    if (j.contains("metadata")) {
      const auto& m = j.at("metadata");
      tree.metadata.name = m.value("name", "");
      tree.metadata.version = m.value("version", "");
      tree.metadata.notes = m.value("notes", "");
    }
    for (const auto& r : j.at("roots")) tree.roots.push_back(node_from_json(r));
  } catch (const std::exception& e) {
    return std::vector<Diagnostic>{{0, "", std::string("malformed task analysis: ") + e.what()}};
  }
  // The text parser owns the structural rules; reuse it.
  auto reparsed = parse_hta(serialize_hta(tree));
  if (!reparsed) {
    std::vector<Diagnostic> errors;
    for (auto d : reparsed.errors()) {
      d.line = 0;
      errors.push_back(std::move(d));
    }
    return errors;
  }
  if (!(reparsed.value() == tree)) {
    return std::vector<Diagnostic>{{0, "", "nodes are not listed in numbering order"}};
  }
  return tree;
}

json assessment_to_json(const CpcAssessment& a) {
  json choices = json::object();
  for (const auto& [id, state] : a.choices()) choices[std::to_string(id)] = state;
  json j{{"label", a.label()}, {"choices", choices}};
  if (!a.timestamp().empty()) j["timestamp"] = a.timestamp();
  return j;
}

Result<AssessmentDraft> assessment_from_json(const json& j) {
  if (!j.is_object()) return std::vector<Diagnostic>{{0, "", "assessment must be a JSON object"}};
  AssessmentDraft d;
  std::vector<Diagnostic> errors;
  if (auto it = j.find("label"); it != j.end()) {
    if (it->is_string()) {
      d.label = it->get<std::string>();
    } else {
      errors.push_back({0, "label", "label must be a string"});
    }
  }
  if (auto it = j.find("timestamp"); it != j.end() && it->is_string()) {
    d.timestamp = it->get<std::string>();
  }
  auto it = j.find("choices");
  if (it == j.end() || !it->is_object()) {
    errors.push_back({0, "choices", "choices must be an object keyed by CPC id"});
    return errors;
  }
  for (const auto& [key, value] : it->items()) {
    auto n = TaskNumber::parse(key);
    if (!n || n->depth() != 1) {
      errors.push_back({0, key, "CPC id '" + key + "' is not a positive integer"});
      continue;
    }
    if (!value.is_string()) {
      errors.push_back({0, key, "state for CPC " + key + " must be a string"});
      continue;
    }
    d.choices[n->last()] = value.get<std::string>();
  }
  if (!errors.empty()) return errors;
  return d;
}

namespace {

json draft_to_json(const AssessmentDraft& d) {
  json choices = json::object();
  for (const auto& [id, state] : d.choices) choices[std::to_string(id)] = state;
  return {{"label", d.label}, {"timestamp", d.timestamp}, {"choices", choices}};
}

AssessmentDraft draft_from_json(const json& j) {
  auto d = assessment_from_json(j);
  if (!d) throw Error(to_string(d.errors().front()));
  return std::move(d).value();
}

json score_to_json(const CombinedScore& s) {
  return {{"reduce", s.reduce}, {"neutral", s.neutral}, {"improve", s.improve}};
}

HepInterval interval_from_json(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

json interval_to_json(const HepInterval& i) { return json::array({i.lower, i.upper}); }

json screening_to_json(const ScreeningResult& r) {
  return {{"score", score_to_json(r.score)},
          {"mode", to_string(r.mode)},
          {"interval", interval_to_json(r.interval)}};
}

ScreeningResult screening_from_json(const json& j) {
  const auto& s = j.at("score");
  return {{s.at("reduce").get<int>(), s.at("neutral").get<int>(), s.at("improve").get<int>()},
          enum_at<ControlMode>(j, "mode", parse_control_mode),
          interval_from_json(j.at("interval"))};
}

json assignment_result_to_json(const AssignmentResult& r) {
  return {{"node", r.node.str()},
          {"function", to_string(r.function)},
          {"cff", r.cff},
          {"nominal", r.nominal},
          {"adjusted_cfp", r.adjusted_cfp},
          {"source", to_string(r.source)}};
}

AssignmentResult assignment_result_from_json(const json& j) {
  const auto source = j.at("source").get<std::string>();
  if (source != "override" && source != "computed") throw Error("unknown source '" + source + "'");
  return {number_at(j, "node"),
          enum_at<CognitiveFunction>(j, "function", parse_function),
          j.at("cff").get<std::string>(),
          j.at("nominal").get<double>(),
          j.at("adjusted_cfp").get<double>(),
          source == "override" ? CfpSource::Override : CfpSource::Computed};
}

json profile_to_json(const DemandProfile& p) {
  json counts = json::object();
  for (auto f : kAllFunctions) counts[std::string(to_string(f))] = p.count(f);
  return {{"scope", p.scope ? json(p.scope->str()) : json(nullptr)},
          {"counts", counts},
          {"total", p.total()}};
}

DemandProfile profile_from_json(const json& j) {
  DemandProfile p;
  if (!j.at("scope").is_null()) p.scope = number_at(j, "scope");
  for (auto f : kAllFunctions) {
    p.counts[static_cast<std::size_t>(f)] = j.at("counts").at(std::string(to_string(f))).get<int>();
  }
  return p;
}

json extended_to_json(const ExtendedResult& r) {
  json per = json::array();
  for (const auto& a : r.per_assignment) per.push_back(assignment_result_to_json(a));
  json worst = json::array();
  for (const auto& a : r.per_node_worst) worst.push_back(assignment_result_to_json(a));
  return {{"per_assignment", per},
          {"per_node_worst", worst},
          {"profile", profile_to_json(r.profile)},
          {"aggregate_failure_p", r.aggregate_failure_p},
          {"aggregation", "independent"},
          {"context", draft_to_json(r.context)}};
}

ExtendedResult extended_from_json(const json& j) {
  ExtendedResult r;
  for (const auto& a : j.at("per_assignment")) r.per_assignment.push_back(assignment_result_from_json(a));
  for (const auto& a : j.at("per_node_worst")) r.per_node_worst.push_back(assignment_result_from_json(a));
  r.profile = profile_from_json(j.at("profile"));
  r.aggregate_failure_p = j.at("aggregate_failure_p").get<double>();
  r.context = draft_from_json(j.at("context"));
  return r;
}

json delta_to_json(const WhatIfDelta& d) {
  return {{"cpc_id", d.cpc_id},
          {"from_state", d.from_state},
          {"to_state", d.to_state},
          {"mode_before", to_string(d.mode_before)},
          {"mode_after", to_string(d.mode_after)},
          {"aggregate_before", d.aggregate_before},
          {"aggregate_after", d.aggregate_after},
          {"interval_before", interval_to_json(d.interval_before)},
          {"interval_after", interval_to_json(d.interval_after)}};
}

WhatIfDelta delta_from_json(const json& j) {
  return {j.at("cpc_id").get<int>(),
          j.at("from_state").get<std::string>(),
          j.at("to_state").get<std::string>(),
          enum_at<ControlMode>(j, "mode_before", parse_control_mode),
          enum_at<ControlMode>(j, "mode_after", parse_control_mode),
          j.at("aggregate_before").get<double>(),
          j.at("aggregate_after").get<double>(),
          interval_from_json(j.at("interval_before")),
          interval_from_json(j.at("interval_after"))};
}

}  // namespace creamkit::codec
