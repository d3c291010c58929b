#include "creamkit/screening.hpp"

#include <algorithm>

#include "json_codec.hpp"

namespace creamkit {

std::vector<Diagnostic> check_assessment(const AssessmentDraft& draft, const Taxonomy& t) {
  std::vector<Diagnostic> out;
  for (const auto& cpc : t.cpcs) {
    auto it = draft.choices.find(cpc.id);
    const auto where = "cpc " + std::to_string(cpc.id);
    if (it == draft.choices.end()) {
      out.push_back({0, where, "missing CPC " + std::to_string(cpc.id) + " (" + cpc.name + ")"});
    } else if (cpc.find_state(it->second) == nullptr) {
      out.push_back({0, where, "unknown state '" + it->second + "' for CPC " +
                                   std::to_string(cpc.id)});
    }
  }
  for (const auto& [id, state] : draft.choices) {
    if (t.find_cpc(id) == nullptr) {
      out.push_back({0, "cpc " + std::to_string(id), "unknown CPC " + std::to_string(id)});
    }
  }
  return out;
}

Result<CpcAssessment> CpcAssessment::create(AssessmentDraft draft, const Taxonomy& t) {
  auto errors = check_assessment(draft, t);
  if (!errors.empty()) return errors;
  return CpcAssessment(std::move(draft));
}

namespace {

CpcAssessment pick(const Taxonomy& t, const std::string& label, bool best) {
  AssessmentDraft d;
  d.label = label;
  for (const auto& cpc : t.cpcs) {
    auto it = best ? std::max_element(cpc.states.begin(), cpc.states.end(),
                                      [](const CpcState& a, const CpcState& b) {
                                        return a.effect < b.effect;
                                      })
                   : std::min_element(cpc.states.begin(), cpc.states.end(),
                                      [](const CpcState& a, const CpcState& b) {
                                        return a.effect < b.effect;
                                      });
    d.choices[cpc.id] = it->name;
  }
  return CpcAssessment::create(std::move(d), t).value();
}

}  // namespace

CpcAssessment CpcAssessment::best(const Taxonomy& t) { return pick(t, "all-best", true); }

CpcAssessment CpcAssessment::worst(const Taxonomy& t) { return pick(t, "all-worst", false); }

CpcAssessment CpcAssessment::neutral(const Taxonomy& t) {
  AssessmentDraft d;
  d.label = "all-neutral";
  for (const auto& cpc : t.cpcs) {
    auto it = std::find_if(cpc.states.begin(), cpc.states.end(),
                           [](const CpcState& s) { return s.effect == Effect::Neutral; });
    if (it == cpc.states.end()) {
      throw Error("CPC " + std::to_string(cpc.id) + " has no Neutral state");
    }
    d.choices[cpc.id] = it->name;
  }
  return CpcAssessment::create(std::move(d), t).value();
}

Result<CpcAssessment> CpcAssessment::with_choice(int cpc, std::string state,
                                                 const Taxonomy& t) const {
  auto d = draft_;
  d.choices[cpc] = std::move(state);
  return create(std::move(d), t);
}

const std::string& CpcAssessment::state_of(int cpc) const {
  auto it = draft_.choices.find(cpc);
  if (it == draft_.choices.end()) throw Error("assessment has no choice for CPC " + std::to_string(cpc));
  return it->second;
}

Result<CpcAssessment> parse_assessment(std::string_view json_text, const Taxonomy& t) {
  auto j = nlohmann::json::parse(json_text, nullptr, false);
  if (j.is_discarded()) return std::vector<Diagnostic>{{0, "", "malformed JSON document"}};
  auto draft = codec::assessment_from_json(j);
  if (!draft) return draft.errors();
  return CpcAssessment::create(std::move(draft).value(), t);
}

std::string serialize_assessment(const CpcAssessment& a) {
  return codec::assessment_to_json(a).dump(2) + "\n";
}

CombinedScore score_assessment(const CpcAssessment& a, const Taxonomy& t) {
  auto errors = check_assessment(a.draft(), t);
  if (!errors.empty()) throw Error("assessment does not fit the taxonomy: " + to_string(errors.front()));
  CombinedScore s;
  for (const auto& cpc : t.cpcs) {
    switch (cpc.find_state(a.state_of(cpc.id))->effect) {
      case Effect::Reduce: ++s.reduce; break;
      case Effect::Neutral: ++s.neutral; break;
      case Effect::Improve: ++s.improve; break;
    }
  }
  return s;
}

ControlMode determine_control_mode(const CombinedScore& s, const Taxonomy& t) {
  return t.cocom.at(s.reduce, s.improve);
}

ScreeningResult screen(const CpcAssessment& a, const Taxonomy& t) {
  const auto score = score_assessment(a, t);
  const auto mode = determine_control_mode(score, t);
  return ScreeningResult{score, mode, t.interval(mode)};
}

}  // namespace creamkit
