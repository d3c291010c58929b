#include "creamkit/screening.hpp"

#include <gtest/gtest.h>

#include "support.hpp"

namespace creamkit {
namespace {

const Taxonomy& T() { return default_taxonomy(); }

CpcAssessment load_fixture(const char* name) {
  auto r = parse_assessment(testing::read_file(testing::fixture_dir() / "assessments" / name), T());
  if (!r.ok()) throw Error(to_string(r.errors().front()));
  return *r;
}

TEST(Screening, BestWorstNeutralScores) {
  EXPECT_EQ(score_assessment(CpcAssessment::best(T()), T()), (CombinedScore{0, 2, 6}));
  EXPECT_EQ(score_assessment(CpcAssessment::worst(T()), T()), (CombinedScore{8, 0, 0}));
  EXPECT_EQ(score_assessment(CpcAssessment::neutral(T()), T()), (CombinedScore{0, 8, 0}));
}

TEST(Screening, FixtureAssessmentsMatchBuiltIns) {
  EXPECT_EQ(load_fixture("all_best.json").choices(), CpcAssessment::best(T()).choices());
  EXPECT_EQ(load_fixture("all_worst.json").choices(), CpcAssessment::worst(T()).choices());
  EXPECT_EQ(load_fixture("all_neutral.json").choices(), CpcAssessment::neutral(T()).choices());
}

TEST(Screening, ControlModeLookups) {
  EXPECT_EQ(determine_control_mode({8, 0, 0}, T()), ControlMode::Scrambled);
  EXPECT_EQ(determine_control_mode({0, 2, 6}, T()), ControlMode::Strategic);
  EXPECT_EQ(determine_control_mode({2, 5, 1}, T()), T().cocom.at(2, 1));
  EXPECT_EQ(determine_control_mode({2, 5, 1}, T()), ControlMode::Tactical);
  EXPECT_THROW(determine_control_mode({9, 0, 0}, T()), Error);
}

TEST(Screening, ScreenCoversAllFourModes) {
  const auto worst = screen(CpcAssessment::worst(T()), T());
  EXPECT_EQ(worst.mode, ControlMode::Scrambled);
  EXPECT_EQ(worst.interval, (HepInterval{0.1, 1.0}));

  const auto neutral = screen(CpcAssessment::neutral(T()), T());
  EXPECT_EQ(neutral.mode, ControlMode::Tactical);
  EXPECT_EQ(neutral.interval, (HepInterval{0.001, 0.1}));

  const auto best = screen(CpcAssessment::best(T()), T());
  EXPECT_EQ(best.mode, ControlMode::Strategic);
  EXPECT_EQ(best.interval, (HepInterval{0.00005, 0.01}));

  // Three Reduce choices, no Improve: s = -3.
  auto a = CpcAssessment::neutral(T());
  a = *a.with_choice(1, "Inappropriate", T());
  a = *a.with_choice(2, "More than capacity", T());
  a = *a.with_choice(3, "Incompatible", T());
  const auto opp = screen(a, T());
  EXPECT_EQ(opp.score, (CombinedScore{3, 5, 0}));
  EXPECT_EQ(opp.mode, ControlMode::Opportunistic);
  EXPECT_EQ(opp.interval, (HepInterval{0.01, 0.5}));
}

TEST(Screening, CreateRejectsMissingAndUnknown) {
  AssessmentDraft d = CpcAssessment::neutral(T()).draft();
  d.choices.erase(3);
  EXPECT_FALSE(CpcAssessment::create(d, T()).ok());

  d = CpcAssessment::neutral(T()).draft();
  d.choices[4] = "Whenever";
  auto r = CpcAssessment::create(d, T());
  ASSERT_FALSE(r.ok());
  EXPECT_NE(r.errors().front().message.find("Whenever"), std::string::npos);

  d = CpcAssessment::neutral(T()).draft();
  d.choices[9] = "Adequate";
  EXPECT_FALSE(CpcAssessment::create(d, T()).ok());
}

TEST(Screening, ParseRejectsMalformed) {
  EXPECT_FALSE(parse_assessment("{", T()).ok());
  EXPECT_FALSE(parse_assessment(R"({"choices": {"one": "x"}})", T()).ok());
  EXPECT_FALSE(parse_assessment(R"({"choices": []})", T()).ok());
}

TEST(Screening, SerializeRoundtrip) {
  const auto a = load_fixture("outage_peak.json");
  auto back = parse_assessment(serialize_assessment(a), T());
  ASSERT_TRUE(back.ok());
  EXPECT_EQ(*back, a);
  EXPECT_EQ(a.timestamp(), "2026-03-14T02:00:00Z");
}

/// Enumerates every assessment of the default catalog.
template <class F>
void for_each_assessment(F&& visit) {
  const auto& cpcs = T().cpcs;
  std::vector<std::size_t> idx(cpcs.size(), 0);
  while (true) {
    visit(idx);
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == cpcs[k].states.size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
}

TEST(Screening, ScoresAlwaysTotalEightAndIntervalsAgree) {
  std::size_t count = 0;
  for_each_assessment([&](const std::vector<std::size_t>& idx) {
    AssessmentDraft d;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      d.choices[T().cpcs[k].id] = T().cpcs[k].states[idx[k]].name;
    }
    auto a = CpcAssessment::create(d, T());
    ASSERT_TRUE(a.ok());
    const auto r = screen(*a, T());
    EXPECT_EQ(r.score.total(), 8);
    EXPECT_EQ(r.interval, T().interval(r.mode));
    ++count;
  });
  EXPECT_EQ(count, 11664U);
}

}  // namespace
}  // namespace creamkit
