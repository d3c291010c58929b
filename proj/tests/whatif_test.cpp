#include "creamkit/whatif.hpp"

#include <gtest/gtest.h>

#include "creamkit/extended.hpp"
#include "support.hpp"

namespace creamkit {
namespace {

const Taxonomy& T() { return default_taxonomy(); }

TaskTree computed_tree() {
  return *parse_hta(
      "1 \"Prepare\" cf=Planning cf=Observation\n"
      "1.1 \"Check film\" cf=Observation:O3 cf=Interpretation\n"
      "1.2 \"Record\" cf=Execution:E4\n");
}

TaskTree table4() {
  return *parse_hta(testing::read_file(testing::fixture_dir() / "table4.hta"));
}

const WhatIfDelta* find(const std::vector<WhatIfDelta>& sweep, int cpc, std::string_view to) {
  for (const auto& d : sweep) {
    if (d.cpc_id == cpc && d.to_state == to) return &d;
  }
  return nullptr;
}

TEST(WhatIf, SweepHasOneDeltaPerAlternativeState) {
  const auto sweep = single_cpc_sweep(computed_tree(), CpcAssessment::neutral(T()), T());
  std::size_t expected = 0;
  for (const auto& cpc : T().cpcs) expected += cpc.states.size() - 1;
  EXPECT_EQ(expected, 18U);
  EXPECT_EQ(sweep.size(), expected);
  for (const auto& d : sweep) EXPECT_NE(d.from_state, d.to_state);
}

TEST(WhatIf, SweepIsSortedByAggregateAfter) {
  const auto sweep = single_cpc_sweep(computed_tree(), CpcAssessment::neutral(T()), T());
  for (std::size_t k = 1; k < sweep.size(); ++k) {
    EXPECT_LE(sweep[k - 1].aggregate_after, sweep[k].aggregate_after);
  }
}

TEST(WhatIf, BeforeFieldsMatchBaseline) {
  const auto base = CpcAssessment::neutral(T());
  const auto tree = computed_tree();
  const auto screened = screen(base, T());
  const auto analysed = analyze(tree, base, T());
  for (const auto& d : single_cpc_sweep(tree, base, T())) {
    EXPECT_EQ(d.mode_before, screened.mode);
    EXPECT_EQ(d.interval_before, screened.interval);
    EXPECT_EQ(d.aggregate_before, analysed.aggregate_failure_p);
    EXPECT_EQ(d.from_state, base.state_of(d.cpc_id));
    auto moved = *base.with_choice(d.cpc_id, d.to_state, T());
    const auto after = screen(moved, T());
    EXPECT_EQ(d.mode_after, after.mode);
    EXPECT_EQ(d.interval_after, after.interval);
    EXPECT_EQ(d.aggregate_after, analyze(tree, moved, T()).aggregate_failure_p);
  }
}

TEST(WhatIf, NeutralBaselineSingleImproveStaysTactical) {
  const auto sweep = single_cpc_sweep(computed_tree(), CpcAssessment::neutral(T()), T());
  const auto* d = find(sweep, 4, "Adequate");
  ASSERT_NE(d, nullptr);
  EXPECT_EQ(d->mode_before, ControlMode::Tactical);
  EXPECT_EQ(d->mode_after, ControlMode::Tactical);
  auto moved = *CpcAssessment::neutral(T()).with_choice(4, "Adequate", T());
  EXPECT_EQ(score_assessment(moved, T()), (CombinedScore{0, 7, 1}));
}

TEST(WhatIf, ThirdImproveReachesStrategic) {
  auto base = *CpcAssessment::neutral(T()).with_choice(1, "Appropriate", T());
  base = *base.with_choice(3, "Advantageous", T());
  ASSERT_EQ(score_assessment(base, T()), (CombinedScore{0, 6, 2}));
  const auto sweep = single_cpc_sweep(computed_tree(), base, T());
  const auto* d = find(sweep, 4, "Adequate");
  ASSERT_NE(d, nullptr);
  EXPECT_EQ(d->mode_before, ControlMode::Tactical);
  EXPECT_EQ(d->mode_after, ControlMode::Strategic);
  EXPECT_EQ(d->interval_after, (HepInterval{0.00005, 0.01}));
}

TEST(WhatIf, BestBaselineCannotImprove) {
  const auto sweep = single_cpc_sweep(computed_tree(), CpcAssessment::best(T()), T());
  for (const auto& d : sweep) EXPECT_GE(d.aggregate_after, d.aggregate_before);
  EXPECT_FALSE(best_improvement(sweep).has_value());
}

TEST(WhatIf, BetterEffectNeverRaisesAggregate) {
  const auto tree = computed_tree();
  const auto base = CpcAssessment::neutral(T());
  for (const auto& d : single_cpc_sweep(tree, base, T())) {
    const auto* cpc = T().find_cpc(d.cpc_id);
    const auto from = cpc->find_state(d.from_state)->effect;
    const auto to = cpc->find_state(d.to_state)->effect;
    if (to > from) {
      EXPECT_LE(d.aggregate_after, d.aggregate_before);
      EXPECT_GE(d.mode_after, d.mode_before);
    }
  }
}

WhatIfDelta delta(int cpc, double after) {
  return WhatIfDelta{cpc, "a", "b", ControlMode::Tactical, ControlMode::Tactical, 0.5, after,
                     {0.001, 0.1}, {0.001, 0.1}};
}

TEST(WhatIf, BestImprovementSingleCandidate) {
  const std::vector<WhatIfDelta> sweep{delta(2, 0.4), delta(1, 0.5), delta(5, 0.6)};
  auto best = best_improvement(sweep);
  ASSERT_TRUE(best);
  EXPECT_EQ(best->cpc_id, 2);
}

TEST(WhatIf, BestImprovementTieGoesToLowestCpc) {
  const std::vector<WhatIfDelta> sweep{delta(6, 0.3), delta(3, 0.3), delta(4, 0.35)};
  auto best = best_improvement(sweep);
  ASSERT_TRUE(best);
  EXPECT_EQ(best->cpc_id, 3);
}

TEST(WhatIf, BestImprovementEmpty) { EXPECT_FALSE(best_improvement({}).has_value()); }

TEST(WhatIf, OverrideOnlyTreeIsFlat) {
  const auto sweep = single_cpc_sweep(table4(), CpcAssessment::neutral(T()), T());
  EXPECT_EQ(sweep.size(), 18U);
  EXPECT_TRUE(sweep_is_flat(sweep));
  EXPECT_FALSE(best_improvement(sweep).has_value());
  // With a flat aggregate the order falls back to the resulting mode.
  for (std::size_t k = 1; k < sweep.size(); ++k) {
    EXPECT_GE(sweep[k - 1].mode_after, sweep[k].mode_after);
  }
  EXPECT_FALSE(sweep_is_flat(single_cpc_sweep(computed_tree(), CpcAssessment::neutral(T()), T())));
}

TEST(WhatIf, MixedContextFindsImprovement) {
  auto base = *parse_assessment(
      testing::read_file(testing::fixture_dir() / "assessments" / "outage_peak.json"), T());
  const auto sweep = single_cpc_sweep(computed_tree(), base, T());
  auto best = best_improvement(sweep);
  ASSERT_TRUE(best);
  EXPECT_LT(best->aggregate_after, best->aggregate_before);
  for (const auto& d : sweep) EXPECT_GE(d.aggregate_after, best->aggregate_after);
}

}  // namespace
}  // namespace creamkit
