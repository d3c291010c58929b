#include "creamkit/taxonomy.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "json.hpp"
#include "support.hpp"

namespace creamkit {
namespace {

using nlohmann::json;

TEST(Taxonomy, NominalValuesMatchReferenceTable) {
  const auto& t = default_taxonomy();
  const std::vector<std::pair<std::string, double>> expected = {
      {"O1", 0.001}, {"O2", 0.007}, {"O3", 0.007}, {"I1", 0.02},  {"I2", 0.01},
      {"I3", 0.01},  {"P1", 0.01},  {"P2", 0.01},  {"E1", 0.003}, {"E2", 0.003},
      {"E3", 0.0005}, {"E4", 0.003}, {"E5", 0.003}};
  ASSERT_EQ(t.failure_types.size(), expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k) {
    EXPECT_EQ(t.failure_types[k].id, expected[k].first);
    EXPECT_EQ(nominal_cfp(t, expected[k].first), expected[k].second) << expected[k].first;
  }
}

TEST(Taxonomy, FailureTypesBelongToTheirLetterFunction) {
  for (const auto& g : default_taxonomy().failure_types) {
    EXPECT_EQ(g.id.front(), function_letter(g.function)) << g.id;
  }
}

TEST(Taxonomy, UnknownCodeThrows) {
  EXPECT_THROW(nominal_cfp(default_taxonomy(), "X9"), Error);
}

TEST(Taxonomy, ControlModeIntervals) {
  const auto& t = default_taxonomy();
  EXPECT_EQ(t.interval(ControlMode::Strategic), (HepInterval{0.00005, 0.01}));
  EXPECT_EQ(t.interval(ControlMode::Tactical), (HepInterval{0.001, 0.1}));
  EXPECT_EQ(t.interval(ControlMode::Opportunistic), (HepInterval{0.01, 0.5}));
  EXPECT_EQ(t.interval(ControlMode::Scrambled), (HepInterval{0.1, 1.0}));
}

TEST(Taxonomy, CpcCatalogStatesAndEffects) {
  using E = Effect;
  const std::vector<std::vector<std::pair<std::string, Effect>>> expected = {
      {{"Appropriate", E::Improve}, {"Acceptable", E::Neutral}, {"Inappropriate", E::Reduce}},
      {{"Less than capacity", E::Neutral}, {"At capacity", E::Neutral}, {"More than capacity", E::Reduce}},
      {{"Advantageous", E::Improve}, {"Compatible", E::Neutral}, {"Incompatible", E::Reduce}},
      {{"Adequate", E::Improve}, {"Temporarily inadequate", E::Neutral}, {"Continually inadequate", E::Reduce}},
      {{"Adequate, verified", E::Neutral}, {"Satisfactory", E::Neutral}, {"Inadequate", E::Reduce}},
      {{"Adequate training, experienced", E::Improve},
       {"Adequate training, little experience", E::Neutral},
       {"Inadequate", E::Reduce}},
      {{"Very efficient", E::Improve}, {"Efficient", E::Neutral}, {"Inefficient", E::Reduce},
       {"Undesirable", E::Reduce}},
      {{"Day, mid-week", E::Neutral}, {"Day, early or late week", E::Neutral},
       {"Night, mid-week", E::Improve}, {"Night, beginning or end of week", E::Reduce}}};
  const auto& t = default_taxonomy();
  ASSERT_EQ(t.cpcs.size(), 8U);
  for (std::size_t k = 0; k < expected.size(); ++k) {
    const auto& cpc = t.cpcs[k];
    EXPECT_EQ(cpc.id, static_cast<int>(k) + 1);
    ASSERT_EQ(cpc.states.size(), expected[k].size()) << "CPC " << cpc.id;
    for (std::size_t s = 0; s < expected[k].size(); ++s) {
      EXPECT_EQ(cpc.states[s].name, expected[k][s].first);
      EXPECT_EQ(cpc.states[s].effect, expected[k][s].second) << cpc.states[s].name;
    }
  }
}

TEST(Taxonomy, CpcFiveHasNoImproveState) {
  const auto* cpc = default_taxonomy().find_cpc(5);
  ASSERT_NE(cpc, nullptr);
  for (const auto& s : cpc->states) EXPECT_NE(s.effect, Effect::Improve);
}

TEST(Taxonomy, MaximaFromEffectScan) {
  const auto& t = default_taxonomy();
  int improve = 0;
  int reduce = 0;
  for (const auto& cpc : t.cpcs) {
    bool has_improve = false;
    bool has_reduce = false;
    for (const auto& s : cpc.states) {
      has_improve |= s.effect == Effect::Improve;
      has_reduce |= s.effect == Effect::Reduce;
    }
    improve += has_improve ? 1 : 0;
    reduce += has_reduce ? 1 : 0;
  }
  EXPECT_EQ(improve, 6);
  EXPECT_EQ(reduce, 8);
  EXPECT_EQ(max_improve_sum(t), improve);
  EXPECT_EQ(max_reduce_sum(t), reduce);
}

TEST(Taxonomy, DefaultIsValid) { EXPECT_TRUE(validate_taxonomy(default_taxonomy()).empty()); }

TEST(Taxonomy, DefaultGridBands) {
  const auto& grid = default_taxonomy().cocom;
  ASSERT_EQ(grid.rows(), 9);
  ASSERT_EQ(grid.cols(), 7);
  for (int r = 0; r < grid.rows(); ++r) {
    for (int i = 0; i < grid.cols(); ++i) {
      const int s = i - r;
      const ControlMode want = s <= -6   ? ControlMode::Scrambled
                               : s <= -2 ? ControlMode::Opportunistic
                               : s <= 2  ? ControlMode::Tactical
                                         : ControlMode::Strategic;
      EXPECT_EQ(grid.at(r, i), want) << r << "," << i;
    }
  }
  EXPECT_TRUE(testing::monotone_by_pairwise_scan(grid.rows(), grid.cols(), grid.cells()));
}

TEST(Taxonomy, DefaultWeights) {
  const auto& t = default_taxonomy();
  for (const auto& cpc : t.cpcs) {
    for (const auto& s : cpc.states) {
      for (auto f : kAllFunctions) {
        const double want = s.effect == Effect::Improve  ? 0.5
                            : s.effect == Effect::Reduce ? 5.0
                                                         : 1.0;
        EXPECT_EQ(t.weights.weight(cpc.id, s.name, f), want);
      }
    }
  }
}

TEST(Taxonomy, ActivityMapCoversFifteenActivities) {
  const auto& t = default_taxonomy();
  EXPECT_EQ(t.activity_map.size(), 15U);
  EXPECT_EQ(function_for_activity(t, "diagnose"), CognitiveFunction::Interpretation);
  EXPECT_EQ(function_for_activity(t, "scan"), CognitiveFunction::Observation);
  EXPECT_EQ(function_for_activity(t, "coordinate"), CognitiveFunction::Planning);
  EXPECT_EQ(function_for_activity(t, "record"), CognitiveFunction::Execution);
  EXPECT_FALSE(function_for_activity(t, "daydream").has_value());
}

TEST(Taxonomy, SerializeLoadRoundtrip) {
  const auto text = serialize_taxonomy(default_taxonomy());
  auto loaded = load_taxonomy(text);
  ASSERT_TRUE(loaded.ok()) << to_string(loaded.errors().front());
  EXPECT_EQ(*loaded, default_taxonomy());
  EXPECT_EQ(serialize_taxonomy(*loaded), text);
}

TEST(Taxonomy, ShippedReferenceFileMatchesBuiltIn) {
  const auto text = testing::read_file(CREAMKIT_DEFAULT_TAXONOMY_FILE);
  auto loaded = load_taxonomy(text);
  ASSERT_TRUE(loaded.ok());
  EXPECT_EQ(*loaded, default_taxonomy());
}

bool has_message(const std::vector<Diagnostic>& ds, std::string_view needle) {
  for (const auto& d : ds) {
    if (d.message.find(needle) != std::string::npos) return true;
  }
  return false;
}

json default_doc() { return json::parse(serialize_taxonomy(default_taxonomy())); }

TEST(Taxonomy, RejectsOutOfRangeNominal) {
  auto doc = default_doc();
  doc["failure_types"][0]["nominal_cfp"] = 1.5;
  auto r = load_taxonomy(doc.dump());
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(has_message(r.errors(), "probability out of range"));
}

TEST(Taxonomy, RejectsNonMonotoneGrid) {
  auto doc = default_doc();
  doc["cocom_grid"][0][0] = "Scrambled";
  doc["cocom_grid"][1][0] = "Tactical";
  auto r = load_taxonomy(doc.dump());
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(has_message(r.errors(), "non-monotone COCOM grid"));
}

TEST(Taxonomy, RejectsNonTotalGrid) {
  auto doc = default_doc();
  doc["cocom_grid"][3].erase(doc["cocom_grid"][3].size() - 1);
  auto r = load_taxonomy(doc.dump());
  ASSERT_FALSE(r.ok());
}

TEST(Taxonomy, RejectsDuplicateIds) {
  auto doc = default_doc();
  doc["failure_types"][1]["id"] = "O1";
  auto r = load_taxonomy(doc.dump());
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(has_message(r.errors(), "duplicate"));
}

TEST(Taxonomy, RejectsMalformedDocument) {
  auto r = load_taxonomy("{ not json");
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(has_message(r.errors(), "malformed"));
}

TEST(Taxonomy, ReportsEveryViolation) {
  auto doc = default_doc();
  doc["failure_types"][0]["nominal_cfp"] = 1.5;
  doc["failure_types"][2]["nominal_cfp"] = 0.0;
  doc["cocom_grid"][0][0] = "Scrambled";
  auto r = load_taxonomy(doc.dump());
  ASSERT_FALSE(r.ok());
  EXPECT_GE(r.errors().size(), 3U);
}

TEST(Taxonomy, ScoreBandGridsAreMonotone) {
  for (int o = -8; o <= 6; ++o) {
    for (int t = o; t <= 6; ++t) {
      for (int s = t; s <= 7; ++s) {
        const auto g = CocomMap::from_score_bands(8, 6, o, t, s);
        EXPECT_TRUE(testing::monotone_by_pairwise_scan(g.rows(), g.cols(), g.cells()));
      }
    }
  }
}

TEST(Taxonomy, RandomGridMonotonicityAgreesWithPairwiseScan) {
  std::mt19937_64 rng(0x5eed);
  int monotone_seen = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const int rows = 1 + static_cast<int>(rng() % 5);
    const int cols = 1 + static_cast<int>(rng() % 5);
    std::vector<ControlMode> cells(static_cast<std::size_t>(rows * cols));
    if (trial % 2 == 0) {
      // Monotone by construction: mode is a non-decreasing function of
      // (improve - reduce) plus a little noise that keeps the order.
      for (int r = 0; r < rows; ++r) {
        for (int i = 0; i < cols; ++i) {
          const int s = std::clamp(i - r + 2, 0, 3);
          cells[static_cast<std::size_t>(r * cols + i)] = kAllModes[static_cast<std::size_t>(s)];
        }
      }
      const auto r0 = static_cast<std::size_t>(rng() % cells.size());
      cells[r0] = kAllModes[rng() % 4];
    } else {
      for (auto& c : cells) c = kAllModes[rng() % 4];
    }
    const bool oracle = testing::monotone_by_pairwise_scan(rows, cols, cells);
    monotone_seen += oracle ? 1 : 0;
    const CocomMap grid(rows, cols, cells);
    bool reported = false;
    for (const auto& m : grid.check()) {
      if (m.find("non-monotone") != std::string::npos) reported = true;
    }
    EXPECT_EQ(!reported, oracle) << "trial " << trial;
  }
  EXPECT_GT(monotone_seen, 100);
}

TEST(Taxonomy, GridLookupOutsideBoundsThrows) {
  EXPECT_THROW(default_taxonomy().cocom.at(9, 0), Error);
  EXPECT_THROW(default_taxonomy().cocom.at(0, 7), Error);
  EXPECT_THROW(default_taxonomy().cocom.at(-1, 0), Error);
}

TEST(Taxonomy, ParseNames) {
  EXPECT_EQ(parse_function("Observer"), CognitiveFunction::Observation);
  EXPECT_EQ(parse_function("Planning"), CognitiveFunction::Planning);
  EXPECT_FALSE(parse_function("Dreaming").has_value());
  EXPECT_EQ(parse_control_mode("Tactical"), ControlMode::Tactical);
  EXPECT_EQ(parse_effect("Reduce"), Effect::Reduce);
}

}  // namespace
}  // namespace creamkit
