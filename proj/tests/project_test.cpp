#include "creamkit/project.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <barrier>
#include <thread>

#include "support.hpp"

namespace creamkit {
namespace {

class ProjectStoreTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("creamkit_projects_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::remove_all(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  static Project sample() {
    Project p;
    p.id = "site-a_2026";
    p.hta = *parse_hta(testing::read_file(testing::fixture_dir() / "table4.hta"));
    p.assessments.push_back({"night shift", CpcAssessment::worst(default_taxonomy()).draft()});
    p.assessments.push_back({"baseline", CpcAssessment::neutral(default_taxonomy()).draft()});
    p.notes = "outage 2026\nroom B";
    return p;
  }

  std::filesystem::path dir_;
};

TEST_F(ProjectStoreTest, SaveThenLoad) {
  ProjectStore store(dir_);
  const auto p = sample();
  const auto saved = store.save(p);
  EXPECT_EQ(saved.revision, p.revision + 1);
  const auto loaded = store.load(p.id);
  EXPECT_EQ(loaded, saved);
  Project expect = p;
  expect.revision = 1;
  EXPECT_EQ(loaded, expect);
  EXPECT_TRUE(store.exists(p.id));
  EXPECT_EQ(store.list(), std::vector<std::string>{p.id});
}

TEST_F(ProjectStoreTest, TaxonomyOverrideSurvives) {
  ProjectStore store(dir_);
  auto p = sample();
  Taxonomy t = default_taxonomy();
  t.version = "site-a-1";
  t.weights.set(1, "Inappropriate", CognitiveFunction::Observation, 10.0);
  p.taxonomy_override = t;
  store.save(p);
  EXPECT_EQ(store.load(p.id).taxonomy_override, t);
}

TEST_F(ProjectStoreTest, SuccessiveSavesBumpRevision) {
  ProjectStore store(dir_);
  auto p = store.save(sample());
  p.notes = "edited";
  p = store.save(p);
  EXPECT_EQ(p.revision, 2U);
  EXPECT_EQ(store.load(p.id).notes, "edited");
}

TEST_F(ProjectStoreTest, StaleSaveConflicts) {
  ProjectStore store(dir_);
  const auto base = store.save(sample());
  store.save(base);
  EXPECT_THROW(store.save(base), ProjectConflict);
  EXPECT_EQ(store.load(base.id).revision, 2U);
}

TEST_F(ProjectStoreTest, RacingSavesExactlyOneWins) {
  ProjectStore store(dir_);
  const auto base = store.save(sample());
  for (int round = 0; round < 20; ++round) {
    const auto current = store.load(base.id);
    constexpr int kThreads = 8;
    std::atomic<int> wins{0};
    std::atomic<int> conflicts{0};
    std::barrier sync(kThreads);
    std::vector<std::thread> threads;
    for (int k = 0; k < kThreads; ++k) {
      threads.emplace_back([&, k] {
        Project mine = current;
        mine.notes = "writer " + std::to_string(k);
        sync.arrive_and_wait();
        try {
          store.save(mine);
          ++wins;
        } catch (const ProjectConflict&) {
          ++conflicts;
        }
      });
    }
    for (auto& t : threads) t.join();
    EXPECT_EQ(wins.load(), 1);
    EXPECT_EQ(conflicts.load(), kThreads - 1);
    EXPECT_EQ(store.load(base.id).revision, current.revision + 1);
  }
}

TEST_F(ProjectStoreTest, UnknownIdIsMissing) {
  ProjectStore store(dir_);
  EXPECT_THROW(store.load("nope"), ProjectNotFound);
  EXPECT_FALSE(store.exists("nope"));
}

TEST_F(ProjectStoreTest, NoTempFilesLeftBehind) {
  ProjectStore store(dir_);
  store.save(sample());
  for (const auto& e : std::filesystem::directory_iterator(dir_)) {
    const auto ext = e.path().extension().string();
    EXPECT_TRUE(ext == ".json" || ext == ".lock") << e.path();
  }
}

TEST(ProjectId, Slugs) {
  EXPECT_TRUE(valid_project_id("a"));
  EXPECT_TRUE(valid_project_id("site-a_2026"));
  EXPECT_FALSE(valid_project_id(""));
  EXPECT_FALSE(valid_project_id("-a"));
  EXPECT_FALSE(valid_project_id("A"));
  EXPECT_FALSE(valid_project_id("../etc"));
  EXPECT_FALSE(valid_project_id(std::string(65, 'a')));
  EXPECT_TRUE(valid_project_id(std::string(64, 'a')));
}

TEST(ProjectJson, RejectsMalformed) {
  EXPECT_FALSE(project_from_json("[").ok());
  EXPECT_FALSE(project_from_json(R"({"id": "Bad Id"})").ok());
  EXPECT_FALSE(project_from_json(R"({"id": "ok", "assessments": 3})").ok());
}

}  // namespace
}  // namespace creamkit
