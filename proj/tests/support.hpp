#pragma once

// Test-only oracles and generators. Nothing here calls into the code path
// it is used to check.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "creamkit/hta.hpp"
#include "creamkit/taxonomy.hpp"

namespace creamkit::testing {

inline std::filesystem::path fixture_dir() { return CREAMKIT_FIXTURE_DIR; }
inline std::filesystem::path golden_dir() { return CREAMKIT_GOLDEN_DIR; }

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// P(at least one failure) by summing the probability of every
/// failure/success outcome vector that contains a failure.
inline double brute_force_any_failure(const std::vector<double>& p) {
  const std::size_t n = p.size();
  double total = 0.0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    double prob = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      prob *= (mask >> k) & 1U ? p[k] : 1.0 - p[k];
    }
    total += prob;
  }
  return total;
}

/// Pairwise scan: every pair of cells ordered by (reduce >=, improve <=)
/// must have non-increasing mode.
inline bool monotone_by_pairwise_scan(int rows, int cols, const std::vector<ControlMode>& cells) {
  auto at = [&](int r, int i) { return cells[static_cast<std::size_t>(r * cols + i)]; };
  for (int r1 = 0; r1 < rows; ++r1) {
    for (int i1 = 0; i1 < cols; ++i1) {
      for (int r2 = r1; r2 < rows; ++r2) {
        for (int i2 = 0; i2 <= i1; ++i2) {
          if (at(r2, i2) > at(r1, i1)) return false;
        }
      }
    }
  }
  return true;
}

/// Random structurally valid task tree. Codes and functions agree by
/// construction so trees also validate against the default taxonomy.
inline TaskTree random_tree(std::mt19937_64& rng) {
  static const char* kWords[] = {"check", "film", "density", "record", "weld", "the",
                                 "\"IQI\"", "a\\b", "report", "#3", "overlap", "(step)"};
  static const std::vector<std::vector<std::string>> kCodes = {
      {"O1", "O2", "O3"}, {"I1", "I2", "I3"}, {"P1", "P2"}, {"E1", "E2", "E3", "E4", "E5"}};
  static const double kProbs[] = {0.07, 0.01, 0.003, 0.0005, 1.0, 0.123456789, 1e-7};

  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  auto title = [&] {
    std::string t;
    const int words = 1 + pick(6);
    for (int k = 0; k < words; ++k) {
      if (k > 0) t += ' ';
      t += kWords[pick(static_cast<int>(std::size(kWords)))];
    }
    return t;
  };
  auto assignments = [&] {
    std::vector<CfAssignment> out;
    const int n = pick(4);
    for (int k = 0; k < n; ++k) {
      const int f = pick(4);
      CfAssignment a{kAllFunctions[static_cast<std::size_t>(f)], std::nullopt, std::nullopt};
      if (pick(3) != 0) a.cff = kCodes[static_cast<std::size_t>(f)][static_cast<std::size_t>(pick(static_cast<int>(kCodes[static_cast<std::size_t>(f)].size())))];
      if (pick(2) == 0) a.cfp_override = kProbs[pick(static_cast<int>(std::size(kProbs)))];
      out.push_back(std::move(a));
    }
    return out;
  };

  std::function<void(TaskNode&, int)> grow = [&](TaskNode& node, int depth) {
    if (depth >= 4) return;
    const int kids = pick(depth == 0 ? 5 : 4);
    for (int k = 1; k <= kids; ++k) {
      TaskNode child{node.number.child(k), title(), assignments(), {}};
      grow(child, depth + 1);
      node.children.push_back(std::move(child));
    }
  };

  TaskTree tree;
  if (pick(4) == 0) tree.metadata.name = title();
  if (pick(4) == 0) tree.metadata.version = std::to_string(pick(100));
  if (pick(4) == 0) tree.metadata.notes = title() + "\n" + title();
  const int first = 1 + pick(4);
  const int roots = pick(4);
  for (int k = 0; k < roots; ++k) {
    TaskNode root{TaskNumber({first + k}), title(), assignments(), {}};
    grow(root, 0);
    tree.roots.push_back(std::move(root));
  }
  return tree;
}

}  // namespace creamkit::testing
