#pragma once

// Analyst projects persisted as one JSON file each, with optimistic
// concurrency on a revision counter.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "creamkit/hta.hpp"
#include "creamkit/screening.hpp"
#include "creamkit/taxonomy.hpp"

namespace creamkit {

struct NamedAssessment {
  std::string name;
  AssessmentDraft assessment;

  bool operator==(const NamedAssessment&) const = default;
};

struct Project {
  std::string id;
  TaskTree hta;
  std::vector<NamedAssessment> assessments;
  std::optional<Taxonomy> taxonomy_override;
  std::string notes;
  std::uint64_t revision = 0;

  bool operator==(const Project&) const = default;
};

/// Lowercase slug: [a-z0-9][a-z0-9_-]{0,63}
bool valid_project_id(std::string_view id);

std::string project_to_json(const Project& p);
Result<Project> project_from_json(std::string_view document);

class ProjectConflict : public Error {
 public:
  using Error::Error;
};

class ProjectNotFound : public Error {
 public:
  using Error::Error;
};

class ProjectStore {
 public:
  /// Creates `dir` if needed. Throws Error when it cannot be created.
  explicit ProjectStore(std::filesystem::path dir);

  /// Writes `p` as revision p.revision + 1 (write-temp-then-rename) and
  /// returns the stored project. Throws ProjectConflict when the stored
  /// revision is already at or past that number.
  Project save(const Project& p) const;
  /// Throws ProjectNotFound for unknown ids.
  Project load(std::string_view id) const;
  bool exists(std::string_view id) const;
  std::vector<std::string> list() const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path file_for(std::string_view id) const;
  std::filesystem::path dir_;
};

}  // namespace creamkit
