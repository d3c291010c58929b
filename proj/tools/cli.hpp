#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "creamkit/api.hpp"
#include "creamkit/taxonomy.hpp"

namespace creamkit::cli {

enum ExitCode : int { kOk = 0, kValidationFailure = 1, kIoOrParseFailure = 2 };

/// Process environment the CLI reads, injected so tests control it.
struct Environment {
  std::optional<std::string> taxonomy_path;    // CREAMKIT_TAXONOMY
  std::optional<std::string> projects_dir;     // CREAMKIT_PROJECTS
  std::optional<std::string> source_date_epoch;  // SOURCE_DATE_EPOCH

  static Environment from_process();
};

/// Runs one invocation. `args` excludes the program name.
int execute_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
                    const Environment& env = {});

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path projects_dir = "projects";
  /// Called with the bound port once the server is listening.
  std::function<void(int)> on_listening;
  /// Polled to stop the server; nullptr runs until the process exits.
  const std::atomic<bool>* stop = nullptr;
};

/// Blocks while serving. Returns an exit code; binding and directory errors
/// are reported on `err`.
int serve_api(const ServeOptions& options, const Taxonomy& taxonomy, std::ostream& log,
              std::ostream& err);

}  // namespace creamkit::cli
