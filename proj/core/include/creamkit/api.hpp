#pragma once

// Request handling for the analyst console's HTTP API. Transport-free:
// the HTTP server and the tests both drive ApiService::handle directly.

#include <filesystem>
#include <string>

#include "creamkit/project.hpp"
#include "creamkit/taxonomy.hpp"

namespace creamkit {

struct ApiRequest {
  std::string method;
  std::string path;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::string taxonomy_version;
};

/// Problem document: {"code", "message", "details": [...]}.
ApiResponse problem(int status, std::string_view code, std::string_view message,
                    const std::vector<Diagnostic>& details = {});

class ApiService {
 public:
  /// `taxonomy` is the service-wide default (env path or built-in); requests
  /// and projects may override it.
  ApiService(std::filesystem::path projects_dir, Taxonomy taxonomy);

  ApiResponse handle(const ApiRequest& request) const;

  const Taxonomy& taxonomy() const { return taxonomy_; }
  const ProjectStore& store() const { return store_; }

 private:
  ProjectStore store_;
  Taxonomy taxonomy_;
};

/// Built-in landing page served at "/".
std::string_view console_page();

}  // namespace creamkit
