#include "creamkit/api.hpp"

#include <optional>
#include <variant>

#include "creamkit/extended.hpp"
#include "creamkit/whatif.hpp"
#include "json_codec.hpp"

namespace creamkit {

using nlohmann::json;

namespace {

constexpr std::string_view kProjectsPrefix = "/api/projects/";

json details_json(const std::vector<Diagnostic>& details) {
  json out = json::array();
  for (const auto& d : details) {
    json e{{"message", d.message}};
    if (d.line > 0) e["line"] = d.line;
    if (!d.node.empty()) e["node"] = d.node;
    out.push_back(std::move(e));
  }
  return out;
}

ApiResponse ok_json(const json& body) { return ApiResponse{200, "application/json", body.dump(2) + "\n", {}}; }

// A request-scoped failure that short-circuits into a problem response.
struct Rejection {
  ApiResponse response;
};

template <class T>
using Outcome = std::variant<T, Rejection>;

Outcome<json> parse_body(const ApiRequest& req) {
  auto body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) {
    return Rejection{problem(400, "malformed_json", "request body must be a JSON object")};
  }
  return body;
}

class Handler {
 public:
  Handler(const ProjectStore& store, const Taxonomy& fallback) : store_(store), fallback_(fallback) {}

  ApiResponse dispatch(const ApiRequest& req) {
    const auto& path = req.path;
    if (path == "/" || path == "/index.html") {
      if (req.method != "GET") return method_not_allowed();
      return ApiResponse{200, "text/html; charset=utf-8", std::string(console_page()), {}};
    }
    if (path == "/api/taxonomy") {
      if (req.method != "GET") return method_not_allowed();
      return ApiResponse{200, "application/json", serialize_taxonomy(fallback_), {}};
    }
    if (path == "/api/hta/validate") return post_only(req, &Handler::validate_hta_doc);
    if (path == "/api/screening") return post_only(req, &Handler::screening);
    if (path == "/api/analysis") return post_only(req, &Handler::analysis);
    if (path == "/api/whatif") return post_only(req, &Handler::whatif);
    if (path.rfind(kProjectsPrefix, 0) == 0) {
      const auto id = path.substr(kProjectsPrefix.size());
      if (req.method == "GET") return get_project(id);
      if (req.method == "PUT") return put_project(id, req);
      return method_not_allowed();
    }
    return problem(404, "not_found", "no route for " + path);
  }

  const Taxonomy& active() const { return active_ ? *active_ : fallback_; }

 private:
  using Route = ApiResponse (Handler::*)(const ApiRequest&);

  ApiResponse post_only(const ApiRequest& req, Route route) {
    if (req.method != "POST") return method_not_allowed();
    return (this->*route)(req);
  }

  static ApiResponse method_not_allowed() {
    return problem(405, "method_not_allowed", "method not allowed on this resource");
  }

  // Request-supplied > project override > service default.
  std::optional<Rejection> resolve_taxonomy(const json& body) {
    if (auto it = body.find("taxonomy"); it != body.end() && !it->is_null()) {
      auto t = load_taxonomy(it->dump());
      if (!t) return Rejection{problem(422, "taxonomy_invalid", "request taxonomy is invalid", t.errors())};
      active_ = std::move(t).value();
      return std::nullopt;
    }
    if (auto it = body.find("project"); it != body.end() && it->is_string()) {
      try {
        auto p = store_.load(it->get<std::string>());
        if (p.taxonomy_override) active_ = std::move(*p.taxonomy_override);
      } catch (const ProjectNotFound& e) {
        return Rejection{problem(404, "project_not_found", e.what())};
      } catch (const Error& e) {
        return Rejection{problem(422, "project_invalid", e.what())};
      }
    }
    return std::nullopt;
  }

  Outcome<TaskTree> read_tree(const json& body) {
    auto it = body.find("hta");
    if (it == body.end()) return Rejection{problem(422, "hta_missing", "request needs an 'hta' field")};
    auto tree = it->is_string() ? parse_hta(it->get<std::string>()) : codec::tree_from_json(*it);
    if (!tree) return Rejection{problem(422, "hta_invalid", "task analysis does not parse", tree.errors())};
    if (auto problems = validate_hta(tree.value(), active()); !problems.empty()) {
      return Rejection{problem(422, "hta_invalid", "task analysis is not valid against the taxonomy", problems)};
    }
    return std::move(tree).value();
  }

  Outcome<CpcAssessment> read_assessment(const json& body, bool allow_inline) {
    const json* src = nullptr;
    if (auto it = body.find("assessment"); it != body.end()) {
      src = &*it;
    } else if (allow_inline && body.contains("choices")) {
      src = &body;
    } else {
      return Rejection{problem(422, "assessment_missing", "request needs an 'assessment' field")};
    }
    auto draft = codec::assessment_from_json(*src);
    if (!draft) return Rejection{problem(422, "assessment_invalid", "assessment is malformed", draft.errors())};
    auto a = CpcAssessment::create(std::move(draft).value(), active());
    if (!a) return Rejection{problem(422, "assessment_invalid", "assessment does not fit the taxonomy", a.errors())};
    return std::move(a).value();
  }

  ApiResponse validate_hta_doc(const ApiRequest& req) {
    // Accepts {"hta": ...} or the raw .hta text as the body.
    auto body = json::parse(req.body, nullptr, false);
    json wrapped;
    if (!body.is_discarded() && body.is_object()) {
      if (auto r = resolve_taxonomy(body)) return r->response;
      wrapped = std::move(body);
    } else {
      wrapped = json{{"hta", req.body}};
    }
    auto tree = read_tree(wrapped);
    if (auto* r = std::get_if<Rejection>(&tree)) return r->response;
    const auto& t = std::get<TaskTree>(tree);
    return ok_json({{"valid", true},
                    {"nodes", t.node_count()},
                    {"assignments", collect_assignments(t).size()},
                    {"diagnostics", json::array()}});
  }

  ApiResponse screening(const ApiRequest& req) {
    auto body = parse_body(req);
    if (auto* r = std::get_if<Rejection>(&body)) return r->response;
    const auto& b = std::get<json>(body);
    if (auto r = resolve_taxonomy(b)) return r->response;
    auto a = read_assessment(b, /*allow_inline=*/true);
    if (auto* r = std::get_if<Rejection>(&a)) return r->response;
    const auto result = screen(std::get<CpcAssessment>(a), active());
    return ok_json(codec::screening_to_json(result));
  }

  ApiResponse analysis(const ApiRequest& req) {
    auto body = parse_body(req);
    if (auto* r = std::get_if<Rejection>(&body)) return r->response;
    const auto& b = std::get<json>(body);
    if (auto r = resolve_taxonomy(b)) return r->response;
    auto tree = read_tree(b);
    if (auto* r = std::get_if<Rejection>(&tree)) return r->response;
    auto a = read_assessment(b, false);
    if (auto* r = std::get_if<Rejection>(&a)) return r->response;
    const auto& context = std::get<CpcAssessment>(a);
    const auto& t = std::get<TaskTree>(tree);

    std::size_t top = 10;
    if (auto it = b.find("top"); it != b.end()) {
      if (!it->is_number_unsigned()) return problem(422, "top_invalid", "'top' must be a non-negative integer");
      top = it->get<std::size_t>();
    }
    const auto result = analyze(t, context, active());
    json critical = json::array();
    for (const auto& r : rank_critical(result, top)) critical.push_back(codec::assignment_result_to_json(r));
    json steps = json::array();
    for (const auto& p : step_profiles(t)) steps.push_back(codec::profile_to_json(p));
    return ok_json({{"screening", codec::screening_to_json(screen(context, active()))},
                    {"analysis", codec::extended_to_json(result)},
                    {"step_profiles", steps},
                    {"critical", critical}});
  }

  ApiResponse whatif(const ApiRequest& req) {
    auto body = parse_body(req);
    if (auto* r = std::get_if<Rejection>(&body)) return r->response;
    const auto& b = std::get<json>(body);
    if (auto r = resolve_taxonomy(b)) return r->response;
    auto tree = read_tree(b);
    if (auto* r = std::get_if<Rejection>(&tree)) return r->response;
    auto a = read_assessment(b, false);
    if (auto* r = std::get_if<Rejection>(&a)) return r->response;

    const auto sweep = single_cpc_sweep(std::get<TaskTree>(tree), std::get<CpcAssessment>(a), active());
    json deltas = json::array();
    for (const auto& d : sweep) deltas.push_back(codec::delta_to_json(d));
    const auto best = best_improvement(sweep);
    return ok_json({{"deltas", deltas},
                    {"flat", sweep_is_flat(sweep)},
                    {"best", best ? codec::delta_to_json(*best) : json(nullptr)}});
  }

  ApiResponse get_project(const std::string& id) {
    if (!valid_project_id(id)) return problem(400, "invalid_id", "invalid project id '" + id + "'");
    try {
      auto p = store_.load(id);
      if (p.taxonomy_override) active_ = *p.taxonomy_override;
      return ApiResponse{200, "application/json", project_to_json(p), {}};
    } catch (const ProjectNotFound& e) {
      return problem(404, "project_not_found", e.what());
    }
  }

  ApiResponse put_project(const std::string& id, const ApiRequest& req) {
    if (!valid_project_id(id)) return problem(400, "invalid_id", "invalid project id '" + id + "'");
    auto body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) {
      return problem(400, "malformed_json", "request body must be a JSON object");
    }
    if (!body.contains("id")) body["id"] = id;
    auto p = project_from_json(body.dump());
    if (!p) return problem(422, "project_invalid", "project document is invalid", p.errors());
    if (p.value().id != id) return problem(422, "project_invalid", "body id does not match the URL");
    try {
      auto saved = store_.save(p.value());
      if (saved.taxonomy_override) active_ = *saved.taxonomy_override;
      return ApiResponse{200, "application/json", project_to_json(saved), {}};
    } catch (const ProjectConflict& e) {
      return problem(409, "conflict", e.what());
    }
  }

  const ProjectStore& store_;
  const Taxonomy& fallback_;
  std::optional<Taxonomy> active_;
};

}  // namespace

ApiResponse problem(int status, std::string_view code, std::string_view message,
                    const std::vector<Diagnostic>& details) {
  json body{{"code", code}, {"message", message}, {"details", details_json(details)}};
  return ApiResponse{status, "application/problem+json", body.dump(2) + "\n", {}};
}

ApiService::ApiService(std::filesystem::path projects_dir, Taxonomy taxonomy)
    : store_(std::move(projects_dir)), taxonomy_(std::move(taxonomy)) {}

ApiResponse ApiService::handle(const ApiRequest& request) const {
  Handler h(store_, taxonomy_);
  ApiResponse r;
  try {
    r = h.dispatch(request);
  } catch (const ProjectConflict& e) {
    r = problem(409, "conflict", e.what());
  } catch (const Error& e) {
    r = problem(422, "unprocessable", e.what());
  } catch (const json::exception& e) {
    r = problem(400, "malformed_json", e.what());
  } catch (const std::exception& e) {
    r = problem(500, "internal", e.what());
  }
  r.taxonomy_version = h.active().version;
  return r;
}

std::string_view console_page() {
  return R"(<!DOCTYPE html>
<html lang="en">
<head><meta charset="utf-8"><title>creamkit analyst console</title></head>
<body>
<h1>creamkit</h1>
<p>The analyst console bundle is not installed in this build. The API is available:</p>
<ul>
<li>GET /api/taxonomy</li>
<li>POST /api/hta/validate</li>
<li>POST /api/screening</li>
<li>POST /api/analysis</li>
<li>POST /api/whatif</li>
<li>GET|PUT /api/projects/{id}</li>
</ul>
</body>
</html>
)";
}

}  // namespace creamkit
