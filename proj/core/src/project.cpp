#include "creamkit/project.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json_codec.hpp"

namespace creamkit {

using nlohmann::json;

bool valid_project_id(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  auto lower_alnum = [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); };
  if (!lower_alnum(id.front())) return false;
  return std::all_of(id.begin(), id.end(),
                     [&](char c) { return lower_alnum(c) || c == '-' || c == '_'; });
}

std::string project_to_json(const Project& p) {
  json assessments = json::array();
  for (const auto& a : p.assessments) {
    json choices = json::object();
    for (const auto& [id, state] : a.assessment.choices) choices[std::to_string(id)] = state;
    json draft{{"label", a.assessment.label}, {"choices", choices}};
    if (!a.assessment.timestamp.empty()) draft["timestamp"] = a.assessment.timestamp;
    assessments.push_back({{"name", a.name}, {"assessment", draft}});
  }
  json doc{{"id", p.id},
           {"revision", p.revision},
           {"notes", p.notes},
           {"hta", codec::tree_to_json(p.hta)},
           {"assessments", assessments},
           {"taxonomy_override", nullptr}};
  if (p.taxonomy_override) doc["taxonomy_override"] = json::parse(serialize_taxonomy(*p.taxonomy_override));
  return doc.dump(2) + "\n";
}

Result<Project> project_from_json(std::string_view document) {
  auto doc = json::parse(document, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    return std::vector<Diagnostic>{{0, "", "malformed project document"}};
  }
  std::vector<Diagnostic> errors;
  Project p;
  try {
    p.id = doc.at("id").get<std::string>();
    p.revision = doc.value("revision", std::uint64_t{0});
    p.notes = doc.value("notes", "");
  } catch (const json::exception& e) {
    return std::vector<Diagnostic>{{0, "", std::string("malformed project document: ") + e.what()}};
  }
  if (!valid_project_id(p.id)) errors.push_back({0, "id", "invalid project id '" + p.id + "'"});

  if (auto it = doc.find("hta"); it != doc.end() && !it->is_null()) {
    auto tree = it->is_string() ? parse_hta(it->get<std::string>()) : codec::tree_from_json(*it);
    if (tree) {
      p.hta = std::move(tree).value();
    } else {
      for (auto d : tree.errors()) errors.push_back(std::move(d));
    }
  }
  if (auto it = doc.find("assessments"); it != doc.end()) {
    if (!it->is_array()) {
      errors.push_back({0, "assessments", "assessments must be an array"});
    } else {
      for (const auto& e : *it) {
        if (!e.is_object() || !e.contains("name") || !e.at("name").is_string() ||
            !e.contains("assessment")) {
          errors.push_back({0, "assessments", "each entry needs a name and an assessment"});
          continue;
        }
        auto draft = codec::assessment_from_json(e.at("assessment"));
        if (!draft) {
          for (auto d : draft.errors()) errors.push_back(std::move(d));
          continue;
        }
        p.assessments.push_back({e.at("name").get<std::string>(), std::move(draft).value()});
      }
    }
  }
  if (auto it = doc.find("taxonomy_override"); it != doc.end() && !it->is_null()) {
    auto t = load_taxonomy(it->dump());
    if (t) {
      p.taxonomy_override = std::move(t).value();
    } else {
      for (auto d : t.errors()) errors.push_back(std::move(d));
    }
  }
  if (!errors.empty()) return errors;
  return p;
}

// ---------------------------------------------------------------------------
// Store

namespace {

// Holds an exclusive flock for the lifetime of the object.
class FileLock {
 public:
  explicit FileLock(const std::filesystem::path& path)
      : fd_(::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644)) {
    if (fd_ < 0) throw Error("cannot open lock " + path.string() + ": " + std::strerror(errno));
    while (::flock(fd_, LOCK_EX) != 0) {
      if (errno != EINTR) {
        ::close(fd_);
        throw Error("cannot lock " + path.string() + ": " + std::strerror(errno));
      }
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t stored_revision(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return 0;
  auto doc = json::parse(read_file(path), nullptr, false);
  if (doc.is_discarded() || !doc.contains("revision")) {
    throw Error("corrupt project file " + path.string());
  }
  return doc.at("revision").get<std::uint64_t>();
}

std::atomic<unsigned> g_temp_counter{0};

}  // namespace

ProjectStore::ProjectStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec || !std::filesystem::is_directory(dir_)) {
    throw Error("cannot create project directory " + dir_.string() + ": " + ec.message());
  }
}

std::filesystem::path ProjectStore::file_for(std::string_view id) const {
  if (!valid_project_id(id)) throw Error("invalid project id '" + std::string(id) + "'");
  return dir_ / (std::string(id) + ".json");
}

Project ProjectStore::save(const Project& p) const {
  const auto path = file_for(p.id);
  FileLock lock(dir_ / (p.id + ".lock"));

  const auto on_disk = stored_revision(path);
  Project next = p;
  next.revision = p.revision + 1;
  if (on_disk >= next.revision) {
    throw ProjectConflict("project '" + p.id + "' is at revision " + std::to_string(on_disk) +
                          "; save based on revision " + std::to_string(p.revision) + " rejected");
  }

  const auto tmp = dir_ / ("." + p.id + ".json.tmp." + std::to_string(::getpid()) + "." +
                           std::to_string(g_temp_counter++));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << project_to_json(next);
    out.flush();
    if (!out) throw Error("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot replace " + path.string());
  }
  return next;
}

Project ProjectStore::load(std::string_view id) const {
  const auto path = file_for(id);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    throw ProjectNotFound("no project with id '" + std::string(id) + "'");
  }
  auto p = project_from_json(read_file(path));
  if (!p) throw Error("corrupt project file " + path.string() + ": " + to_string(p.errors().front()));
  return std::move(p).value();
}

bool ProjectStore::exists(std::string_view id) const {
  std::error_code ec;
  return valid_project_id(id) && std::filesystem::exists(file_for(id), ec);
}

std::vector<std::string> ProjectStore::list() const {
  std::vector<std::string> ids;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    const auto name = entry.path().filename().string();
    if (entry.path().extension() != ".json" || name.front() == '.') continue;
    auto id = entry.path().stem().string();
    if (valid_project_id(id)) ids.push_back(std::move(id));
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace creamkit
