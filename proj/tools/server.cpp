#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <ostream>
#include <thread>

#include "cli.hpp"
#include "httplib.h"

namespace creamkit::cli {

int serve_api(const ServeOptions& options, const Taxonomy& taxonomy, std::ostream& log,
              std::ostream& err) {
  std::optional<ApiService> service;
  try {
    service.emplace(options.projects_dir, taxonomy);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kIoOrParseFailure;
  }
  if (::access(options.projects_dir.c_str(), W_OK) != 0) {
    err << "error: project directory " << options.projects_dir.string() << " is not writable\n";
    return kIoOrParseFailure;
  }

  httplib::Server server;
  // Address reuse only: a second server on the same port must fail to bind.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  auto bridge = [&](const httplib::Request& req, httplib::Response& res) {
    const auto r = service->handle(ApiRequest{req.method, req.path, req.body});
    res.status = r.status;
    res.set_header("X-Taxonomy-Version", r.taxonomy_version);
    res.set_content(r.body, r.content_type);
  };
  server.Get(".*", bridge);
  server.Post(".*", bridge);
  server.Put(".*", bridge);
  server.Delete(".*", bridge);

  int port = options.port;
  if (port == 0) {
    port = server.bind_to_any_port(options.host);
    if (port < 0) {
      err << "error: cannot bind to " << options.host << '\n';
      return kIoOrParseFailure;
    }
  } else if (!server.bind_to_port(options.host, port)) {
    err << "error: cannot bind to " << options.host << ':' << port << " (port in use?)\n";
    return kIoOrParseFailure;
  }

  log << "creamkit API listening on http://" << options.host << ':' << port << " (projects in "
      << options.projects_dir.string() << ", taxonomy " << taxonomy.version << ")" << std::endl;
  if (options.on_listening) options.on_listening(port);

  std::thread watcher;
  if (options.stop != nullptr) {
    watcher = std::thread([&] {
      while (!options.stop->load()) std::this_thread::sleep_for(std::chrono::milliseconds(20));
      server.stop();
    });
  }
  const bool ok = server.listen_after_bind();
  if (watcher.joinable()) watcher.join();
  return ok || (options.stop != nullptr && options.stop->load()) ? kOk : kIoOrParseFailure;
}

}  // namespace creamkit::cli
