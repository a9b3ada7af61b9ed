#pragma once

#include <map>
#include <memory>
#include <string>

#include "geoprov/analysis.hpp"

namespace httplib {
class Server;
}

namespace geoprov::service {

struct ApiResponse {
  int status = 200;
  std::string body;  // JSON
};

// Maps library errors onto HTTP statuses: 400 for malformed URLs and bad
// arguments, 404 for missing articles, 502 for upstream failures.
int http_status_for(const Error& error);
std::string error_json(const std::string& code, const std::string& message);

// JSON API over an Analyzer. `handle` is transport-independent; `listen`
// serves it over HTTP.
class ApiServer {
 public:
  explicit ApiServer(Analyzer& analyzer);
  ~ApiServer();

  ApiResponse handle(const std::string& path, const std::multimap<std::string, std::string>& params);

  // Blocks until stop(). Returns false when the socket cannot be bound.
  bool listen(const std::string& host, int port);
  // Binds an ephemeral port and returns it (or -1); serve with listen_after_bind().
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  void install_routes();

  Analyzer& analyzer_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace geoprov::service
