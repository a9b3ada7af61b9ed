#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <semaphore>
#include <string>
#include <vector>

namespace geoprov {

std::string sha256_hex(std::string_view data);

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Everything that touches the network goes through a Backend, so the whole
// pipeline can run against recorded fixtures.
class Backend {
 public:
  virtual ~Backend() = default;
  // Throws UpstreamUnavailable on transport failure. Non-2xx statuses are
  // returned, not thrown.
  virtual HttpResponse get(const std::string& url) = 0;
  // IPv4 addresses in dotted-quad form; empty when the host does not resolve.
  virtual std::vector<std::string> resolve(const std::string& host) = 0;
};

std::string canonical_get(const std::string& url);
std::string canonical_resolve(const std::string& host);

struct LiveBackendOptions {
  size_t max_in_flight = 4;
  std::chrono::milliseconds timeout{10000};
  std::string user_agent = "geoprov/1.0 (reference geo-provenance analysis)";
};

class LiveBackend : public Backend {
 public:
  explicit LiveBackend(LiveBackendOptions options = {});
  HttpResponse get(const std::string& url) override;
  std::vector<std::string> resolve(const std::string& host) override;

 private:
  LiveBackendOptions options_;
  std::counting_semaphore<1024> slots_;
};

// Replays requests from a directory holding one JSON file per request, named
// sha256(canonical request) + ".json". A GET fixture looks like
//   {"request": "GET <url>", "status": 200, "body": "..."}
// where "json" may replace "body" to embed a JSON document verbatim. A
// RESOLVE fixture is {"request": "RESOLVE <host>", "addresses": ["1.2.3.4"]}.
// Missing GET fixtures behave like an unreachable server.
class FixtureBackend : public Backend {
 public:
  explicit FixtureBackend(std::filesystem::path dir);
  HttpResponse get(const std::string& url) override;
  std::vector<std::string> resolve(const std::string& host) override;
  const std::filesystem::path& dir() const { return dir_; }

  static std::filesystem::path fixture_path(const std::filesystem::path& dir,
                                            const std::string& canonical_request);

 private:
  std::filesystem::path dir_;
};

// Forwards to another backend and stores every response as a fixture.
class RecordingBackend : public Backend {
 public:
  RecordingBackend(std::shared_ptr<Backend> inner, std::filesystem::path dir);
  HttpResponse get(const std::string& url) override;
  std::vector<std::string> resolve(const std::string& host) override;

 private:
  std::shared_ptr<Backend> inner_;
  std::filesystem::path dir_;
};

void write_get_fixture(const std::filesystem::path& dir, const std::string& url, const HttpResponse& response);
void write_resolve_fixture(const std::filesystem::path& dir, const std::string& host,
                           const std::vector<std::string>& addresses);

}  // namespace geoprov
