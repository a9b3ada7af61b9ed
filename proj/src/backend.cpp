#include "geoprov/backend.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <openssl/evp.h>
#include <sys/socket.h>

#include <httplib.h>

#include <algorithm>
#include <json.hpp>

#include "geoprov/csv.hpp"
#include "geoprov/error.hpp"
#include "geoprov/strings.hpp"

namespace geoprov {

using nlohmann::json;

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static const char* kHex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 15];
  }
  return out;
}

std::string canonical_get(const std::string& url) { return "GET " + url; }
std::string canonical_resolve(const std::string& host) { return "RESOLVE " + to_lower_ascii(host); }

// ---------------------------------------------------------------------------
// LiveBackend

LiveBackend::LiveBackend(LiveBackendOptions options)
    : options_(std::move(options)), slots_(static_cast<std::ptrdiff_t>(std::max<size_t>(1, options_.max_in_flight))) {}

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string target;  // /path?query
};

SplitUrl split_url(const std::string& url) {
  size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw UpstreamUnavailable("not an absolute URL: " + url);
  size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<1024>& s) : s_(s) { s_.acquire(); }
  ~SlotGuard() { s_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<1024>& s_;
};

}  // namespace

HttpResponse LiveBackend::get(const std::string& url) {
  SlotGuard slot(slots_);
  SplitUrl parts = split_url(url);
  httplib::Client client(parts.origin);
  if (!client.is_valid()) throw UpstreamUnavailable("unsupported URL: " + url);
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_follow_location(true);
  httplib::Headers headers = {{"User-Agent", options_.user_agent}};
  auto result = client.Get(parts.target, headers);
  if (!result) {
    throw UpstreamUnavailable("request to " + url + " failed: " + httplib::to_string(result.error()));
  }
  return {result->status, result->body};
}

std::vector<std::string> LiveBackend::resolve(const std::string& host) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  std::vector<std::string> out;
  if (getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0) return out;
  for (addrinfo* p = res; p; p = p->ai_next) {
    char buf[INET_ADDRSTRLEN];
    auto* sin = reinterpret_cast<sockaddr_in*>(p->ai_addr);
    if (inet_ntop(AF_INET, &sin->sin_addr, buf, sizeof(buf))) {
      std::string addr(buf);
      if (std::find(out.begin(), out.end(), addr) == out.end()) out.push_back(addr);
    }
  }
  freeaddrinfo(res);
  return out;
}

// ---------------------------------------------------------------------------
// FixtureBackend

FixtureBackend::FixtureBackend(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path FixtureBackend::fixture_path(const std::filesystem::path& dir,
                                                   const std::string& canonical_request) {
  return dir / (sha256_hex(canonical_request) + ".json");
}

static std::optional<json> load_fixture(const std::filesystem::path& path, const std::string& request) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  json doc;
  try {
    doc = json::parse(read_file(path.string()));
  } catch (const json::exception& e) {
    throw DataFormatError("fixture " + path.string() + " is not valid JSON: " + e.what());
  }
  if (doc.value("request", std::string()) != request) {
    throw DataFormatError("fixture " + path.string() + " records a different request");
  }
  return doc;
}

HttpResponse FixtureBackend::get(const std::string& url) {
  std::string request = canonical_get(url);
  auto doc = load_fixture(fixture_path(dir_, request), request);
  if (!doc) throw UpstreamUnavailable("no fixture for " + request);
  HttpResponse response;
  response.status = doc->value("status", 200);
  if (doc->contains("json")) {
    response.body = (*doc)["json"].dump();
  } else {
    response.body = doc->value("body", std::string());
  }
  return response;
}

std::vector<std::string> FixtureBackend::resolve(const std::string& host) {
  std::string request = canonical_resolve(host);
  auto doc = load_fixture(fixture_path(dir_, request), request);
  if (!doc) return {};
  return doc->value("addresses", std::vector<std::string>{});
}

// ---------------------------------------------------------------------------
// Recording

void write_get_fixture(const std::filesystem::path& dir, const std::string& url, const HttpResponse& response) {
  std::string request = canonical_get(url);
  json doc = {{"request", request}, {"status", response.status}, {"body", response.body}};
  write_file_atomic(FixtureBackend::fixture_path(dir, request).string(), doc.dump(1) + "\n");
}

void write_resolve_fixture(const std::filesystem::path& dir, const std::string& host,
                           const std::vector<std::string>& addresses) {
  std::string request = canonical_resolve(host);
  json doc = {{"request", request}, {"addresses", addresses}};
  write_file_atomic(FixtureBackend::fixture_path(dir, request).string(), doc.dump(1) + "\n");
}

RecordingBackend::RecordingBackend(std::shared_ptr<Backend> inner, std::filesystem::path dir)
    : inner_(std::move(inner)), dir_(std::move(dir)) {}

HttpResponse RecordingBackend::get(const std::string& url) {
  HttpResponse response = inner_->get(url);
  write_get_fixture(dir_, url, response);
  return response;
}

std::vector<std::string> RecordingBackend::resolve(const std::string& host) {
  auto addresses = inner_->resolve(host);
  write_resolve_fixture(dir_, host, addresses);
  return addresses;
}

}  // namespace geoprov
