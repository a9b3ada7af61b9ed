#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "geoprov/backend.hpp"
#include "geoprov/error.hpp"

namespace testing {

inline std::filesystem::path fixture_dir() { return GEOPROV_TEST_FIXTURES; }
inline std::filesystem::path data_dir() { return GEOPROV_TEST_DATA; }
inline std::filesystem::path resource_dir() { return GEOPROV_RESOURCE_DIR; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("geoprov-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// In-memory backend that counts requests.
class MapBackend : public geoprov::Backend {
 public:
  std::map<std::string, geoprov::HttpResponse> pages;
  std::map<std::string, std::vector<std::string>> dns;

  geoprov::HttpResponse get(const std::string& url) override {
    std::lock_guard lock(mu_);
    ++gets;
    auto it = pages.find(url);
    if (it == pages.end()) throw geoprov::UpstreamUnavailable("no page " + url);
    return it->second;
  }
  std::vector<std::string> resolve(const std::string& host) override {
    std::lock_guard lock(mu_);
    ++resolves;
    auto it = dns.find(host);
    return it == dns.end() ? std::vector<std::string>{} : it->second;
  }

  int gets = 0;
  int resolves = 0;

 private:
  std::mutex mu_;
};

// Wraps another backend and counts what passes through.
class CountingBackend : public geoprov::Backend {
 public:
  explicit CountingBackend(geoprov::Backend& inner) : inner_(inner) {}
  geoprov::HttpResponse get(const std::string& url) override {
    ++requests;
    return inner_.get(url);
  }
  std::vector<std::string> resolve(const std::string& host) override {
    ++requests;
    return inner_.resolve(host);
  }
  std::atomic<int> requests{0};

 private:
  geoprov::Backend& inner_;
};

}  // namespace testing
