#include "geoprov/server.hpp"

#include <httplib.h>

#include <json.hpp>

#include "geoprov/strings.hpp"

namespace geoprov::service {

using nlohmann::json;

int http_status_for(const Error& error) {
  const std::string& code = error.code();
  if (code == "malformed_article_url" || code == "invalid_argument") return 400;
  if (code == "article_not_found") return 404;
  if (code == "upstream_unavailable") return 502;
  return 500;
}

std::string error_json(const std::string& code, const std::string& message) {
  return json{{"error", {{"code", code}, {"message", message}}}}.dump() + "\n";
}

ApiServer::ApiServer(Analyzer& analyzer) : analyzer_(analyzer), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

ApiServer::~ApiServer() = default;

namespace {

std::string param(const std::multimap<std::string, std::string>& params, const std::string& key,
                  const std::string& fallback = "") {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

bool truthy(const std::string& v) { return v == "1" || v == "true" || v == "yes"; }

}  // namespace

ApiResponse ApiServer::handle(const std::string& path, const std::multimap<std::string, std::string>& params) {
  try {
    if (path == "/api/health") {
      json doc = {{"status", "ok"}, {"model_editions", analyzer_.resources().model_editions()}};
      return {200, doc.dump() + "\n"};
    }
    if (path == "/api/articles") {
      json list = json::array();
      for (const auto& entry : analyzer_.list_cached()) {
        list.push_back({{"article",
                         {{"lang", entry.article.lang},
                          {"title", entry.article.title},
                          {"url", wiki::article_url(entry.article)}}},
                        {"generated_at", entry.generated_at}});
      }
      return {200, list.dump() + "\n"};
    }
    if (path == "/api/analysis") {
      std::string url = param(params, "url");
      if (url.empty()) throw MalformedArticleUrl("missing url parameter");
      auto analysis = analyzer_.analyze(url, param(params, "model", "general"), truthy(param(params, "refresh")));
      return {200, analysis_to_json(analysis, -1)};
    }
    if (path == "/api/compare") {
      std::string url = param(params, "url");
      if (url.empty()) throw MalformedArticleUrl("missing url parameter");
      std::vector<std::string> editions;
      for (auto& e : split(param(params, "editions"), ',')) {
        std::string lang(trim(e));
        if (!lang.empty()) editions.push_back(lang);
      }
      auto comparison = analyzer_.compare(url, editions, param(params, "model", "general"),
                                          truthy(param(params, "refresh")));
      return {200, comparison_to_json(comparison, -1)};
    }
    return {404, error_json("not_found", "no such endpoint: " + path)};
  } catch (const Error& e) {
    return {http_status_for(e), error_json(e.code(), e.what())};
  } catch (const std::exception& e) {
    return {500, error_json("internal", e.what())};
  }
}

void ApiServer::install_routes() {
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    std::multimap<std::string, std::string> params(req.params.begin(), req.params.end());
    ApiResponse response = handle(req.path, params);
    res.status = response.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(response.body, "application/json");
  };
  for (const char* path : {"/api/health", "/api/articles", "/api/analysis", "/api/compare"}) {
    server_->Get(path, route);
  }
  server_->set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (res.body.empty()) {
      res.set_content(error_json(res.status == 404 ? "not_found" : "http_error", "no such endpoint: " + req.path),
                      "application/json");
    }
  });
}

bool ApiServer::listen(const std::string& host, int port) { return server_->listen(host, port); }

int ApiServer::bind_to_any_port(const std::string& host) { return server_->bind_to_any_port(host); }

bool ApiServer::listen_after_bind() { return server_->listen_after_bind(); }

void ApiServer::stop() { server_->stop(); }

void ApiServer::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace geoprov::service
