#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "geoprov/backend.hpp"
#include "geoprov/error.hpp"
#include "geoprov/features.hpp"
#include "geoprov/resources.hpp"
#include "geoprov/wiki_client.hpp"

namespace geoprov::service {

inline const std::vector<std::string>& aggregate_methods() {
  static const std::vector<std::string> methods = {"model", "ip_only", "tld_only", "language_only"};
  return methods;
}

struct ReferenceResult {
  std::string url;
  features::FeatureVector features;
  CountryLabel predicted;
  CountryLabel ip;
  CountryLabel tld;
  CountryLabel language_country;

  friend bool operator==(const ReferenceResult&, const ReferenceResult&) = default;
};

using CountryCounts = std::map<std::string, int>;

struct ArticleAnalysis {
  wiki::ArticleRef article;
  std::string generated_at;  // UTC, ISO 8601 with a trailing Z
  std::string model_edition;
  std::vector<ReferenceResult> references;
  // method -> country code (or UNKNOWN) -> count
  std::map<std::string, CountryCounts> aggregates;

  friend bool operator==(const ArticleAnalysis&, const ArticleAnalysis&) = default;
};

std::string analysis_to_json(const ArticleAnalysis& analysis, int indent = 2);
// Throws CacheCorrupt when the document does not match the published schema
// or breaks an invariant (aggregate totals, label sets).
ArticleAnalysis analysis_from_json(std::string_view text);

std::string utc_now_iso8601();

struct CachedEntry {
  wiki::ArticleRef article;
  std::string generated_at;
};

// One JSON file per analysis, named sha256(lang + "|" + title) + ".json".
class AnalysisCache {
 public:
  explicit AnalysisCache(std::filesystem::path dir);

  std::filesystem::path path_for(const wiki::ArticleRef& article) const;
  // nullopt on a miss. Unreadable or invalid files count as a miss and are
  // reported on stderr.
  std::optional<ArticleAnalysis> get(const wiki::ArticleRef& article) const;
  void put(const ArticleAnalysis& analysis) const;
  // Newest first; corrupt entries are skipped.
  std::vector<CachedEntry> list() const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

struct AnalyzerOptions {
  std::function<std::string()> clock = utc_now_iso8601;
  wiki::WikiClientOptions wiki;
  features::ExtractorOptions extractor;
};

struct EditionError {
  std::string code;
  std::string message;
};

struct Comparison {
  std::string seed_lang;
  std::map<std::string, std::variant<ArticleAnalysis, EditionError>> editions;
};

std::string comparison_to_json(const Comparison& comparison, int indent = 2);

class Analyzer {
 public:
  Analyzer(Backend& backend, const Resources& resources, const AnalysisCache& cache, AnalyzerOptions options = {});

  // Runs article -> references -> features -> predictions -> aggregates and
  // stores the result. A cached analysis for the same model edition is
  // returned without touching the backend unless `refresh` is set.
  ArticleAnalysis analyze(const std::string& article_url, const std::string& model_edition = "general",
                          bool refresh = false);
  ArticleAnalysis analyze(const wiki::ArticleRef& article, const std::string& model_edition = "general",
                          bool refresh = false);

  // The seed article plus each requested sibling edition. Per-edition
  // failures are reported in place; only a failing seed article throws.
  Comparison compare(const std::string& article_url, const std::vector<std::string>& editions,
                     const std::string& model_edition = "general", bool refresh = false);

  std::optional<ArticleAnalysis> get_cached(const wiki::ArticleRef& article) const { return cache_.get(article); }
  std::vector<CachedEntry> list_cached() const { return cache_.list(); }

  const Resources& resources() const { return resources_; }

 private:
  ArticleAnalysis compute(const wiki::ArticleRef& article, const std::string& model_edition);
  std::shared_ptr<std::mutex> article_lock(const wiki::ArticleRef& article);

  Backend& backend_;
  const Resources& resources_;
  const AnalysisCache& cache_;
  AnalyzerOptions options_;
  wiki::WikiClient wiki_;
  features::FeatureExtractor extractor_;

  std::mutex locks_mu_;
  std::map<std::pair<std::string, std::string>, std::shared_ptr<std::mutex>> locks_;
};

}  // namespace geoprov::service
