#include "geoprov/analysis.hpp"

#include <chrono>
#include <ctime>
#include <iostream>
#include <json.hpp>
#include <set>

#include "geoprov/classifier.hpp"
#include "geoprov/csv.hpp"
#include "geoprov/strings.hpp"

namespace geoprov::service {

using nlohmann::json;
namespace fs = std::filesystem;

std::string utc_now_iso8601() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------
// JSON

static json article_json(const wiki::ArticleRef& article) {
  return {{"lang", article.lang}, {"title", article.title}, {"url", wiki::article_url(article)}};
}

static json analysis_json(const ArticleAnalysis& a) {
  json refs = json::array();
  for (const auto& r : a.references) {
    refs.push_back({
        {"url", r.url},
        {"features",
         {{"ip_country", r.features.ip_country.code()},
          {"tld_country", r.features.tld_country.code()},
          {"page_language", r.features.page_language}}},
        {"predicted", r.predicted.code()},
        {"per_feature", {{"ip", r.ip.code()}, {"tld", r.tld.code()}, {"language_country", r.language_country.code()}}},
    });
  }
  json aggregates = json::object();
  for (const auto& method : aggregate_methods()) {
    auto it = a.aggregates.find(method);
    aggregates[method] = it == a.aggregates.end() ? json::object() : json(it->second);
  }
  return {
      {"article", article_json(a.article)},
      {"generated_at", a.generated_at},
      {"model_edition", a.model_edition},
      {"references", refs},
      {"aggregates", aggregates},
  };
}

std::string analysis_to_json(const ArticleAnalysis& analysis, int indent) {
  return analysis_json(analysis).dump(indent) + "\n";
}

namespace {

CountryLabel label_field(const json& obj, const char* key) {
  auto label = CountryLabel::try_parse(obj.at(key).get<std::string>());
  if (!label) throw CacheCorrupt(std::string("invalid country in field ") + key);
  return *label;
}

ArticleAnalysis parse_analysis(const json& doc) {
  ArticleAnalysis a;
  const json& article = doc.at("article");
  try {
    a.article = wiki::ArticleRef::make(article.at("lang").get<std::string>(), article.at("title").get<std::string>());
  } catch (const MalformedArticleUrl& e) {
    throw CacheCorrupt(e.what());
  }
  a.generated_at = doc.at("generated_at").get<std::string>();
  if (a.generated_at.empty()) throw CacheCorrupt("empty generated_at");
  a.model_edition = doc.at("model_edition").get<std::string>();
  for (const json& r : doc.at("references")) {
    ReferenceResult ref;
    ref.url = r.at("url").get<std::string>();
    const json& f = r.at("features");
    ref.features.ip_country = label_field(f, "ip_country");
    ref.features.tld_country = label_field(f, "tld_country");
    ref.features.page_language = f.at("page_language").get<std::string>();
    if (!features::is_language_label(ref.features.page_language)) throw CacheCorrupt("invalid page_language");
    ref.predicted = label_field(r, "predicted");
    const json& pf = r.at("per_feature");
    ref.ip = label_field(pf, "ip");
    ref.tld = label_field(pf, "tld");
    ref.language_country = label_field(pf, "language_country");
    a.references.push_back(std::move(ref));
  }
  const json& aggregates = doc.at("aggregates");
  if (aggregates.size() != aggregate_methods().size()) throw CacheCorrupt("unexpected aggregate methods");
  for (const auto& method : aggregate_methods()) {
    int total = 0;
    CountryCounts counts;
    for (const auto& [code, count] : aggregates.at(method).items()) {
      if (!CountryLabel::try_parse(code)) throw CacheCorrupt("invalid country in aggregates: " + code);
      int n = count.get<int>();
      if (n <= 0) throw CacheCorrupt("non-positive aggregate count");
      counts[code] = n;
      total += n;
    }
    if (total != static_cast<int>(a.references.size())) {
      throw CacheCorrupt("aggregate '" + method + "' sums to " + std::to_string(total) + ", expected " +
                         std::to_string(a.references.size()));
    }
    a.aggregates[method] = std::move(counts);
  }
  return a;
}

}  // namespace

ArticleAnalysis analysis_from_json(std::string_view text) {
  try {
    return parse_analysis(json::parse(text));
  } catch (const json::exception& e) {
    throw CacheCorrupt(std::string("invalid analysis document: ") + e.what());
  }
}

std::string comparison_to_json(const Comparison& comparison, int indent) {
  json editions = json::object();
  for (const auto& [lang, entry] : comparison.editions) {
    if (const auto* analysis = std::get_if<ArticleAnalysis>(&entry)) {
      editions[lang] = {{"analysis", analysis_json(*analysis)}};
    } else {
      const auto& err = std::get<EditionError>(entry);
      editions[lang] = {{"error", {{"code", err.code}, {"message", err.message}}}};
    }
  }
  json doc = {{"seed", comparison.seed_lang}, {"editions", editions}};
  return doc.dump(indent) + "\n";
}

// ---------------------------------------------------------------------------
// Cache

AnalysisCache::AnalysisCache(fs::path dir) : dir_(std::move(dir)) {}

fs::path AnalysisCache::path_for(const wiki::ArticleRef& article) const {
  return dir_ / (sha256_hex(article.lang + "|" + article.title) + ".json");
}

static std::optional<ArticleAnalysis> read_entry(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) return std::nullopt;
  try {
    return analysis_from_json(read_file(path.string()));
  } catch (const Error& e) {
    std::cerr << "warning: ignoring corrupt cache entry " << path.string() << ": " << e.what() << "\n";
    return std::nullopt;
  }
}

std::optional<ArticleAnalysis> AnalysisCache::get(const wiki::ArticleRef& article) const {
  auto entry = read_entry(path_for(article));
  if (entry && entry->article != article) {
    std::cerr << "warning: cache entry " << path_for(article).string() << " belongs to another article\n";
    return std::nullopt;
  }
  return entry;
}

void AnalysisCache::put(const ArticleAnalysis& analysis) const {
  write_file_atomic(path_for(analysis.article).string(), analysis_to_json(analysis));
}

std::vector<CachedEntry> AnalysisCache::list() const {
  std::vector<CachedEntry> out;
  std::error_code ec;
  if (!fs::is_directory(dir_, ec)) return out;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    if (auto a = read_entry(entry.path())) out.push_back({a->article, a->generated_at});
  }
  std::sort(out.begin(), out.end(), [](const CachedEntry& x, const CachedEntry& y) {
    if (x.generated_at != y.generated_at) return x.generated_at > y.generated_at;
    return x.article < y.article;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Analyzer

Analyzer::Analyzer(Backend& backend, const Resources& resources, const AnalysisCache& cache, AnalyzerOptions options)
    : backend_(backend),
      resources_(resources),
      cache_(cache),
      options_(std::move(options)),
      wiki_(backend_, options_.wiki),
      extractor_(resources.ip_db, resources.tld_table, resources.detector, backend_, options_.extractor) {}

std::shared_ptr<std::mutex> Analyzer::article_lock(const wiki::ArticleRef& article) {
  std::lock_guard guard(locks_mu_);
  auto& slot = locks_[{article.lang, article.title}];
  if (!slot) slot = std::make_shared<std::mutex>();
  return slot;
}

ArticleAnalysis Analyzer::analyze(const std::string& article_url, const std::string& model_edition, bool refresh) {
  return analyze(wiki::parse_article_url(article_url), model_edition, refresh);
}

ArticleAnalysis Analyzer::analyze(const wiki::ArticleRef& article, const std::string& model_edition, bool refresh) {
  resources_.model(model_edition);  // reject unknown editions before any work
  auto lock = article_lock(article);
  std::lock_guard guard(*lock);
  if (!refresh) {
    if (auto cached = cache_.get(article); cached && cached->model_edition == model_edition) return *cached;
  }
  ArticleAnalysis analysis = compute(article, model_edition);
  cache_.put(analysis);
  return analysis;
}

ArticleAnalysis Analyzer::compute(const wiki::ArticleRef& article, const std::string& model_edition) {
  const classify::TrainedModel& model = resources_.model(model_edition);
  std::vector<wiki::Reference> refs = wiki_.fetch_external_links(article);
  std::vector<features::FeatureVector> fvs = extractor_.extract_all(refs);

  ArticleAnalysis a;
  a.article = article;
  a.generated_at = options_.clock();
  a.model_edition = model_edition;
  for (const auto& method : aggregate_methods()) a.aggregates[method];
  for (size_t i = 0; i < refs.size(); ++i) {
    ReferenceResult r;
    r.url = refs[i].url;
    r.features = fvs[i];
    bool no_evidence = fvs[i].ip_country.is_unknown() && fvs[i].tld_country.is_unknown() &&
                       fvs[i].page_language == kUnknown;
    r.predicted = no_evidence ? CountryLabel::unknown() : classify::predict(model, fvs[i]).label;
    r.ip = fvs[i].ip_country;
    r.tld = fvs[i].tld_country;
    r.language_country = resources_.lang_to_country.country_of(fvs[i].page_language);
    a.aggregates["model"][r.predicted.code()] += 1;
    a.aggregates["ip_only"][r.ip.code()] += 1;
    a.aggregates["tld_only"][r.tld.code()] += 1;
    a.aggregates["language_only"][r.language_country.code()] += 1;
    a.references.push_back(std::move(r));
  }
  return a;
}

Comparison Analyzer::compare(const std::string& article_url, const std::vector<std::string>& editions,
                             const std::string& model_edition, bool refresh) {
  wiki::ArticleRef seed = wiki::parse_article_url(article_url);
  Comparison out;
  out.seed_lang = seed.lang;
  out.editions[seed.lang] = analyze(seed, model_edition, refresh);

  std::vector<std::string> wanted;
  for (const auto& e : editions) {
    if (e != seed.lang && std::find(wanted.begin(), wanted.end(), e) == wanted.end()) wanted.push_back(e);
  }
  if (wanted.empty()) return out;

  std::map<std::string, wiki::ArticleRef> siblings;
  try {
    siblings = wiki_.fetch_language_links(seed);
  } catch (const Error& e) {
    for (const auto& lang : wanted) out.editions[lang] = EditionError{e.code(), e.what()};
    return out;
  }
  for (const auto& lang : wanted) {
    auto it = siblings.find(lang);
    if (it == siblings.end()) {
      out.editions[lang] = EditionError{"no_sibling", "no " + lang + " language link from " + seed.lang + ":" + seed.title};
      continue;
    }
    try {
      out.editions[lang] = analyze(it->second, model_edition, refresh);
    } catch (const Error& e) {
      out.editions[lang] = EditionError{e.code(), e.what()};
    }
  }
  return out;
}

}  // namespace geoprov::service
