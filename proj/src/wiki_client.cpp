#include "geoprov/wiki_client.hpp"

#include <algorithm>
#include <json.hpp>
#include <set>

#include "geoprov/error.hpp"
#include "geoprov/strings.hpp"

namespace geoprov::wiki {

using nlohmann::json;

bool is_valid_lang(std::string_view lang) {
  if (lang.size() < 2 || lang.size() > 12) return false;
  for (char c : lang) {
    if (c < 'a' || c > 'z') return false;
  }
  return true;
}

ArticleRef ArticleRef::make(std::string lang, std::string title) {
  if (!is_valid_lang(lang)) throw MalformedArticleUrl("invalid language edition '" + lang + "'");
  std::string trimmed(trim(title));
  if (trimmed.empty()) throw MalformedArticleUrl("empty article title");
  return ArticleRef{std::move(lang), std::move(trimmed)};
}

ArticleRef parse_article_url(std::string_view url) {
  std::string_view rest = trim(url);
  std::string lowered = to_lower_ascii(rest.substr(0, std::min<size_t>(rest.size(), 8)));
  if (lowered.starts_with("https://")) {
    rest.remove_prefix(8);
  } else if (lowered.starts_with("http://")) {
    rest.remove_prefix(7);
  } else {
    throw MalformedArticleUrl("not an http(s) URL: " + std::string(url));
  }
  size_t slash = rest.find('/');
  std::string host = to_lower_ascii(rest.substr(0, slash));
  std::string_view path = slash == std::string_view::npos ? std::string_view() : rest.substr(slash);

  constexpr std::string_view kSuffix = ".wikipedia.org";
  if (!host.ends_with(kSuffix)) throw MalformedArticleUrl("not a Wikipedia host: " + host);
  std::string lang = host.substr(0, host.size() - kSuffix.size());
  if (lang.ends_with(".m")) lang.resize(lang.size() - 2);  // mobile site
  if (!is_valid_lang(lang)) throw MalformedArticleUrl("not a Wikipedia language edition: " + host);

  constexpr std::string_view kWiki = "/wiki/";
  if (!path.starts_with(kWiki)) throw MalformedArticleUrl("path lacks /wiki/ prefix: " + std::string(url));
  path.remove_prefix(kWiki.size());
  path = path.substr(0, path.find_first_of("?#"));

  std::string title;
  try {
    title = percent_decode(path);
  } catch (const InvalidArgument& e) {
    throw MalformedArticleUrl(std::string("bad title encoding: ") + e.what());
  }
  std::replace(title.begin(), title.end(), '_', ' ');
  return ArticleRef::make(std::move(lang), std::move(title));
}

std::string article_url(const ArticleRef& article) {
  std::string title = article.title;
  std::replace(title.begin(), title.end(), ' ', '_');
  return "https://" + article.lang + ".wikipedia.org/wiki/" + percent_encode(title);
}

bool is_wikimedia_host(std::string_view host) {
  static constexpr std::string_view kDomains[] = {
      "wikipedia.org",  "wikimedia.org",  "wiktionary.org",  "wikibooks.org",
      "wikinews.org",   "wikiquote.org",  "wikisource.org",  "wikiversity.org",
      "wikivoyage.org", "wikidata.org",   "mediawiki.org",
  };
  for (std::string_view domain : kDomains) {
    if (host == domain) return true;
    if (host.size() > domain.size() && host.ends_with(domain) && host[host.size() - domain.size() - 1] == '.') {
      return true;
    }
  }
  return false;
}

std::optional<Reference> make_reference(std::string_view raw_url) {
  std::string_view raw = trim(raw_url);
  std::string url;
  if (raw.starts_with("//")) {
    url = "https:" + std::string(raw);
  } else {
    url = std::string(raw);
  }
  size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) return std::nullopt;
  std::string scheme = to_lower_ascii(url.substr(0, scheme_end));
  if (scheme != "http" && scheme != "https") return std::nullopt;

  size_t authority_start = scheme_end + 3;
  size_t authority_end = url.find_first_of("/?#", authority_start);
  if (authority_end == std::string::npos) authority_end = url.size();
  std::string authority = url.substr(authority_start, authority_end - authority_start);
  std::string host = authority;
  if (size_t at = host.rfind('@'); at != std::string::npos) host = host.substr(at + 1);
  if (!host.empty() && host.front() == '[') return std::nullopt;  // IPv6 literal
  if (size_t colon = host.find(':'); colon != std::string::npos) host.resize(colon);
  host = to_lower_ascii(host);
  while (!host.empty() && host.back() == '.') host.pop_back();
  if (host.empty()) return std::nullopt;

  std::string normalized = scheme + "://" + to_lower_ascii(authority) + url.substr(authority_end);
  return Reference{std::move(normalized), std::move(host)};
}

// ---------------------------------------------------------------------------

WikiClient::WikiClient(Backend& backend, WikiClientOptions options)
    : backend_(backend), options_(std::move(options)) {}

std::string WikiClient::api_url(const std::string& lang) const {
  std::string url = options_.api_pattern;
  size_t pos = url.find("{lang}");
  if (pos != std::string::npos) url.replace(pos, 6, lang);
  return url;
}

static std::string api_title(const std::string& title) {
  std::string t = title;
  std::replace(t.begin(), t.end(), ' ', '_');
  return percent_encode(t);
}

std::string WikiClient::extlinks_query_url(const ArticleRef& article, const std::string& continuation) const {
  std::string url = api_url(article.lang) +
                    "?action=query&format=json&formatversion=2&prop=extlinks&ellimit=max&redirects=1&titles=" +
                    api_title(article.title);
  if (!continuation.empty()) url += "&elcontinue=" + percent_encode(continuation);
  return url;
}

std::string WikiClient::langlinks_query_url(const ArticleRef& article, const std::string& continuation) const {
  std::string url = api_url(article.lang) +
                    "?action=query&format=json&formatversion=2&prop=langlinks&lllimit=max&redirects=1&titles=" +
                    api_title(article.title);
  if (!continuation.empty()) url += "&llcontinue=" + percent_encode(continuation);
  return url;
}

namespace {

json fetch_json(Backend& backend, const std::string& url) {
  HttpResponse response = backend.get(url);
  if (response.status != 200) {
    throw UpstreamUnavailable("wiki API returned HTTP " + std::to_string(response.status) + " for " + url);
  }
  json doc;
  try {
    doc = json::parse(response.body);
  } catch (const json::exception&) {
    throw UpstreamUnavailable("wiki API returned invalid JSON for " + url);
  }
  if (doc.contains("error")) {
    std::string code = doc["error"].value("code", std::string());
    std::string info = doc["error"].value("info", std::string());
    if (code == "missingtitle" || code == "invalidtitle") throw ArticleNotFound(info);
    throw UpstreamUnavailable("wiki API error " + code + ": " + info);
  }
  return doc;
}

// The single page object of a formatversion=2 query answer.
const json& single_page(const json& doc, const ArticleRef& article) {
  const json* pages = nullptr;
  if (doc.contains("query")) {
    auto it = doc["query"].find("pages");
    if (it != doc["query"].end()) pages = &*it;
  }
  if (!pages || !pages->is_array() || pages->empty()) {
    throw UpstreamUnavailable("wiki API answer lacks query.pages");
  }
  const json& page = (*pages)[0];
  if (page.value("missing", false) || page.value("invalid", false)) {
    throw ArticleNotFound("article " + article.lang + ":" + article.title + " does not exist");
  }
  return page;
}

std::string continuation_token(const json& doc, const char* key) {
  auto it = doc.find("continue");
  if (it == doc.end() || !it->contains(key)) return {};
  return (*it)[key].get<std::string>();
}

}  // namespace

std::vector<Reference> WikiClient::fetch_external_links(const ArticleRef& article) const {
  std::vector<Reference> out;
  std::set<std::string> seen;
  std::string continuation;
  for (int round = 0; round < options_.max_continuations; ++round) {
    json doc = fetch_json(backend_, extlinks_query_url(article, continuation));
    const json& page = single_page(doc, article);
    if (auto links = page.find("extlinks"); links != page.end()) {
      for (const json& link : *links) {
        std::string raw = link.contains("url") ? link["url"].get<std::string>() : link.value("*", std::string());
        auto ref = make_reference(raw);
        if (!ref || is_wikimedia_host(ref->host)) continue;
        if (seen.insert(ref->url).second) out.push_back(std::move(*ref));
      }
    }
    continuation = continuation_token(doc, "elcontinue");
    if (continuation.empty()) return out;
  }
  throw UpstreamUnavailable("too many continuation rounds for " + article.title);
}

std::map<std::string, ArticleRef> WikiClient::fetch_language_links(const ArticleRef& article) const {
  std::map<std::string, ArticleRef> out;
  std::string continuation;
  for (int round = 0; round < options_.max_continuations; ++round) {
    json doc = fetch_json(backend_, langlinks_query_url(article, continuation));
    const json& page = single_page(doc, article);
    if (auto links = page.find("langlinks"); links != page.end()) {
      for (const json& link : *links) {
        std::string lang = link.value("lang", std::string());
        std::string title = link.contains("title") ? link["title"].get<std::string>() : link.value("*", std::string());
        if (lang == article.lang || !is_valid_lang(lang) || trim(title).empty()) continue;
        out.emplace(lang, ArticleRef::make(lang, title));
      }
    }
    continuation = continuation_token(doc, "llcontinue");
    if (continuation.empty()) return out;
  }
  throw UpstreamUnavailable("too many continuation rounds for " + article.title);
}

}  // namespace geoprov::wiki
