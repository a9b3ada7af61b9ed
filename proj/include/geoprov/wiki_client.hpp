#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geoprov/backend.hpp"

namespace geoprov::wiki {

// One page of one language edition.
struct ArticleRef {
  std::string lang;   // wiki subdomain, [a-z]{2,12}
  std::string title;  // spaces, not underscores

  // Throws MalformedArticleUrl when an invariant does not hold.
  static ArticleRef make(std::string lang, std::string title);

  friend auto operator<=>(const ArticleRef&, const ArticleRef&) = default;
};

// An external link leaving the Wikimedia projects.
struct Reference {
  std::string url;
  std::string host;

  friend bool operator==(const Reference&, const Reference&) = default;
};

bool is_valid_lang(std::string_view lang);

// https://<lang>.wikipedia.org/wiki/<title>, percent-encoded titles accepted.
ArticleRef parse_article_url(std::string_view url);
std::string article_url(const ArticleRef& article);

bool is_wikimedia_host(std::string_view host);

// Normalizes a raw link: protocol-relative links become https, the scheme
// and host are lower-cased. Returns nullopt for anything that is not an
// http(s) URL with a host.
std::optional<Reference> make_reference(std::string_view raw_url);

struct WikiClientOptions {
  // "{lang}" is substituted with the edition code.
  std::string api_pattern = "https://{lang}.wikipedia.org/w/api.php";
  int max_continuations = 200;
};

class WikiClient {
 public:
  explicit WikiClient(Backend& backend, WikiClientOptions options = {});

  // Deduplicated by URL, document order of first occurrence, Wikimedia hosts
  // removed. Throws ArticleNotFound or UpstreamUnavailable.
  std::vector<Reference> fetch_external_links(const ArticleRef& article) const;
  // Sibling editions, never containing article.lang itself.
  std::map<std::string, ArticleRef> fetch_language_links(const ArticleRef& article) const;

  std::string api_url(const std::string& lang) const;
  std::string extlinks_query_url(const ArticleRef& article, const std::string& continuation = "") const;
  std::string langlinks_query_url(const ArticleRef& article, const std::string& continuation = "") const;

 private:
  Backend& backend_;
  WikiClientOptions options_;
};

}  // namespace geoprov::wiki
