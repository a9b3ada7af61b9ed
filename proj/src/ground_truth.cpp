#include "geoprov/ground_truth.hpp"

#include <algorithm>
#include <atomic>
#include <json.hpp>
#include <set>
#include <thread>

#include "geoprov/error.hpp"
#include "geoprov/strings.hpp"

namespace geoprov::truth {

using nlohmann::json;

// ---------------------------------------------------------------------------
// SPARQL

SparqlClient::SparqlClient(Backend& backend, std::string endpoint)
    : backend_(backend), endpoint_(std::move(endpoint)) {}

std::string SparqlClient::request_url(const std::string& query) const {
  char sep = endpoint_.find('?') == std::string::npos ? '?' : '&';
  return endpoint_ + sep + "query=" + percent_encode(query) + "&format=" +
         percent_encode("application/sparql-results+json");
}

std::vector<SparqlRow> SparqlClient::select(const std::string& query) const {
  std::string url = request_url(query);
  HttpResponse response = backend_.get(url);
  if (response.status != 200) {
    throw UpstreamUnavailable("SPARQL endpoint returned HTTP " + std::to_string(response.status));
  }
  std::vector<SparqlRow> rows;
  try {
    json doc = json::parse(response.body);
    for (const json& binding : doc.at("results").at("bindings")) {
      SparqlRow row;
      for (const auto& [var, term] : binding.items()) {
        row[var] = RdfTerm{term.value("type", std::string()), term.value("value", std::string())};
      }
      rows.push_back(std::move(row));
    }
  } catch (const json::exception& e) {
    throw UpstreamUnavailable(std::string("SPARQL endpoint returned malformed results: ") + e.what());
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Host normalization

std::string normalize_host(std::string_view host) {
  std::string h = to_lower_ascii(trim(host));
  while (!h.empty() && h.back() == '.') h.pop_back();
  if (h.starts_with("www.")) h.erase(0, 4);
  return h;
}

std::optional<std::string> homepage_host(std::string_view homepage) {
  std::string_view v = trim(homepage);
  if (size_t scheme = v.find("://"); scheme != std::string_view::npos) v.remove_prefix(scheme + 3);
  size_t slash = v.find('/');
  std::string_view host = v.substr(0, slash);
  if (slash != std::string_view::npos) {
    std::string_view path = v.substr(slash);
    while (path.ends_with('/')) path.remove_suffix(1);
    if (!path.empty()) return std::nullopt;
  }
  if (size_t at = host.rfind('@'); at != std::string_view::npos) host.remove_prefix(at + 1);
  if (size_t colon = host.find(':'); colon != std::string_view::npos) host = host.substr(0, colon);
  std::string out = normalize_host(host);
  if (out.empty()) return std::nullopt;
  return out;
}

std::string edition_of_endpoint(std::string_view endpoint) {
  std::string_view v = endpoint;
  if (size_t scheme = v.find("://"); scheme != std::string_view::npos) v.remove_prefix(scheme + 3);
  std::string host = to_lower_ascii(v.substr(0, v.find_first_of("/:?")));
  constexpr std::string_view kSuffix = ".dbpedia.org";
  if (host.ends_with(kSuffix)) {
    std::string sub = host.substr(0, host.size() - kSuffix.size());
    if (sub != "www" && wiki::is_valid_lang(sub)) return sub;
  }
  return "en";
}

// ---------------------------------------------------------------------------
// LocationResolver

LocationResolver::LocationResolver(const SparqlClient& sparql, const CountryNames& names, ResolverConfig config)
    : sparql_(sparql), names_(names), config_(std::move(config)) {
  if (config_.max_depth < 1) throw InvalidArgument("max_depth must be at least 1");
}

static std::string values_clause(const std::vector<std::string>& iris) {
  std::string out = "VALUES ?p {";
  for (const auto& iri : iris) out += " <" + iri + ">";
  return out + " }";
}

static std::string quote_literal(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string LocationResolver::entities_query(const std::string& host) const {
  return "SELECT DISTINCT ?entity ?page WHERE { " + values_clause(config_.homepage_properties) +
         " ?entity ?p ?page . FILTER(CONTAINS(LCASE(STR(?page)), " + quote_literal(normalize_host(host)) + ")) }";
}

std::string LocationResolver::location_query(const std::string& entity) const {
  return "SELECT ?p ?o ?oc WHERE { " + values_clause(config_.location_properties) + " <" + entity +
         "> ?p ?o . OPTIONAL { ?o <" + config_.place_country_property + "> ?oc } }";
}

std::string LocationResolver::parents_query(const std::string& entity) const {
  return "SELECT DISTINCT ?parent WHERE { " + values_clause(config_.parent_properties) + " <" + entity +
         "> ?p ?parent . FILTER(isIRI(?parent)) }";
}

std::vector<std::string> LocationResolver::matching_entities(const std::string& host) const {
  std::string wanted = normalize_host(host);
  std::set<std::string> out;
  for (const auto& row : sparql_.select(entities_query(host))) {
    auto entity = row.find("entity");
    auto page = row.find("page");
    if (entity == row.end() || page == row.end() || entity->second.type != "uri") continue;
    auto page_host = homepage_host(page->second.value);
    if (page_host && *page_host == wanted) out.insert(entity->second.value);
  }
  return {out.begin(), out.end()};
}

std::optional<CountryLabel> LocationResolver::term_country(const RdfTerm& term) const {
  std::string name = term.value;
  if (term.type == "uri") {
    size_t cut = name.find_last_of("/#");
    if (cut != std::string::npos) name = name.substr(cut + 1);
    try {
      name = percent_decode(name);
    } catch (const InvalidArgument&) {
      return std::nullopt;
    }
  }
  return names_.lookup(name);
}

std::optional<CountryLabel> LocationResolver::entity_location(const std::string& entity) const {
  std::map<std::string, std::set<CountryLabel>> by_property;
  for (const auto& row : sparql_.select(location_query(entity))) {
    auto p = row.find("p");
    auto o = row.find("o");
    if (p == row.end() || o == row.end()) continue;
    std::optional<CountryLabel> country = term_country(o->second);
    if (!country) {
      if (auto oc = row.find("oc"); oc != row.end()) country = term_country(oc->second);
    }
    if (country) by_property[p->second.value].insert(*country);
  }
  for (const auto& property : config_.location_properties) {
    auto it = by_property.find(property);
    if (it != by_property.end() && !it->second.empty()) return *it->second.begin();
  }
  return std::nullopt;
}

std::vector<std::string> LocationResolver::parents(const std::string& entity) const {
  std::set<std::string> out;
  for (const auto& row : sparql_.select(parents_query(entity))) {
    auto parent = row.find("parent");
    if (parent != row.end() && parent->second.type == "uri") out.insert(parent->second.value);
  }
  return {out.begin(), out.end()};
}

std::optional<DomainLocation> LocationResolver::try_resolve(const std::string& host) const {
  // Level-synchronous BFS over all matching entities at once. Frontier
  // chains stay sorted, so the first hit is the shortest chain with the
  // smallest root IRI.
  std::vector<OwnershipChain> frontier;
  for (auto& entity : matching_entities(host)) frontier.push_back({entity});
  std::map<std::string, std::set<std::string>> visited;  // per root entity
  for (const auto& chain : frontier) visited[chain.front()].insert(chain.front());

  for (size_t depth = 1; depth <= config_.max_depth && !frontier.empty(); ++depth) {
    std::sort(frontier.begin(), frontier.end());
    for (const auto& chain : frontier) {
      if (auto country = entity_location(chain.back())) return DomainLocation{*country, chain};
    }
    if (depth == config_.max_depth) break;
    std::vector<OwnershipChain> next;
    for (const auto& chain : frontier) {
      auto& seen = visited[chain.front()];
      for (auto& parent : parents(chain.back())) {
        if (!seen.insert(parent).second) continue;
        OwnershipChain extended = chain;
        extended.push_back(parent);
        next.push_back(std::move(extended));
      }
    }
    frontier = std::move(next);
  }
  return std::nullopt;
}

DomainLocation LocationResolver::resolve_domain_location(const std::string& host) const {
  auto found = try_resolve(host);
  if (!found) throw NotFound("no location for " + host);
  return *found;
}

// ---------------------------------------------------------------------------
// Training set

TrainingSet build_training_set(const std::vector<wiki::ArticleRef>& articles, const wiki::WikiClient& wiki,
                               const features::FeatureExtractor& extractor, const LocationResolver& resolver,
                               const std::string& source_edition, size_t hosts_in_flight) {
  TrainingSet out;
  std::vector<wiki::Reference> host_refs;
  std::set<std::string> seen_hosts;
  for (const auto& article : articles) {
    ++out.summary.articles;
    std::vector<wiki::Reference> refs;
    try {
      refs = wiki.fetch_external_links(article);
    } catch (const ArticleNotFound&) {
      ++out.summary.articles_missing;
      continue;
    }
    for (auto& ref : refs) {
      std::string host = normalize_host(ref.host);
      if (seen_hosts.insert(host).second) host_refs.push_back(std::move(ref));
    }
  }
  out.summary.hosts = host_refs.size();

  std::vector<std::optional<LabeledExample>> results(host_refs.size());
  std::vector<std::exception_ptr> errors(host_refs.size());
  auto label_one = [&](size_t i) {
    try {
      const auto& ref = host_refs[i];
      auto location = resolver.try_resolve(ref.host);
      if (!location) return;
      results[i] = LabeledExample{normalize_host(ref.host), extractor.extract(ref), location->country, source_edition};
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  size_t workers = std::min(std::max<size_t>(1, hosts_in_flight), host_refs.size());
  std::atomic<size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (size_t i = next++; i < host_refs.size(); i = next++) label_one(i);
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (auto& r : results) {
    if (r) {
      out.examples.push_back(std::move(*r));
    } else {
      ++out.summary.not_found;
    }
  }
  out.summary.labeled = out.examples.size();
  return out;
}

}  // namespace geoprov::truth
