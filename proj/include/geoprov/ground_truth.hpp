#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geoprov/backend.hpp"
#include "geoprov/country.hpp"
#include "geoprov/dataset.hpp"
#include "geoprov/features.hpp"
#include "geoprov/wiki_client.hpp"

namespace geoprov::truth {

// One value of a SPARQL JSON result binding.
struct RdfTerm {
  std::string type;  // "uri", "literal", "typed-literal" or "bnode"
  std::string value;
};
using SparqlRow = std::map<std::string, RdfTerm>;

class SparqlClient {
 public:
  SparqlClient(Backend& backend, std::string endpoint);

  // SELECT query over HTTP GET, JSON results. Throws UpstreamUnavailable.
  std::vector<SparqlRow> select(const std::string& query) const;
  std::string request_url(const std::string& query) const;
  const std::string& endpoint() const { return endpoint_; }

 private:
  Backend& backend_;
  std::string endpoint_;
};

struct ResolverConfig {
  // Properties linking an entity to its web address.
  std::vector<std::string> homepage_properties = {
      "http://xmlns.com/foaf/0.1/homepage",
      "http://dbpedia.org/property/website",
  };
  // Location-bearing properties, in priority order.
  std::vector<std::string> location_properties = {
      "http://dbpedia.org/ontology/location",
      "http://dbpedia.org/ontology/locationCountry",
      "http://dbpedia.org/ontology/country",
      "http://dbpedia.org/ontology/headquarter",
  };
  // Owner / parent-company edges followed when an entity has no location.
  std::vector<std::string> parent_properties = {
      "http://dbpedia.org/ontology/owner",
      "http://dbpedia.org/ontology/parentCompany",
      "http://dbpedia.org/ontology/owningCompany",
  };
  // Country of a place that is not itself a country.
  std::string place_country_property = "http://dbpedia.org/ontology/country";
  // Maximum number of entities in an ownership chain.
  size_t max_depth = 3;
};

// Entities from the website owner to the entity carrying the location.
using OwnershipChain = std::vector<std::string>;

struct DomainLocation {
  CountryLabel country;
  OwnershipChain chain;
};

// Lower-cased host without a leading "www.".
std::string normalize_host(std::string_view host);
// Host of a homepage IRI/literal with scheme, "www." and trailing slash
// removed; nullopt when the value has a non-root path.
std::optional<std::string> homepage_host(std::string_view homepage);

class LocationResolver {
 public:
  LocationResolver(const SparqlClient& sparql, const CountryNames& names, ResolverConfig config = {});

  // Entities whose homepage matches the host directly carry a location, or
  // one of their owners / parents (breadth-first, up to max_depth entities in
  // the chain) does. Shorter chains win; ties go to the lexicographically
  // smaller IRI. Throws NotFound or UpstreamUnavailable.
  DomainLocation resolve_domain_location(const std::string& host) const;
  std::optional<DomainLocation> try_resolve(const std::string& host) const;

  std::vector<std::string> matching_entities(const std::string& host) const;
  std::optional<CountryLabel> entity_location(const std::string& entity) const;
  std::vector<std::string> parents(const std::string& entity) const;

  std::string entities_query(const std::string& host) const;
  std::string location_query(const std::string& entity) const;
  std::string parents_query(const std::string& entity) const;

  const ResolverConfig& config() const { return config_; }

 private:
  std::optional<CountryLabel> term_country(const RdfTerm& term) const;

  const SparqlClient& sparql_;
  const CountryNames& names_;
  ResolverConfig config_;
};

struct TrainingSetSummary {
  size_t articles = 0;
  size_t articles_missing = 0;
  size_t hosts = 0;
  size_t labeled = 0;
  size_t not_found = 0;
};

struct TrainingSet {
  std::vector<LabeledExample> examples;
  TrainingSetSummary summary;
};

// Hosts of all sampled articles, deduplicated in first-seen order, labeled
// through the resolver. Hosts without a location are skipped and counted.
// Propagates UpstreamUnavailable; missing articles are counted and skipped.
TrainingSet build_training_set(const std::vector<wiki::ArticleRef>& articles, const wiki::WikiClient& wiki,
                               const features::FeatureExtractor& extractor, const LocationResolver& resolver,
                               const std::string& source_edition, size_t hosts_in_flight = 2);

// Edition code of a DBpedia chapter endpoint: "http://de.dbpedia.org/sparql"
// gives "de", the main endpoint gives "en".
std::string edition_of_endpoint(std::string_view endpoint);

}  // namespace geoprov::truth
