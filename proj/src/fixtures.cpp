#include "geoprov/fixtures.hpp"

#include <algorithm>
#include <json.hpp>
#include <set>

#include "geoprov/backend.hpp"
#include "geoprov/country.hpp"
#include "geoprov/csv.hpp"
#include "geoprov/error.hpp"
#include "geoprov/ground_truth.hpp"
#include "geoprov/strings.hpp"
#include "geoprov/wiki_client.hpp"

namespace geoprov {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Term {
  bool iri = false;
  std::string value;
  friend auto operator<=>(const Term&, const Term&) = default;
};

struct Triple {
  Term s, p, o;
};

Term parse_term(const std::string& raw) {
  static const std::pair<std::string_view, std::string_view> kPrefixes[] = {
      {"dbr:", "http://dbpedia.org/resource/"},
      {"dbo:", "http://dbpedia.org/ontology/"},
      {"dbp:", "http://dbpedia.org/property/"},
      {"foaf:", "http://xmlns.com/foaf/0.1/"},
  };
  for (auto [prefix, expansion] : kPrefixes) {
    if (raw.starts_with(prefix)) return {true, std::string(expansion) + raw.substr(prefix.size())};
  }
  if (raw.starts_with("http://") || raw.starts_with("https://")) return {true, raw};
  return {false, raw};
}

json binding(const Term& t) { return {{"type", t.iri ? "uri" : "literal"}, {"value", t.value}}; }

json sparql_result(const std::vector<std::string>& vars, const std::vector<std::map<std::string, Term>>& rows) {
  json bindings = json::array();
  for (const auto& row : rows) {
    json b = json::object();
    for (const auto& [var, term] : row) b[var] = binding(term);
    bindings.push_back(b);
  }
  return {{"head", {{"vars", vars}}}, {"results", {{"bindings", bindings}}}};
}

void write_json_fixture(const fs::path& out, const std::string& url, const json& body, size_t& count) {
  json doc = {{"request", canonical_get(url)}, {"status", 200}, {"json", body}};
  write_file_atomic(FixtureBackend::fixture_path(out, canonical_get(url)).string(), doc.dump(1) + "\n");
  ++count;
}

json page_object(const wiki::ArticleRef& article) { return {{"ns", 0}, {"title", article.title}}; }

}  // namespace

size_t compile_fixtures(const fs::path& src_dir, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::vector<fs::path> manifests;
  for (const auto& entry : fs::directory_iterator(src_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") manifests.push_back(entry.path());
  }
  std::sort(manifests.begin(), manifests.end());

  FixtureBackend unused(out_dir);
  wiki::WikiClient wiki_client(unused);
  size_t count = 0;
  std::set<std::string> linked_hosts;
  struct SparqlSpec {
    std::string endpoint;
    std::vector<Triple> triples;
    std::set<std::string> hosts;
  };
  std::vector<SparqlSpec> sparql_specs;

  for (const auto& path : manifests) {
    json manifest;
    try {
      manifest = json::parse(read_file(path.string()));
    } catch (const json::exception& e) {
      throw DataFormatError(path.string() + ": " + e.what());
    }

    for (const json& article_spec : manifest.value("wiki", json::array())) {
      auto article = wiki::ArticleRef::make(article_spec.at("lang"), article_spec.at("title"));
      if (article_spec.value("missing", false)) {
        json missing = {{"batchcomplete", true},
                        {"query", {{"pages", json::array({{{"ns", 0}, {"title", article.title}, {"missing", true}}})}}}};
        write_json_fixture(out_dir, wiki_client.extlinks_query_url(article), missing, count);
        write_json_fixture(out_dir, wiki_client.langlinks_query_url(article), missing, count);
        continue;
      }
      std::vector<std::string> links = article_spec.value("extlinks", std::vector<std::string>{});
      for (const auto& link : links) {
        if (auto ref = wiki::make_reference(link); ref && !wiki::is_wikimedia_host(ref->host)) {
          linked_hosts.insert(ref->host);
        }
      }
      size_t page_size = article_spec.value("page_size", size_t{0});
      if (page_size == 0) page_size = std::max<size_t>(1, links.size());
      std::string continuation;
      for (size_t start = 0, page = 0; start < std::max<size_t>(links.size(), 1); start += page_size, ++page) {
        json page_obj = page_object(article);
        json extlinks = json::array();
        for (size_t i = start; i < std::min(links.size(), start + page_size); ++i) extlinks.push_back({{"url", links[i]}});
        if (!extlinks.empty()) page_obj["extlinks"] = extlinks;
        json doc = {{"query", {{"pages", json::array({page_obj})}}}};
        bool more = start + page_size < links.size();
        std::string next_token = "page" + std::to_string(page + 1);
        if (more) {
          doc["continue"] = {{"elcontinue", next_token}, {"continue", "||"}};
        } else {
          doc["batchcomplete"] = true;
        }
        write_json_fixture(out_dir, wiki_client.extlinks_query_url(article, continuation), doc, count);
        continuation = next_token;
        if (!more) break;
      }

      json page_obj = page_object(article);
      json langlinks = json::array();
      json langlink_spec = article_spec.value("langlinks", json::object());
      for (const auto& [lang, title] : langlink_spec.items()) {
        langlinks.push_back({{"lang", lang}, {"title", title}});
      }
      if (!langlinks.empty()) page_obj["langlinks"] = langlinks;
      json doc = {{"batchcomplete", true}, {"query", {{"pages", json::array({page_obj})}}}};
      write_json_fixture(out_dir, wiki_client.langlinks_query_url(article), doc, count);
    }

    json dns = manifest.value("dns", json::object());
    for (const auto& [host, addresses] : dns.items()) {
      write_resolve_fixture(out_dir, host, addresses.get<std::vector<std::string>>());
      ++count;
    }

    for (const json& page : manifest.value("pages", json::array())) {
      std::string url = page.at("url");
      if (page.value("unreachable", false)) continue;
      HttpResponse response;
      response.status = page.value("status", 200);
      if (page.contains("file")) {
        response.body = read_file((src_dir / page["file"].get<std::string>()).string());
      } else {
        response.body = page.value("html", std::string());
      }
      write_get_fixture(out_dir, url, response);
      ++count;
    }

    if (manifest.contains("sparql")) {
      const json& s = manifest["sparql"];
      SparqlSpec spec;
      spec.endpoint = s.at("endpoint");
      for (const json& t : s.value("triples", json::array())) {
        spec.triples.push_back({parse_term(t.at(0)), parse_term(t.at(1)), parse_term(t.at(2))});
      }
      for (const json& h : s.value("hosts", json::array())) spec.hosts.insert(h.get<std::string>());
      sparql_specs.push_back(std::move(spec));
    }

    for (const json& raw : manifest.value("raw", json::array())) {
      std::string request = raw.at("request");
      write_file_atomic(FixtureBackend::fixture_path(out_dir, request).string(), raw.dump(1) + "\n");
      ++count;
    }
  }

  // SPARQL answers, evaluated over each endpoint's triples.
  CountryNames no_names;
  for (auto& spec : sparql_specs) {
    truth::SparqlClient client(unused, spec.endpoint);
    truth::LocationResolver resolver(client, no_names);
    const auto& cfg = resolver.config();
    auto in = [](const std::vector<std::string>& list, const std::string& v) {
      return std::find(list.begin(), list.end(), v) != list.end();
    };

    std::set<std::string> hosts = spec.hosts;
    hosts.insert(linked_hosts.begin(), linked_hosts.end());
    for (const auto& host : hosts) {
      std::string needle = truth::normalize_host(host);
      std::vector<std::map<std::string, Term>> rows;
      std::set<std::pair<Term, Term>> distinct;
      for (const auto& t : spec.triples) {
        if (in(cfg.homepage_properties, t.p.value) && to_lower_ascii(t.o.value).find(needle) != std::string::npos &&
            distinct.insert({t.s, t.o}).second) {
          rows.push_back({{"entity", t.s}, {"page", t.o}});
        }
      }
      write_json_fixture(out_dir, client.request_url(resolver.entities_query(host)),
                         sparql_result({"entity", "page"}, rows), count);
    }

    std::set<std::string> entities;
    for (const auto& t : spec.triples) {
      entities.insert(t.s.value);
      if (t.o.iri) entities.insert(t.o.value);
    }
    for (const auto& entity : entities) {
      std::vector<std::map<std::string, Term>> loc_rows;
      std::set<Term> parent_set;
      for (const auto& t : spec.triples) {
        if (t.s.value != entity) continue;
        if (in(cfg.location_properties, t.p.value)) {
          bool any = false;
          for (const auto& u : spec.triples) {
            if (u.s == t.o && u.p.value == cfg.place_country_property) {
              loc_rows.push_back({{"p", t.p}, {"o", t.o}, {"oc", u.o}});
              any = true;
            }
          }
          if (!any) loc_rows.push_back({{"p", t.p}, {"o", t.o}});
        }
        if (in(cfg.parent_properties, t.p.value) && t.o.iri) parent_set.insert(t.o);
      }
      write_json_fixture(out_dir, client.request_url(resolver.location_query(entity)),
                         sparql_result({"p", "o", "oc"}, loc_rows), count);
      std::vector<std::map<std::string, Term>> parent_rows;
      for (const auto& p : parent_set) parent_rows.push_back({{"parent", p}});
      write_json_fixture(out_dir, client.request_url(resolver.parents_query(entity)),
                         sparql_result({"parent"}, parent_rows), count);
    }
  }
  return count;
}

}  // namespace geoprov
