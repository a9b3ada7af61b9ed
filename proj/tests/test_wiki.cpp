#include <doctest.h>

#include <json.hpp>

#include "geoprov/error.hpp"
#include "geoprov/wiki_client.hpp"
#include "support.hpp"

using namespace geoprov;
using namespace geoprov::wiki;

TEST_CASE("article url parsing") {
  auto a = parse_article_url("https://en.wikipedia.org/wiki/2014_Crimean_crisis");
  CHECK(a.lang == "en");
  CHECK(a.title == "2014 Crimean crisis");
  auto b = parse_article_url("http://uk.m.wikipedia.org/wiki/%D0%9A%D1%80%D0%B8%D0%BC?action=view#x");
  CHECK(b.lang == "uk");
  CHECK(b.title == "Крим");
  CHECK(parse_article_url("HTTPS://DE.Wikipedia.org/wiki/Krim-Krise").lang == "de");
  CHECK(parse_article_url(article_url(b)) == b);

  CHECK_THROWS_AS(parse_article_url("https://example.com/wiki/X"), MalformedArticleUrl);
  CHECK_THROWS_AS(parse_article_url("ftp://en.wikipedia.org/wiki/X"), MalformedArticleUrl);
  CHECK_THROWS_AS(parse_article_url("https://en.wikipedia.org/w/index.php?title=X"), MalformedArticleUrl);
  CHECK_THROWS_AS(parse_article_url("https://en.wikipedia.org/wiki/"), MalformedArticleUrl);
  CHECK_THROWS_AS(parse_article_url("https://en.wikipedia.org/wiki/%ZZ"), MalformedArticleUrl);
  CHECK_THROWS_AS(parse_article_url("not a url"), MalformedArticleUrl);
}

TEST_CASE("reference normalization") {
  auto r = make_reference("//WWW.Example.COM:8080/Path?q=1");
  REQUIRE(r);
  CHECK(r->host == "www.example.com");
  CHECK(r->url == "https://www.example.com:8080/Path?q=1");
  CHECK(make_reference("https://user:pw@news.example.ua/")->host == "news.example.ua");
  CHECK_FALSE(make_reference("mailto:someone@example.com"));
  CHECK_FALSE(make_reference("ftp://example.com/file"));
  CHECK_FALSE(make_reference("https://[2001:db8::1]/"));
  CHECK_FALSE(make_reference("https:///nohost"));
  CHECK(is_wikimedia_host("commons.wikimedia.org"));
  CHECK(is_wikimedia_host("wikidata.org"));
  CHECK_FALSE(is_wikimedia_host("notwikipedia.org"));
}

TEST_CASE("external links from the fixture article") {
  FixtureBackend backend(testing::fixture_dir());
  WikiClient client(backend);
  auto refs = client.fetch_external_links(ArticleRef::make("en", "2014 Crimean crisis"));
  // 12 links, two on Wikimedia projects, spread over three continuation pages
  REQUIRE(refs.size() == 10);
  CHECK(refs.front().host == "www.pravda.com.ua");
  CHECK(refs.back().host == "ria.ru");
  for (const auto& r : refs) CHECK_FALSE(is_wikimedia_host(r.host));

  auto siblings = client.fetch_language_links(ArticleRef::make("en", "2014 Crimean crisis"));
  CHECK(siblings.size() == 3);
  CHECK(siblings.at("de").title == "Krimkrise 2014");
  CHECK(siblings.count("en") == 0);

  CHECK(client.fetch_external_links(ArticleRef::make("en", "Empty stub")).empty());
  CHECK_THROWS_AS(client.fetch_external_links(ArticleRef::make("en", "No such article")), ArticleNotFound);
  CHECK_THROWS_AS(client.fetch_external_links(ArticleRef::make("en", "Never recorded")), UpstreamUnavailable);
}

TEST_CASE("api errors and duplicate links") {
  testing::MapBackend backend;
  WikiClient client(backend);
  auto article = ArticleRef::make("en", "Dup");
  nlohmann::json page = {{"title", "Dup"},
                         {"extlinks", {{{"url", "http://a.example/"}}, {{"url", "http://a.example/"}},
                                       {{"url", "//b.example/x"}}, {{"url", "mailto:x@y.z"}}}}};
  backend.pages[client.extlinks_query_url(article)] = {200, nlohmann::json{{"query", {{"pages", {page}}}}}.dump()};
  auto refs = client.fetch_external_links(article);
  REQUIRE(refs.size() == 2);
  CHECK(refs[1].url == "https://b.example/x");

  auto bad = ArticleRef::make("en", "Bad");
  backend.pages[client.extlinks_query_url(bad)] = {200, R"({"error":{"code":"invalidtitle","info":"bad"}})"};
  CHECK_THROWS_AS(client.fetch_external_links(bad), ArticleNotFound);
  auto down = ArticleRef::make("en", "Down");
  backend.pages[client.extlinks_query_url(down)] = {503, "busy"};
  CHECK_THROWS_AS(client.fetch_external_links(down), UpstreamUnavailable);
  auto garbled = ArticleRef::make("en", "Garbled");
  backend.pages[client.extlinks_query_url(garbled)] = {200, "{not json"};
  CHECK_THROWS_AS(client.fetch_external_links(garbled), UpstreamUnavailable);
}
