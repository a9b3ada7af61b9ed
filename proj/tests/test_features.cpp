#include <doctest.h>

#include <random>

#include "geoprov/csv.hpp"
#include "geoprov/error.hpp"
#include "geoprov/features.hpp"
#include "geoprov/strings.hpp"
#include "support.hpp"

using namespace geoprov;
using namespace geoprov::features;

namespace {

CountryLabel C(const char* code) { return CountryLabel::parse(code); }

// Random non-overlapping ranges: sorted distinct cut points paired up.
std::vector<IpRange> random_ranges(std::mt19937_64& rng, size_t count) {
  const auto& codes = all_alpha2_codes();
  std::vector<uint32_t> cuts;
  while (cuts.size() < 2 * count) {
    cuts.push_back(static_cast<uint32_t>(rng()));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  }
  std::vector<IpRange> out;
  for (size_t i = 0; i < count; ++i) {
    out.push_back({cuts[2 * i], cuts[2 * i + 1], C(codes[rng() % codes.size()].c_str())});
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

CountryLabel linear_scan(const std::vector<IpRange>& ranges, uint32_t address) {
  for (const auto& r : ranges) {
    if (r.start <= address && address <= r.end) return r.country;
  }
  return CountryLabel();
}

}  // namespace

TEST_CASE("ipv4 parsing") {
  CHECK(parse_ipv4("0.0.0.0") == 0u);
  CHECK(parse_ipv4("255.255.255.255") == 0xffffffffu);
  CHECK(parse_ipv4("192.0.2.1") == 0xc0000201u);
  CHECK_FALSE(parse_ipv4("256.1.1.1"));
  CHECK_FALSE(parse_ipv4("1.2.3"));
  CHECK_FALSE(parse_ipv4("1.2.3.4.5"));
  CHECK_FALSE(parse_ipv4("01a.2.3.4"));
  CHECK_FALSE(parse_ipv4(""));
  CHECK(format_ipv4(0xc0000201u) == "192.0.2.1");
}

TEST_CASE("ip range lookup agrees with a linear scan") {
  std::mt19937_64 rng(2024);
  auto ranges = random_ranges(rng, 1000);
  auto db = IpRangeDb::from_ranges(ranges);
  std::vector<uint32_t> probes;
  for (int i = 0; i < 10000; ++i) {
    // half uniform, half aimed at range boundaries
    if (i % 2 == 0) {
      probes.push_back(static_cast<uint32_t>(rng()));
    } else {
      const auto& r = ranges[rng() % ranges.size()];
      uint32_t candidates[] = {r.start, r.end, r.start - 1, r.end + 1};
      probes.push_back(candidates[rng() % 4]);
    }
  }
  for (uint32_t a : probes) REQUIRE(db.lookup(a) == linear_scan(ranges, a));
  CHECK(db.lookup_batch(probes) == db.lookup_batch_serial(probes));
}

TEST_CASE("ip range db rejects bad tables") {
  CHECK_THROWS_AS(IpRangeDb::from_ranges({{10, 20, C("DE")}, {20, 30, C("FR")}}), DataFormatError);
  CHECK_THROWS_AS(IpRangeDb::from_ranges({{30, 20, C("DE")}}), DataFormatError);
  CHECK_THROWS_AS(IpRangeDb::parse_csv("start_ip,end_ip,country\n1.2.3.4,1.2.3.x,DE\n"), DataFormatError);
  auto db = IpRangeDb::parse_csv("start_ip,end_ip,country\n1.0.0.0,1.0.0.255,AU\n");
  CHECK(db.lookup(*parse_ipv4("1.0.0.7")) == C("AU"));
  CHECK(db.lookup(*parse_ipv4("1.0.1.0")).is_unknown());
}

TEST_CASE("ip_lookup resolves hosts through the backend") {
  auto db = IpRangeDb::load_csv((testing::resource_dir() / "ip_ranges.csv").string());
  testing::MapBackend backend;
  backend.dns["news.example.ua"] = {"198.51.100.7"};
  backend.dns["multi.example"] = {"not-an-ip", "192.0.2.9"};
  Diagnostics diag;
  CHECK(ip_lookup(db, backend, "news.example.ua", &diag) == C("UA"));
  CHECK(ip_lookup(db, backend, "multi.example", &diag) == C("FR"));
  CHECK(ip_lookup(db, backend, "nowhere.example", &diag).is_unknown());
  CHECK(ip_lookup(db, backend, "203.0.113.8", &diag) == C("DE"));
  CHECK(ip_lookup(db, backend, "10.0.0.1", &diag).is_unknown());
  CHECK_FALSE(diag.notes().empty());
}

TEST_CASE("tld lookup expectation table") {
  auto table = TldTable::load_csv((testing::resource_dir() / "cctld.csv").string());
  const std::pair<const char*, const char*> expected[] = {
      {"www.spiegel.de", "DE"},         {"lemonde.fr", "FR"},
      {"www.pravda.com.ua", "UA"},      {"bbc.co.uk", "GB"},
      {"news.bbc.co.uk", "GB"},         {"gov.uk", "GB"},
      {"www.abc.net.au", "AU"},         {"smh.com.au", "AU"},
      {"www.corriere.it", "IT"},        {"elpais.es", "ES"},
      {"www.nu.nl", "NL"},              {"sme.sk", "SK"},
      {"ria.ru", "RU"},                 {"www.nzz.ch", "CH"},
      {"derstandard.at", "AT"},         {"www.asahi.co.jp", "JP"},
      {"folha.uol.com.br", "BR"},       {"www.ynet.co.il", "IL"},
      {"timesofindia.indiatimes.com", "UNKNOWN"},
      {"www.nytimes.com", "UNKNOWN"},   {"www.faz.net", "UNKNOWN"},
      {"wikileaks.org", "UNKNOWN"},     {"example.info", "UNKNOWN"},
      {"mit.edu", "UNKNOWN"},           {"whitehouse.gov", "UNKNOWN"},
      {"nato.int", "UNKNOWN"},          {"business.biz", "UNKNOWN"},
      {"localhost", "UNKNOWN"},         {"example.invalidtld", "UNKNOWN"},
      {"WWW.SPIEGEL.DE", "DE"},         {"spiegel.de.", "DE"},
      {"co.uk", "GB"},                  {"www.stuff.co.nz", "NZ"},
      {"www.kyivpost.com", "UNKNOWN"},  {"www.ukrinform.ua", "UA"},
      {"www.lapresse.ca", "CA"},        {"192.0.2.1", "UNKNOWN"},
  };
  static_assert(std::size(expected) >= 30);
  for (const auto& [host, country] : expected) {
    CAPTURE(host);
    CHECK(tld_lookup(table, host).code() == country);
  }
}

TEST_CASE("tld lookup is invariant under subdomains and case") {
  auto table = TldTable::load_csv((testing::resource_dir() / "cctld.csv").string());
  std::mt19937_64 rng(5);
  const char* hosts[] = {"pravda.com.ua", "bbc.co.uk", "spiegel.de", "nytimes.com", "smh.com.au", "sme.sk"};
  for (const char* host : hosts) {
    CountryLabel base = tld_lookup(table, host);
    std::string h = host;
    for (int depth = 0; depth < 4; ++depth) {
      h = "s" + std::to_string(rng() % 100) + "." + h;
      CHECK(tld_lookup(table, h) == base);
      std::string mixed = h;
      for (auto& c : mixed) {
        if (rng() % 2) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      }
      CHECK(tld_lookup(table, mixed) == base);
    }
  }
}

TEST_CASE("tld table covers every country code and rejects bad suffixes") {
  auto table = TldTable::load_csv((testing::resource_dir() / "cctld.csv").string());
  for (const auto& code : all_alpha2_codes()) {
    CAPTURE(code);
    CHECK(table.lookup("x." + to_lower_ascii(code)).code() == code);
  }
  TldTable t;
  CHECK_THROWS_AS(t.add("de", C("DE")), DataFormatError);
  CHECK(TldTable::is_generic_tld("com"));
  CHECK_FALSE(TldTable::is_generic_tld("de"));
}

TEST_CASE("html stripping") {
  std::string html =
      "<html><head><title>T</title><style>p{color:red}</style><script>var x = '<p>no</p>';</script></head>"
      "<body><!-- hidden --><p>Caf&eacute; &amp; cr&#232;me&nbsp;br&#xFB;l&eacute;e</p><noscript>n</noscript></body></html>";
  CHECK(strip_html(html) == "T Café & crème brûlée");
}

TEST_CASE("language profiles") {
  auto profiles = load_profiles(testing::resource_dir() / "profiles");
  REQUIRE(profiles.size() >= 8);
  for (const auto& p : profiles) {
    validate_profile(p);
    CHECK(profile_from_json(profile_to_json(p)) == p);
  }
  LanguageDetector detector(profiles);

  SUBCASE("corpus text maps to its own language") {
    for (const auto& p : profiles) {
      std::string corpus = read_file((testing::resource_dir() / "corpora" / (p.lang + ".txt")).string());
      CHECK(detector.detect(corpus) == p.lang);
      auto sims = detector.similarities(corpus);
      CHECK(sims[p.lang] == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  SUBCASE("thresholds") {
    CHECK(detector.detect("Kurzer Text.") == "UNKNOWN");
    CHECK(detector.detect("1234567890 1234567890 1234567890 1234567890 !!!") == "UNKNOWN");
    CHECK(detector.detect("Die Bundesregierung hat heute beschlossen, dass die Steuern sinken.") == "de");
  }
  SUBCASE("similarity argmax matches detect") {
    std::string text = "La commission a publié hier un rapport détaillé sur la qualité de l'eau potable.";
    auto sims = detector.similarities(text);
    auto best = std::max_element(sims.begin(), sims.end(),
                                 [](const auto& a, const auto& b) { return a.second < b.second; });
    CHECK(detector.detect(text) == best->first);
    CHECK(best->first == "fr");
  }
  SUBCASE("bad profiles are rejected") {
    NgramProfile bad{"xx", {{"a", 0.5}}};
    CHECK_THROWS_AS(validate_profile(bad), DataFormatError);
    CHECK_THROWS_AS(profile_from_json("{\"lang\": \"de\"}"), DataFormatError);
  }
}

TEST_CASE("normalization is case- and punctuation-insensitive") {
  CHECK(ngram_frequencies("HELLO, World!!") == ngram_frequencies("hello world"));
  CHECK(ngram_frequencies("ПРИВІТ Світ") == ngram_frequencies("привіт, світ"));
  auto f = ngram_frequencies("ab");
  CHECK(f.at("a") == doctest::Approx(0.5));
  CHECK(f.count(" ") == 0);
}

TEST_CASE("feature extractor degrades each field independently") {
  auto ip_db = IpRangeDb::load_csv((testing::resource_dir() / "ip_ranges.csv").string());
  auto tld = TldTable::load_csv((testing::resource_dir() / "cctld.csv").string());
  LanguageDetector detector(load_profiles(testing::resource_dir() / "profiles"));
  testing::MapBackend backend;
  backend.dns["www.spiegel.de"] = {"203.0.113.5"};
  backend.pages["http://www.spiegel.de/a"] = {200, "<p>Die Bundesregierung hat am Mittwoch neue Regeln für den Ausbau der Windkraft beschlossen.</p>"};
  backend.pages["https://gone.example.fr/x"] = {500, "<p>Erreur interne du serveur, veuillez réessayer plus tard s'il vous plaît.</p>"};
  FeatureExtractor extractor(ip_db, tld, detector, backend);

  auto fv = extractor.extract({"http://www.spiegel.de/a", "www.spiegel.de"});
  CHECK(fv == FeatureVector{C("DE"), C("DE"), "de"});
  auto gone = extractor.extract({"https://gone.example.fr/x", "gone.example.fr"});
  CHECK(gone == FeatureVector{CountryLabel(), C("FR"), "UNKNOWN"});
  auto none = extractor.extract({"https://nothing.example.com/", "nothing.example.com"});
  CHECK(none == FeatureVector{});

  std::vector<wiki::Reference> refs;
  for (int i = 0; i < 12; ++i) {
    refs.push_back(i % 3 == 0 ? wiki::Reference{"http://www.spiegel.de/a", "www.spiegel.de"}
                              : wiki::Reference{"https://gone.example.fr/x", "gone.example.fr"});
  }
  auto all = extractor.extract_all(refs);
  REQUIRE(all.size() == refs.size());
  for (size_t i = 0; i < refs.size(); ++i) CHECK(all[i] == (i % 3 == 0 ? fv : gone));
}
