#include <doctest.h>

#include <random>
#include <set>

#include "geoprov/error.hpp"
#include "geoprov/evaluation.hpp"
#include "geoprov/synthetic.hpp"
#include "support.hpp"

using namespace geoprov;
using namespace geoprov::eval;

namespace {

CountryLabel C(const std::string& code) { return CountryLabel::parse(code); }

LanguageCountryMap shipped_map() {
  return LanguageCountryMap::load_csv((testing::resource_dir() / "lang_to_country.csv").string());
}

}  // namespace

TEST_CASE("kfold_split partitions every size from 10 to 1000") {
  std::mt19937_64 rng(1);
  for (size_t n = 10; n <= 1000; ++n) {
    size_t k = 2 + rng() % 9;
    if (n % 7 == 0) k = 10;
    auto folds = kfold_split(n, k, rng());
    REQUIRE(folds.size() == k);
    std::vector<int> seen(n, 0);
    size_t lo = n, hi = 0;
    for (const auto& f : folds) {
      lo = std::min(lo, f.test.size());
      hi = std::max(hi, f.test.size());
      for (size_t i : f.test) ++seen[i];
      REQUIRE(f.train.size() + f.test.size() == n);
      std::set<size_t> train(f.train.begin(), f.train.end());
      for (size_t i : f.test) REQUIRE(train.count(i) == 0);
    }
    REQUIRE(hi - lo <= 1);
    for (int s : seen) REQUIRE(s == 1);
  }
}

TEST_CASE("kfold_split is seeded and validates arguments") {
  CHECK(kfold_split(50, 5, 3)[0].test == kfold_split(50, 5, 3)[0].test);
  CHECK(kfold_split(50, 5, 3)[0].test != kfold_split(50, 5, 4)[0].test);
  CHECK_THROWS_AS(kfold_split(9, 10), TooFewExamples);
  CHECK_THROWS_AS(kfold_split(100, 1), InvalidArgument);
  auto folds = kfold_split(23, 10);
  for (size_t i = 0; i < folds.size(); ++i) CHECK(folds[i].test.size() == (i < 3 ? 3u : 2u));
}

TEST_CASE("difficult cases and implied countries") {
  auto map = shipped_map();
  CHECK(map.country_of("uk") == C("UA"));
  CHECK(map.country_of("en") == C("US"));
  CHECK(map.country_of("xx").is_unknown());
  CHECK(map.language_of(C("DE")) == "de");
  CHECK(is_difficult({C("US"), C("FR"), "de"}, map));
  CHECK_FALSE(is_difficult({C("US"), C("FR"), "fr"}, map));
  CHECK_FALSE(is_difficult({C("US"), C("US"), "de"}, map));
  CHECK_FALSE(is_difficult({C("US"), CountryLabel(), "de"}, map));
  CHECK_FALSE(is_difficult({C("US"), C("FR"), "UNKNOWN"}, map));
  CHECK(implied_country({C("US"), C("FR"), "uk"}, classify::Slot::kLanguage, map) == C("UA"));
}

TEST_CASE("single-feature accuracies follow the synthetic noise rates") {
  auto map = shipped_map();
  SyntheticConfig config;
  config.classes = default_synthetic_classes();
  config.n = 20000;
  for (double unknown_share : {0.0, 0.5}) {
    config.unknown_share = unknown_share;
    auto data = generate_synthetic(config, map);
    REQUIRE(data.size() == config.n);
    CHECK(std::abs(single_feature_accuracy(data, classify::Slot::kIp, map) - 0.55) <= 0.05);
    CHECK(std::abs(single_feature_accuracy(data, classify::Slot::kTld, map) - 0.80) <= 0.05);
    CHECK(std::abs(single_feature_accuracy(data, classify::Slot::kLanguage, map) - 0.75) <= 0.05);
    size_t unknown_ip = 0;
    for (const auto& ex : data) unknown_ip += ex.features.ip_country.is_unknown();
    CHECK(std::abs(unknown_ip / double(data.size()) - 0.45 * unknown_share) <= 0.02);
  }
  CHECK(single_feature_accuracy({}, classify::Slot::kIp, map) == 0.0);
}

TEST_CASE("synthetic generator honours the prior and the seed") {
  auto map = shipped_map();
  SyntheticConfig config;
  config.classes = {C("DE"), C("FR")};
  config.prior = {0.9, 0.1};
  config.n = 5000;
  auto data = generate_synthetic(config, map);
  size_t de = 0;
  for (const auto& ex : data) de += ex.label == C("DE");
  CHECK(std::abs(de / 5000.0 - 0.9) <= 0.02);
  CHECK(generate_synthetic(config, map) == data);
  config.seed = 43;
  CHECK_FALSE(generate_synthetic(config, map) == data);
  config.prior = {1.0};
  CHECK_THROWS_AS(generate_synthetic(config, map), InvalidArgument);
}

TEST_CASE("evaluation is deterministic and independent of parallelism") {
  auto map = shipped_map();
  SyntheticConfig sc;
  sc.classes = default_synthetic_classes();
  sc.n = 400;
  auto data = generate_synthetic(sc, map);
  EvalConfig config;
  config.train.svm.epochs = 20;
  auto a = evaluate(data, map, config);
  config.parallel = false;
  auto b = evaluate(data, map, config);
  CHECK(a == b);
  CHECK(report_to_json(a) == report_to_json(b));
  CHECK(report_from_json(report_to_json(a)) == a);

  for (double acc : {a.model_all, a.ip_only_all, a.model_difficult, a.ip_only_difficult, a.contribution_ip,
                     a.contribution_tld, a.contribution_language}) {
    CHECK(acc >= 0.0);
    CHECK(acc <= 1.0);
  }
  size_t difficult = 0;
  for (const auto& ex : data) difficult += is_difficult(ex.features, map);
  CHECK(a.n_difficult == difficult);
  CHECK(a.n_total == 400);
  CHECK(a.ip_only_all == doctest::Approx(single_feature_accuracy(data, classify::Slot::kIp, map)));

  auto table = render_report_table({a});
  CHECK(table.find("All data: Model") != std::string::npos);
  CHECK(table.find("IP location") != std::string::npos);

  auto tiny = std::vector<LabeledExample>(data.begin(), data.begin() + 5);
  CHECK_THROWS_AS(evaluate(tiny, map, EvalConfig{}), TooFewExamples);
}
