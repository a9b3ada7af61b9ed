#include "geoprov/evaluation.hpp"

#include <iomanip>
#include <json.hpp>
#include <numeric>
#include <random>
#include <sstream>

#include "geoprov/csv.hpp"
#include "geoprov/error.hpp"
#include "geoprov/strings.hpp"

namespace geoprov::eval {

using nlohmann::json;

LanguageCountryMap LanguageCountryMap::load_csv(const std::string& path) {
  std::map<std::string, CountryLabel> table;
  for (const auto& row : read_csv_file(path, {"language", "country"}).rows) {
    table[std::string(trim(row[0]))] = CountryLabel::parse(trim(row[1]));
  }
  return LanguageCountryMap(std::move(table));
}

CountryLabel LanguageCountryMap::country_of(const std::string& language) const {
  auto it = table_.find(language);
  return it == table_.end() ? CountryLabel::unknown() : it->second;
}

std::optional<std::string> LanguageCountryMap::language_of(const CountryLabel& country) const {
  for (const auto& [lang, c] : table_) {
    if (c == country) return lang;
  }
  return std::nullopt;
}

std::vector<Fold> kfold_split(size_t n, size_t k, uint64_t seed) {
  if (k < 2) throw InvalidArgument("k-fold split needs k >= 2");
  if (n < k) {
    throw TooFewExamples("cannot split " + std::to_string(n) + " examples into " + std::to_string(k) + " folds");
  }
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  for (size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng() % (i + 1)]);

  std::vector<Fold> folds(k);
  const size_t base = n / k;
  const size_t extra = n % k;
  size_t pos = 0;
  for (size_t f = 0; f < k; ++f) {
    size_t size = base + (f < extra ? 1 : 0);
    folds[f].test.assign(order.begin() + pos, order.begin() + pos + size);
    pos += size;
  }
  for (size_t f = 0; f < k; ++f) {
    for (size_t g = 0; g < k; ++g) {
      if (g != f) folds[f].train.insert(folds[f].train.end(), folds[g].test.begin(), folds[g].test.end());
    }
  }
  return folds;
}

CountryLabel implied_country(const features::FeatureVector& fv, classify::Slot slot,
                             const LanguageCountryMap& lang_to_country) {
  switch (slot) {
    case classify::Slot::kIp:
      return fv.ip_country;
    case classify::Slot::kTld:
      return fv.tld_country;
    case classify::Slot::kLanguage:
      return lang_to_country.country_of(fv.page_language);
  }
  return CountryLabel::unknown();
}

bool is_difficult(const features::FeatureVector& fv, const LanguageCountryMap& lang_to_country) {
  const CountryLabel& ip = fv.ip_country;
  const CountryLabel& tld = fv.tld_country;
  CountryLabel lang = lang_to_country.country_of(fv.page_language);
  if (ip.is_unknown() || tld.is_unknown() || lang.is_unknown()) return false;
  return ip != tld && ip != lang && tld != lang;
}

double single_feature_accuracy(std::span<const LabeledExample> dataset, classify::Slot slot,
                               const LanguageCountryMap& lang_to_country) {
  if (dataset.empty()) return 0.0;
  size_t hits = 0;
  for (const auto& ex : dataset) {
    CountryLabel c = implied_country(ex.features, slot, lang_to_country);
    if (!c.is_unknown() && c == ex.label) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(dataset.size());
}

EvalReport evaluate(std::span<const LabeledExample> dataset, const LanguageCountryMap& lang_to_country,
                    const EvalConfig& config) {
  std::vector<Fold> folds = kfold_split(dataset.size(), config.folds, config.seed);
  std::vector<char> model_correct(dataset.size(), 0);

  classify::TrainConfig train_config = config.train;
  train_config.parallel = !config.parallel;  // parallelism goes to one level only

  auto run_fold = [&](size_t f) {
    std::vector<LabeledExample> train_rows;
    train_rows.reserve(folds[f].train.size());
    for (size_t i : folds[f].train) train_rows.push_back(dataset[i]);
    classify::TrainedModel model = classify::train(train_rows, train_config);
    for (size_t i : folds[f].test) {
      model_correct[i] = classify::predict(model, dataset[i].features).label == dataset[i].label;
    }
  };

  const auto n_folds = static_cast<std::ptrdiff_t>(folds.size());
  if (config.parallel) {
    // Exceptions must not escape an OpenMP region; rethrow after the loop.
    std::vector<std::exception_ptr> errors(folds.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t f = 0; f < n_folds; ++f) {
      try {
        run_fold(static_cast<size_t>(f));
      } catch (...) {
        errors[f] = std::current_exception();
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  } else {
    for (std::ptrdiff_t f = 0; f < n_folds; ++f) run_fold(static_cast<size_t>(f));
  }

  EvalReport report;
  report.edition = config.train.edition;
  report.folds = config.folds;
  report.seed = config.seed;
  report.n_total = dataset.size();
  size_t model_hits = 0, ip_hits = 0, model_diff_hits = 0, ip_diff_hits = 0;
  for (size_t i = 0; i < dataset.size(); ++i) {
    const auto& ex = dataset[i];
    bool ip_hit = !ex.features.ip_country.is_unknown() && ex.features.ip_country == ex.label;
    model_hits += model_correct[i];
    ip_hits += ip_hit;
    if (is_difficult(ex.features, lang_to_country)) {
      ++report.n_difficult;
      model_diff_hits += model_correct[i];
      ip_diff_hits += ip_hit;
    }
  }
  auto ratio = [](size_t a, uint64_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); };
  report.model_all = ratio(model_hits, report.n_total);
  report.ip_only_all = ratio(ip_hits, report.n_total);
  report.model_difficult = ratio(model_diff_hits, report.n_difficult);
  report.ip_only_difficult = ratio(ip_diff_hits, report.n_difficult);
  report.contribution_ip = single_feature_accuracy(dataset, classify::Slot::kIp, lang_to_country);
  report.contribution_tld = single_feature_accuracy(dataset, classify::Slot::kTld, lang_to_country);
  report.contribution_language = single_feature_accuracy(dataset, classify::Slot::kLanguage, lang_to_country);
  return report;
}

std::string report_to_json(const EvalReport& r) {
  json doc = {
      {"edition", r.edition},
      {"folds", r.folds},
      {"seed", r.seed},
      {"n_total", r.n_total},
      {"n_difficult", r.n_difficult},
      {"rows",
       {{"model_all", r.model_all},
        {"ip_only_all", r.ip_only_all},
        {"model_difficult", r.model_difficult},
        {"ip_only_difficult", r.ip_only_difficult}}},
      {"contributions", {{"ip", r.contribution_ip}, {"tld", r.contribution_tld}, {"language", r.contribution_language}}},
  };
  return doc.dump(2) + "\n";
}

EvalReport report_from_json(std::string_view text) {
  try {
    json doc = json::parse(text);
    EvalReport r;
    r.edition = doc.at("edition").get<std::string>();
    r.folds = doc.at("folds").get<size_t>();
    r.seed = doc.at("seed").get<uint64_t>();
    r.n_total = doc.at("n_total").get<uint64_t>();
    r.n_difficult = doc.at("n_difficult").get<uint64_t>();
    const json& rows = doc.at("rows");
    r.model_all = rows.at("model_all").get<double>();
    r.ip_only_all = rows.at("ip_only_all").get<double>();
    r.model_difficult = rows.at("model_difficult").get<double>();
    r.ip_only_difficult = rows.at("ip_only_difficult").get<double>();
    const json& c = doc.at("contributions");
    r.contribution_ip = c.at("ip").get<double>();
    r.contribution_tld = c.at("tld").get<double>();
    r.contribution_language = c.at("language").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw DataFormatError(std::string("bad evaluation report: ") + e.what());
  }
}

namespace {

std::string fixed2(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(2) << v;
  return ss.str();
}

std::string percent(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(0) << v * 100 << '%';
  return ss.str();
}

std::string render_grid(const std::vector<std::vector<std::string>>& grid) {
  std::vector<size_t> widths;
  for (const auto& row : grid) {
    widths.resize(std::max(widths.size(), row.size()), 0);
    for (size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], utf8_decode(row[c]).size());
  }
  std::string out;
  for (const auto& row : grid) {
    std::string line;
    for (size_t c = 0; c < row.size(); ++c) {
      std::string cell = row[c];
      size_t pad = widths[c] - utf8_decode(cell).size();
      if (c == 0) {
        line += cell + std::string(pad, ' ');
      } else {
        line += "  " + std::string(pad, ' ') + cell;
      }
    }
    out += std::string(trim(line)) + "\n";
  }
  return out;
}

}  // namespace

std::string render_report_table(const std::vector<EvalReport>& reports) {
  std::vector<std::vector<std::string>> accuracy = {{"Method"}};
  std::vector<std::string> rows[4] = {{"All data: Model"},
                                      {"All data: IP only"},
                                      {"Difficult cases: Model"},
                                      {"Difficult cases: IP only"}};
  std::vector<std::vector<std::string>> contrib = {{"Model", "IP location", "TLD location", "Website Language"}};
  std::vector<std::string> counts = {"Rows (all/difficult)"};
  for (const auto& r : reports) {
    accuracy[0].push_back(r.edition);
    rows[0].push_back(fixed2(r.model_all));
    rows[1].push_back(fixed2(r.ip_only_all));
    rows[2].push_back(fixed2(r.model_difficult));
    rows[3].push_back(fixed2(r.ip_only_difficult));
    counts.push_back(std::to_string(r.n_total) + "/" + std::to_string(r.n_difficult));
    contrib.push_back({r.edition, percent(r.contribution_ip), percent(r.contribution_tld),
                       percent(r.contribution_language)});
  }
  for (auto& row : rows) accuracy.push_back(row);
  accuracy.push_back(counts);
  return "Accuracy\n" + render_grid(accuracy) + "\nFeature contribution\n" + render_grid(contrib);
}

}  // namespace geoprov::eval
