#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "geoprov/classifier.hpp"
#include "geoprov/dataset.hpp"

namespace geoprov::eval {

// Language code -> country where the language has its plurality of speakers.
class LanguageCountryMap {
 public:
  LanguageCountryMap() = default;
  explicit LanguageCountryMap(std::map<std::string, CountryLabel> table) : table_(std::move(table)) {}
  // CSV with header `language,country`.
  static LanguageCountryMap load_csv(const std::string& path);

  // UNKNOWN for UNKNOWN or unmapped languages.
  CountryLabel country_of(const std::string& language) const;
  // First language (in code order) mapped to `country`, if any.
  std::optional<std::string> language_of(const CountryLabel& country) const;
  const std::map<std::string, CountryLabel>& table() const { return table_; }

 private:
  std::map<std::string, CountryLabel> table_;
};

struct Fold {
  std::vector<size_t> train;
  std::vector<size_t> test;
};

// Seeded shuffle of 0..n-1 cut into k test folds whose sizes differ by at
// most one (the first n % k folds are one larger). Throws TooFewExamples when
// n < k and InvalidArgument when k < 2.
std::vector<Fold> kfold_split(size_t n, size_t k = 10, uint64_t seed = 42);

// IP, TLD and language-implied countries are all known and pairwise distinct.
bool is_difficult(const features::FeatureVector& fv, const LanguageCountryMap& lang_to_country);

// Country implied by one feature slot (language mapped through the table).
CountryLabel implied_country(const features::FeatureVector& fv, classify::Slot slot,
                             const LanguageCountryMap& lang_to_country);

// Fraction of rows whose single-feature country equals the label; UNKNOWN
// never matches. 0 for an empty dataset.
double single_feature_accuracy(std::span<const LabeledExample> dataset, classify::Slot slot,
                               const LanguageCountryMap& lang_to_country);

struct EvalConfig {
  size_t folds = 10;
  uint64_t seed = 42;
  classify::TrainConfig train;
  // Folds are trained concurrently; results do not depend on it.
  bool parallel = true;
};

struct EvalReport {
  std::string edition;
  double model_all = 0;
  double ip_only_all = 0;
  double model_difficult = 0;
  double ip_only_difficult = 0;
  double contribution_ip = 0;
  double contribution_tld = 0;
  double contribution_language = 0;
  uint64_t n_total = 0;
  uint64_t n_difficult = 0;
  size_t folds = 0;
  uint64_t seed = 0;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// k-fold cross-validated model accuracy next to the IP-only baseline, on all
// rows and on the difficult subset, plus per-feature accuracies.
EvalReport evaluate(std::span<const LabeledExample> dataset, const LanguageCountryMap& lang_to_country,
                    const EvalConfig& config);

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(std::string_view text);
// Aligned text tables: accuracies per method, then feature contributions.
std::string render_report_table(const std::vector<EvalReport>& reports);

}  // namespace geoprov::eval
