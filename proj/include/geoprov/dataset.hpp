#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "geoprov/country.hpp"
#include "geoprov/features.hpp"

namespace geoprov {

// One ground-truth row: a host, its features and its true country.
struct LabeledExample {
  std::string host;
  features::FeatureVector features;
  CountryLabel label;  // never UNKNOWN
  std::string source_edition;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

inline const std::vector<std::string>& training_csv_header() {
  static const std::vector<std::string> header = {"host",  "ip_country", "tld_country", "page_language",
                                                  "label", "source_edition"};
  return header;
}

std::string training_csv(const std::vector<LabeledExample>& examples);
void write_training_csv(const std::string& path, const std::vector<LabeledExample>& examples);

// Validates every field; DataFormatError names the offending row.
std::vector<LabeledExample> parse_training_csv(std::string_view text);
std::vector<LabeledExample> read_training_csv(const std::string& path);

}  // namespace geoprov
