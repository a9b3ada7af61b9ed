#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geoprov/dataset.hpp"
#include "geoprov/evaluation.hpp"

namespace geoprov::eval {

// Noise-channel generator standing in for a crawled ground-truth corpus.
// Each row draws a true country from `prior`; each feature reports the true
// country (or its language) with probability 1 - noise, otherwise UNKNOWN
// (share `unknown_share` of the noisy draws) or a uniformly chosen other class.
struct SyntheticConfig {
  size_t n = 2000;
  std::vector<CountryLabel> classes;
  std::vector<double> prior;  // empty means uniform
  double noise_ip = 0.45;
  double noise_tld = 0.20;
  double noise_language = 0.25;
  double unknown_share = 0.0;
  uint64_t seed = 42;
  std::string edition = "synthetic";
};

// Eight classes whose languages map one-to-one onto them.
std::vector<CountryLabel> default_synthetic_classes();

// Throws InvalidArgument when a class has no language in `lang_to_country`,
// or for a malformed prior or noise rate.
std::vector<LabeledExample> generate_synthetic(const SyntheticConfig& config, const LanguageCountryMap& lang_to_country);

}  // namespace geoprov::eval
