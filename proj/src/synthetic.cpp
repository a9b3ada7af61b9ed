#include "geoprov/synthetic.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "geoprov/error.hpp"

namespace geoprov::eval {

std::vector<CountryLabel> default_synthetic_classes() {
  std::vector<CountryLabel> out;
  for (const char* c : {"DE", "ES", "FR", "IT", "NL", "SK", "UA", "US"}) out.push_back(CountryLabel::parse(c));
  return out;
}

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

size_t pick_other(std::mt19937_64& rng, size_t count, size_t exclude) {
  size_t r = rng() % (count - 1);
  return r >= exclude ? r + 1 : r;
}

void check_rate(double rate, const char* name) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw InvalidArgument(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

std::vector<LabeledExample> generate_synthetic(const SyntheticConfig& config,
                                               const LanguageCountryMap& lang_to_country) {
  const auto& classes = config.classes;
  if (classes.size() < 2) throw InvalidArgument("synthetic generator needs at least two classes");
  check_rate(config.noise_ip, "noise_ip");
  check_rate(config.noise_tld, "noise_tld");
  check_rate(config.noise_language, "noise_language");
  check_rate(config.unknown_share, "unknown_share");

  std::vector<std::string> languages;
  for (const auto& c : classes) {
    auto lang = lang_to_country.language_of(c);
    if (!lang) throw InvalidArgument("no language maps to " + c.code());
    languages.push_back(*lang);
  }

  std::vector<double> cumulative(classes.size());
  if (config.prior.empty()) {
    for (size_t i = 0; i < classes.size(); ++i) cumulative[i] = static_cast<double>(i + 1) / classes.size();
  } else {
    if (config.prior.size() != classes.size()) throw InvalidArgument("prior size differs from class count");
    double total = std::accumulate(config.prior.begin(), config.prior.end(), 0.0);
    if (!(total > 0)) throw InvalidArgument("prior must have positive mass");
    double run = 0;
    for (size_t i = 0; i < classes.size(); ++i) {
      if (config.prior[i] < 0) throw InvalidArgument("prior weights must be non-negative");
      run += config.prior[i] / total;
      cumulative[i] = run;
    }
  }
  cumulative.back() = 1.0;

  std::mt19937_64 rng(config.seed);
  // Index of the reported class, or -1 for UNKNOWN.
  auto channel = [&](size_t truth, double noise) -> long {
    if (uniform01(rng) >= noise) return static_cast<long>(truth);
    if (uniform01(rng) < config.unknown_share) return -1;
    return static_cast<long>(pick_other(rng, classes.size(), truth));
  };

  std::vector<LabeledExample> out;
  out.reserve(config.n);
  for (size_t row = 0; row < config.n; ++row) {
    double u = uniform01(rng);
    size_t truth = std::lower_bound(cumulative.begin(), cumulative.end(), u,
                                    [](double c, double v) { return c <= v; }) - cumulative.begin();
    if (truth >= classes.size()) truth = classes.size() - 1;

    LabeledExample ex;
    ex.host = "site" + std::to_string(row) + ".synthetic";
    ex.label = classes[truth];
    ex.source_edition = config.edition;
    long ip = channel(truth, config.noise_ip);
    long tld = channel(truth, config.noise_tld);
    long lang = channel(truth, config.noise_language);
    ex.features.ip_country = ip < 0 ? CountryLabel::unknown() : classes[ip];
    ex.features.tld_country = tld < 0 ? CountryLabel::unknown() : classes[tld];
    ex.features.page_language = lang < 0 ? std::string(kUnknown) : languages[lang];
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace geoprov::eval
