#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "geoprov/classifier.hpp"
#include "geoprov/country.hpp"
#include "geoprov/evaluation.hpp"
#include "geoprov/ip_db.hpp"
#include "geoprov/langid.hpp"
#include "geoprov/tld.hpp"

namespace geoprov {

// Lookup tables, language profiles and trained models, loaded once and
// immutable afterwards. Layout of a resource directory:
//   ip_ranges.csv  cctld.csv  countries.csv  lang_to_country.csv
//   profiles/<lang>.json  models/<edition>.json
struct Resources {
  features::IpRangeDb ip_db;
  features::TldTable tld_table;
  features::LanguageDetector detector;
  eval::LanguageCountryMap lang_to_country;
  CountryNames country_names;
  std::map<std::string, classify::TrainedModel> models;

  static Resources load(const std::filesystem::path& dir, bool require_models = true);

  // Throws InvalidArgument for an unknown edition.
  const classify::TrainedModel& model(const std::string& edition) const;
  std::vector<std::string> model_editions() const;
};

// GEOPROV_RESOURCES, or the resources/ directory of the source tree.
std::filesystem::path default_resource_dir();

}  // namespace geoprov
