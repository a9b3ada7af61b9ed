#include "geoprov/resources.hpp"

#include <cstdlib>

#include "geoprov/error.hpp"

namespace geoprov {

namespace fs = std::filesystem;

Resources Resources::load(const fs::path& dir, bool require_models) {
  Resources r;
  r.ip_db = features::IpRangeDb::load_csv((dir / "ip_ranges.csv").string());
  r.tld_table = features::TldTable::load_csv((dir / "cctld.csv").string());
  r.detector = features::LanguageDetector(features::load_profiles(dir / "profiles"));
  r.lang_to_country = eval::LanguageCountryMap::load_csv((dir / "lang_to_country.csv").string());
  r.country_names = CountryNames::load((dir / "countries.csv").string());
  fs::path models = dir / "models";
  if (fs::is_directory(models)) {
    for (const auto& entry : fs::directory_iterator(models)) {
      if (entry.path().extension() != ".json") continue;
      r.models.emplace(entry.path().stem().string(), classify::load_model(entry.path().string()));
    }
  }
  if (require_models && r.models.empty()) throw DataFormatError("no models found in " + models.string());
  return r;
}

const classify::TrainedModel& Resources::model(const std::string& edition) const {
  auto it = models.find(edition);
  if (it == models.end()) throw InvalidArgument("unknown model edition '" + edition + "'");
  return it->second;
}

std::vector<std::string> Resources::model_editions() const {
  std::vector<std::string> out;
  for (const auto& [edition, model] : models) out.push_back(edition);
  return out;
}

fs::path default_resource_dir() {
  if (const char* env = std::getenv("GEOPROV_RESOURCES"); env && *env) return env;
  return GEOPROV_RESOURCE_DIR;
}

}  // namespace geoprov
