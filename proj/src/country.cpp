#include "geoprov/country.hpp"

#include <algorithm>

#include "geoprov/csv.hpp"
#include "geoprov/error.hpp"
#include "geoprov/strings.hpp"

namespace geoprov {

const std::vector<std::string>& all_alpha2_codes() {
  static const std::vector<std::string> codes = {
#include "country_codes.inc"
  };
  return codes;
}

bool is_alpha2(std::string_view code) {
  const auto& codes = all_alpha2_codes();
  return code.size() == 2 && std::binary_search(codes.begin(), codes.end(), code);
}

std::optional<CountryLabel> CountryLabel::try_parse(std::string_view code) {
  if (code == kUnknown) return CountryLabel();
  if (!is_alpha2(code)) return std::nullopt;
  return CountryLabel(std::string(code));
}

CountryLabel CountryLabel::parse(std::string_view code) {
  auto label = try_parse(code);
  if (!label) throw DataFormatError("invalid country code '" + std::string(code) + "'");
  return *label;
}

static std::string name_key(std::string_view name) {
  std::string key = fold_case_utf8(trim(name));
  std::replace(key.begin(), key.end(), '_', ' ');
  return key;
}

void CountryNames::add(std::string_view name, CountryLabel label) {
  by_name_.emplace(name_key(name), std::move(label));
}

std::optional<CountryLabel> CountryNames::lookup(std::string_view name) const {
  auto it = by_name_.find(name_key(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

CountryNames CountryNames::load(const std::string& path) {
  CountryNames names;
  CsvTable table = read_csv_file(path, {"alpha2", "names"});
  for (const auto& row : table.rows) {
    CountryLabel label = CountryLabel::parse(row[0]);
    for (const auto& name : split(row[1], ';')) {
      if (!trim(name).empty()) names.add(name, label);
    }
  }
  return names;
}

}  // namespace geoprov
