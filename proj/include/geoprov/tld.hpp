#pragma once

#include <map>
#include <string>
#include <string_view>

#include "geoprov/country.hpp"

namespace geoprov::features {

// ccTLD suffix table. Suffixes carry their leading dot (".de", ".co.uk").
class TldTable {
 public:
  // CSV with header `suffix,country`.
  static TldTable load_csv(const std::string& path);
  static TldTable parse_csv(std::string_view text);

  void add(std::string suffix, CountryLabel country);

  // Longest matching suffix wins; generic TLDs and unmatched hosts are UNKNOWN.
  CountryLabel lookup(std::string_view host) const;

  static bool is_generic_tld(std::string_view tld);

  const std::map<std::string, CountryLabel, std::less<>>& entries() const { return by_suffix_; }

 private:
  std::map<std::string, CountryLabel, std::less<>> by_suffix_;
};

}  // namespace geoprov::features
