#include "geoprov/tld.hpp"

#include "geoprov/csv.hpp"
#include "geoprov/error.hpp"
#include "geoprov/strings.hpp"

namespace geoprov::features {

bool TldTable::is_generic_tld(std::string_view tld) {
  static constexpr std::string_view kGeneric[] = {"com", "org", "net", "info", "edu", "gov", "int", "biz"};
  if (tld.starts_with('.')) tld.remove_prefix(1);
  for (auto g : kGeneric) {
    if (tld == g) return true;
  }
  return false;
}

void TldTable::add(std::string suffix, CountryLabel country) {
  suffix = to_lower_ascii(trim(suffix));
  if (suffix.size() < 2 || suffix.front() != '.') {
    throw DataFormatError("ccTLD suffix must start with a dot: '" + suffix + "'");
  }
  by_suffix_[std::move(suffix)] = std::move(country);
}

static TldTable from_table(const CsvTable& table) {
  TldTable out;
  for (const auto& row : table.rows) out.add(row[0], CountryLabel::parse(trim(row[1])));
  return out;
}

TldTable TldTable::parse_csv(std::string_view text) { return from_table(geoprov::parse_csv(text, {"suffix", "country"})); }

TldTable TldTable::load_csv(const std::string& path) { return from_table(read_csv_file(path, {"suffix", "country"})); }

CountryLabel TldTable::lookup(std::string_view host_in) const {
  std::string host = "." + to_lower_ascii(trim(host_in));
  while (host.size() > 1 && host.back() == '.') host.pop_back();
  size_t last_dot = host.rfind('.');
  if (is_generic_tld(std::string_view(host).substr(last_dot))) return CountryLabel::unknown();

  // Candidate suffixes from longest to shortest: ".a.b.c", ".b.c", ".c".
  for (size_t pos = 0; pos != std::string::npos && pos < host.size(); pos = host.find('.', pos + 1)) {
    auto it = by_suffix_.find(std::string_view(host).substr(pos));
    if (it != by_suffix_.end()) return it->second;
  }
  return CountryLabel::unknown();
}

}  // namespace geoprov::features
