#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geoprov {

inline constexpr std::string_view kUnknown = "UNKNOWN";

// ISO 3166-1 alpha-2 country code, or UNKNOWN.
class CountryLabel {
 public:
  CountryLabel() : code_(kUnknown) {}

  static CountryLabel unknown() { return CountryLabel(); }
  // Accepts an upper-case alpha-2 code or "UNKNOWN"; throws DataFormatError otherwise.
  static CountryLabel parse(std::string_view code);
  static std::optional<CountryLabel> try_parse(std::string_view code);

  const std::string& code() const { return code_; }
  bool is_unknown() const { return code_ == kUnknown; }

  friend auto operator<=>(const CountryLabel&, const CountryLabel&) = default;
  friend bool operator==(const CountryLabel&, const CountryLabel&) = default;

 private:
  explicit CountryLabel(std::string code) : code_(std::move(code)) {}
  std::string code_;
};

bool is_alpha2(std::string_view code);
const std::vector<std::string>& all_alpha2_codes();

// Country names as used in knowledge-base resources ("Germany", "United_Kingdom").
class CountryNames {
 public:
  // CSV with header `alpha2,names`, names separated by ';'.
  static CountryNames load(const std::string& path);

  void add(std::string_view name, CountryLabel label);
  // Case-insensitive; underscores are treated as spaces.
  std::optional<CountryLabel> lookup(std::string_view name) const;
  size_t size() const { return by_name_.size(); }

 private:
  std::map<std::string, CountryLabel> by_name_;
};

}  // namespace geoprov
