#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geoprov/country.hpp"

namespace geoprov::features {

std::optional<uint32_t> parse_ipv4(std::string_view dotted);
std::string format_ipv4(uint32_t address);

struct IpRange {
  uint32_t start = 0;
  uint32_t end = 0;  // inclusive
  CountryLabel country;

  friend bool operator==(const IpRange&, const IpRange&) = default;
};

// Immutable table of non-overlapping IPv4 ranges, sorted by start.
class IpRangeDb {
 public:
  IpRangeDb() = default;

  // Sorts the ranges and rejects overlaps or start > end (DataFormatError).
  static IpRangeDb from_ranges(std::vector<IpRange> ranges);
  // CSV with header `start_ip,end_ip,country`.
  static IpRangeDb load_csv(const std::string& path);
  static IpRangeDb parse_csv(std::string_view text);

  // UNKNOWN when no range covers the address.
  CountryLabel lookup(uint32_t address) const;

  // Batch lookups. The OpenMP kernel and the serial loop must agree exactly.
  std::vector<CountryLabel> lookup_batch(std::span<const uint32_t> addresses) const;
  std::vector<CountryLabel> lookup_batch_serial(std::span<const uint32_t> addresses) const;

  std::span<const IpRange> ranges() const { return ranges_; }
  size_t size() const { return ranges_.size(); }

 private:
  std::vector<IpRange> ranges_;
};

}  // namespace geoprov::features
