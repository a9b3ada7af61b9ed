#include "geoprov/ip_db.hpp"

#include <algorithm>
#include <charconv>

#include "geoprov/csv.hpp"
#include "geoprov/error.hpp"
#include "geoprov/strings.hpp"

namespace geoprov::features {

std::optional<uint32_t> parse_ipv4(std::string_view dotted) {
  uint32_t address = 0;
  int parts = 0;
  const char* p = dotted.data();
  const char* end = dotted.data() + dotted.size();
  while (parts < 4) {
    if (p == end) return std::nullopt;
    unsigned value = 0;
    auto [next, ec] = std::from_chars(p, end, value);
    if (ec != std::errc() || value > 255 || next - p > 3) return std::nullopt;
    address = (address << 8) | value;
    p = next;
    ++parts;
    if (parts < 4) {
      if (p == end || *p != '.') return std::nullopt;
      ++p;
    }
  }
  if (p != end) return std::nullopt;
  return address;
}

std::string format_ipv4(uint32_t address) {
  return std::to_string(address >> 24) + "." + std::to_string((address >> 16) & 255) + "." +
         std::to_string((address >> 8) & 255) + "." + std::to_string(address & 255);
}

IpRangeDb IpRangeDb::from_ranges(std::vector<IpRange> ranges) {
  std::sort(ranges.begin(), ranges.end(), [](const IpRange& a, const IpRange& b) { return a.start < b.start; });
  for (size_t i = 0; i < ranges.size(); ++i) {
    if (ranges[i].start > ranges[i].end) {
      throw DataFormatError("IP range " + format_ipv4(ranges[i].start) + "-" + format_ipv4(ranges[i].end) +
                            " has start > end");
    }
    if (i > 0 && ranges[i].start <= ranges[i - 1].end) {
      throw DataFormatError("IP range starting at " + format_ipv4(ranges[i].start) + " overlaps its predecessor");
    }
  }
  IpRangeDb db;
  db.ranges_ = std::move(ranges);
  return db;
}

static IpRangeDb from_table(const CsvTable& table) {
  std::vector<IpRange> ranges;
  ranges.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    auto start = parse_ipv4(trim(row[0]));
    auto end = parse_ipv4(trim(row[1]));
    if (!start || !end) throw DataFormatError("bad IPv4 address in row '" + join(row, ",") + "'");
    ranges.push_back({*start, *end, CountryLabel::parse(trim(row[2]))});
  }
  return IpRangeDb::from_ranges(std::move(ranges));
}

IpRangeDb IpRangeDb::parse_csv(std::string_view text) {
  return from_table(geoprov::parse_csv(text, {"start_ip", "end_ip", "country"}));
}

IpRangeDb IpRangeDb::load_csv(const std::string& path) {
  return from_table(read_csv_file(path, {"start_ip", "end_ip", "country"}));
}

CountryLabel IpRangeDb::lookup(uint32_t address) const {
  // First range starting after the address; its predecessor is the only candidate.
  auto it = std::upper_bound(ranges_.begin(), ranges_.end(), address,
                             [](uint32_t a, const IpRange& r) { return a < r.start; });
  if (it == ranges_.begin()) return CountryLabel::unknown();
  --it;
  return address <= it->end ? it->country : CountryLabel::unknown();
}

std::vector<CountryLabel> IpRangeDb::lookup_batch(std::span<const uint32_t> addresses) const {
  std::vector<CountryLabel> out(addresses.size());
  const auto n = static_cast<std::ptrdiff_t>(addresses.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = lookup(addresses[i]);
  }
  return out;
}

std::vector<CountryLabel> IpRangeDb::lookup_batch_serial(std::span<const uint32_t> addresses) const {
  std::vector<CountryLabel> out;
  out.reserve(addresses.size());
  for (uint32_t a : addresses) out.push_back(lookup(a));
  return out;
}

}  // namespace geoprov::features
