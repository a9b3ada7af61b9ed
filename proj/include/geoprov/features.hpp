#pragma once

#include <mutex>
#include <string>
#include <vector>

#include "geoprov/backend.hpp"
#include "geoprov/country.hpp"
#include "geoprov/ip_db.hpp"
#include "geoprov/langid.hpp"
#include "geoprov/tld.hpp"
#include "geoprov/wiki_client.hpp"

namespace geoprov::features {

// The three categorical features of one reference. Undeterminable values are
// UNKNOWN, never empty.
struct FeatureVector {
  CountryLabel ip_country;
  CountryLabel tld_country;
  std::string page_language = std::string(kUnknown);

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// Language code (ISO 639-1) or UNKNOWN.
bool is_language_label(std::string_view code);

// Collects non-fatal failures (DNS misses, unreachable pages) for reporting.
class Diagnostics {
 public:
  void add(std::string note);
  std::vector<std::string> notes() const;

 private:
  mutable std::mutex mu_;
  std::vector<std::string> notes_;
};

CountryLabel ip_lookup(const IpRangeDb& db, Backend& backend, const std::string& host,
                       Diagnostics* diagnostics = nullptr);

inline CountryLabel tld_lookup(const TldTable& table, std::string_view host) { return table.lookup(host); }

struct ExtractorOptions {
  size_t max_concurrent_fetches = 4;
  // Larger bodies are truncated before language detection.
  size_t max_page_bytes = 2 << 20;
};

class FeatureExtractor {
 public:
  FeatureExtractor(const IpRangeDb& ip_db, const TldTable& tld_table, const LanguageDetector& detector,
                   Backend& backend, ExtractorOptions options = {});

  // Never throws on network failure; every field degrades to UNKNOWN on its own.
  FeatureVector extract(const wiki::Reference& reference, Diagnostics* diagnostics = nullptr) const;

  // Order-preserving; at most max_concurrent_fetches references in flight.
  std::vector<FeatureVector> extract_all(const std::vector<wiki::Reference>& references,
                                         Diagnostics* diagnostics = nullptr) const;

  std::string page_language(const std::string& url, Diagnostics* diagnostics) const;

 private:
  const IpRangeDb& ip_db_;
  const TldTable& tld_table_;
  const LanguageDetector& detector_;
  Backend& backend_;
  ExtractorOptions options_;
};

}  // namespace geoprov::features
