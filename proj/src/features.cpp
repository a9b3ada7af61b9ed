#include "geoprov/features.hpp"

#include <atomic>
#include <thread>

#include "geoprov/error.hpp"

namespace geoprov::features {

bool is_language_label(std::string_view code) {
  if (code == kUnknown) return true;
  return code.size() == 2 && code[0] >= 'a' && code[0] <= 'z' && code[1] >= 'a' && code[1] <= 'z';
}

void Diagnostics::add(std::string note) {
  std::lock_guard lock(mu_);
  notes_.push_back(std::move(note));
}

std::vector<std::string> Diagnostics::notes() const {
  std::lock_guard lock(mu_);
  return notes_;
}

CountryLabel ip_lookup(const IpRangeDb& db, Backend& backend, const std::string& host, Diagnostics* diagnostics) {
  std::optional<uint32_t> address = parse_ipv4(host);
  if (!address) {
    std::vector<std::string> addresses;
    try {
      addresses = backend.resolve(host);
    } catch (const std::exception& e) {
      if (diagnostics) diagnostics->add("resolve " + host + ": " + e.what());
      return CountryLabel::unknown();
    }
    for (const auto& a : addresses) {
      address = parse_ipv4(a);
      if (address) break;
    }
    if (!address) {
      if (diagnostics) diagnostics->add("resolve " + host + ": no IPv4 address");
      return CountryLabel::unknown();
    }
  }
  return db.lookup(*address);
}

FeatureExtractor::FeatureExtractor(const IpRangeDb& ip_db, const TldTable& tld_table,
                                   const LanguageDetector& detector, Backend& backend, ExtractorOptions options)
    : ip_db_(ip_db), tld_table_(tld_table), detector_(detector), backend_(backend), options_(options) {}

std::string FeatureExtractor::page_language(const std::string& url, Diagnostics* diagnostics) const {
  try {
    HttpResponse response = backend_.get(url);
    if (response.status < 200 || response.status >= 300) {
      if (diagnostics) diagnostics->add("fetch " + url + ": HTTP " + std::to_string(response.status));
      return std::string(kUnknown);
    }
    if (response.body.size() > options_.max_page_bytes) response.body.resize(options_.max_page_bytes);
    return detector_.detect(strip_html(response.body));
  } catch (const std::exception& e) {
    if (diagnostics) diagnostics->add("fetch " + url + ": " + e.what());
    return std::string(kUnknown);
  }
}

FeatureVector FeatureExtractor::extract(const wiki::Reference& reference, Diagnostics* diagnostics) const {
  FeatureVector fv;
  fv.ip_country = ip_lookup(ip_db_, backend_, reference.host, diagnostics);
  fv.tld_country = tld_lookup(tld_table_, reference.host);
  fv.page_language = page_language(reference.url, diagnostics);
  return fv;
}

std::vector<FeatureVector> FeatureExtractor::extract_all(const std::vector<wiki::Reference>& references,
                                                         Diagnostics* diagnostics) const {
  std::vector<FeatureVector> out(references.size());
  size_t workers = std::min(std::max<size_t>(1, options_.max_concurrent_fetches), references.size());
  if (workers <= 1) {
    for (size_t i = 0; i < references.size(); ++i) out[i] = extract(references[i], diagnostics);
    return out;
  }
  std::atomic<size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (size_t i = next++; i < references.size(); i = next++) out[i] = extract(references[i], diagnostics);
      });
    }
  }
  return out;
}

}  // namespace geoprov::features
