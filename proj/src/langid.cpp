#include "geoprov/langid.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "geoprov/csv.hpp"
#include "geoprov/error.hpp"
#include "geoprov/strings.hpp"

namespace geoprov::features {

using nlohmann::json;

std::u32string normalize_text(std::string_view text) {
  std::u32string out = U" ";
  for (char32_t c : utf8_decode(text)) {
    if (is_letter(c)) {
      out += fold_case(c);
    } else if (out.back() != U' ') {
      out += U' ';
    }
  }
  if (out.back() != U' ') out += U' ';
  return out;
}

std::map<std::string, double> ngram_frequencies(std::string_view text) {
  std::u32string norm = normalize_text(text);
  std::map<std::string, double> counts;
  double totals[kMaxNgram + 1] = {};
  for (int n = 1; n <= kMaxNgram; ++n) {
    if (norm.size() < static_cast<size_t>(n)) break;
    for (size_t i = 0; i + n <= norm.size(); ++i) {
      std::u32string_view gram(norm.data() + i, n);
      if (gram.find_first_not_of(U' ') == std::u32string_view::npos) continue;
      if (n == 1 && gram[0] == U' ') continue;
      counts[utf8_encode(gram)] += 1.0;
      totals[n] += 1.0;
    }
  }
  for (auto& [gram, count] : counts) {
    auto n = utf8_decode(gram).size();
    count /= totals[n];
  }
  return counts;
}

NgramProfile train_profile(std::string lang, std::string_view corpus) {
  NgramProfile profile{std::move(lang), ngram_frequencies(corpus)};
  validate_profile(profile);
  return profile;
}

void validate_profile(const NgramProfile& profile) {
  if (profile.ngrams.empty()) throw DataFormatError("language profile '" + profile.lang + "' is empty");
  double sums[kMaxNgram + 1] = {};
  bool present[kMaxNgram + 1] = {};
  for (const auto& [gram, freq] : profile.ngrams) {
    size_t n = utf8_decode(gram).size();
    if (n < 1 || n > static_cast<size_t>(kMaxNgram)) {
      throw DataFormatError("language profile '" + profile.lang + "' has a gram of length " + std::to_string(n));
    }
    if (!std::isfinite(freq) || freq < 0) {
      throw DataFormatError("language profile '" + profile.lang + "' has an invalid frequency");
    }
    sums[n] += freq;
    present[n] = true;
  }
  for (int n = 1; n <= kMaxNgram; ++n) {
    if (present[n] && std::abs(sums[n] - 1.0) > 1e-9) {
      throw DataFormatError("language profile '" + profile.lang + "': " + std::to_string(n) +
                            "-gram frequencies sum to " + std::to_string(sums[n]));
    }
  }
}

std::string profile_to_json(const NgramProfile& profile) {
  json doc = {{"lang", profile.lang}, {"ngrams", profile.ngrams}};
  return doc.dump() + "\n";
}

NgramProfile profile_from_json(std::string_view text) {
  NgramProfile profile;
  try {
    json doc = json::parse(text);
    profile.lang = doc.at("lang").get<std::string>();
    profile.ngrams = doc.at("ngrams").get<std::map<std::string, double>>();
  } catch (const json::exception& e) {
    throw DataFormatError(std::string("bad language profile: ") + e.what());
  }
  validate_profile(profile);
  return profile;
}

NgramProfile load_profile(const std::filesystem::path& path) {
  try {
    return profile_from_json(read_file(path.string()));
  } catch (const DataFormatError& e) {
    throw DataFormatError(path.string() + ": " + e.what());
  }
}

std::vector<NgramProfile> load_profiles(const std::filesystem::path& dir) {
  std::vector<NgramProfile> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") out.push_back(load_profile(entry.path()));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.lang < b.lang; });
  return out;
}

// ---------------------------------------------------------------------------

namespace {

bool iequals_at(std::string_view s, size_t pos, std::string_view word) {
  if (pos + word.size() > s.size()) return false;
  for (size_t i = 0; i < word.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[pos + i])) != word[i]) return false;
  }
  return true;
}

size_t ifind(std::string_view s, std::string_view word, size_t from) {
  for (size_t i = from; i + word.size() <= s.size(); ++i) {
    if (iequals_at(s, i, word)) return i;
  }
  return std::string_view::npos;
}

void append_entity(std::string_view entity, std::string& out) {
  static const std::pair<std::string_view, char32_t> kNamed[] = {
#include "html_entities.inc"
  };
  char32_t cp = 0;
  if (!entity.empty() && entity[0] == '#') {
    try {
      if (entity.size() > 1 && (entity[1] == 'x' || entity[1] == 'X')) {
        cp = static_cast<char32_t>(std::stoul(std::string(entity.substr(2)), nullptr, 16));
      } else {
        cp = static_cast<char32_t>(std::stoul(std::string(entity.substr(1))));
      }
    } catch (const std::exception&) {
      return;
    }
  } else {
    auto it = std::lower_bound(std::begin(kNamed), std::end(kNamed), entity,
                               [](const auto& e, std::string_view name) { return e.first < name; });
    if (it != std::end(kNamed) && it->first == entity) cp = it->second;
    if (entity == "apos") cp = U'\'';
  }
  if (cp == 0xA0) cp = U' ';
  if (cp > 0 && cp < 0x110000) {
    out += utf8_encode(std::u32string(1, cp));
  } else {
    out += ' ';
  }
}

}  // namespace

std::string strip_html(std::string_view html) {
  std::string text;
  text.reserve(html.size());
  size_t i = 0;
  while (i < html.size()) {
    char c = html[i];
    if (c == '<') {
      if (html.substr(i, 4) == "<!--") {
        size_t end = html.find("-->", i + 4);
        i = end == std::string_view::npos ? html.size() : end + 3;
        text += ' ';
        continue;
      }
      bool skipped_block = false;
      for (std::string_view block : {"script", "style", "noscript", "template"}) {
        if (iequals_at(html, i + 1, block)) {
          size_t after = i + 1 + block.size();
          if (after < html.size() && (html[after] == '>' || std::isspace(static_cast<unsigned char>(html[after])))) {
            size_t close = ifind(html, "</" + std::string(block), after);
            size_t gt = close == std::string_view::npos ? std::string_view::npos : html.find('>', close);
            i = gt == std::string_view::npos ? html.size() : gt + 1;
            skipped_block = true;
            break;
          }
        }
      }
      if (skipped_block) {
        text += ' ';
        continue;
      }
      char next = i + 1 < html.size() ? html[i + 1] : '\0';
      if (std::isalpha(static_cast<unsigned char>(next)) || next == '/' || next == '!' || next == '?') {
        size_t gt = html.find('>', i);
        i = gt == std::string_view::npos ? html.size() : gt + 1;
        text += ' ';
        continue;
      }
    }
    if (c == '&') {
      size_t semi = html.find(';', i);
      if (semi != std::string_view::npos && semi - i <= 10) {
        append_entity(html.substr(i + 1, semi - i - 1), text);
        i = semi + 1;
        continue;
      }
    }
    text += c;
    ++i;
  }

  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    bool space = std::isspace(static_cast<unsigned char>(ch));
    if (space) {
      if (!out.empty() && out.back() != ' ') out += ' ';
    } else {
      out += ch;
    }
  }
  return std::string(trim(out));
}

// ---------------------------------------------------------------------------

namespace {

// Each n-gram order is scaled to unit length so that the many small trigram
// frequencies weigh as much as the few large unigram ones.
std::unordered_map<std::string, double> order_weighted(const std::map<std::string, double>& freqs, double& norm) {
  double order_norm[kMaxNgram + 1] = {};
  std::unordered_map<std::string, double> out;
  for (const auto& [gram, freq] : freqs) order_norm[utf8_decode(gram).size()] += freq * freq;
  norm = 0;
  for (const auto& [gram, freq] : freqs) {
    double w = freq / std::sqrt(order_norm[utf8_decode(gram).size()]);
    out.emplace(gram, w);
    norm += w * w;
  }
  norm = std::sqrt(norm);
  return out;
}

}  // namespace

LanguageDetector::LanguageDetector(std::vector<NgramProfile> profiles) : profiles_(std::move(profiles)) {
  std::sort(profiles_.begin(), profiles_.end(), [](const auto& a, const auto& b) { return a.lang < b.lang; });
  for (const auto& profile : profiles_) {
    validate_profile(profile);
    double norm = 0;
    tables_.push_back(order_weighted(profile.ngrams, norm));
    norms_.push_back(norm);
  }
}

std::map<std::string, double> LanguageDetector::similarities(std::string_view text) const {
  std::map<std::string, double> out;
  double text_norm = 0;
  auto freqs = order_weighted(ngram_frequencies(text), text_norm);
  for (size_t p = 0; p < profiles_.size(); ++p) {
    double dot = 0;
    for (const auto& [gram, freq] : freqs) {
      auto it = tables_[p].find(gram);
      if (it != tables_[p].end()) dot += freq * it->second;
    }
    double denom = text_norm * norms_[p];
    out[profiles_[p].lang] = denom > 0 ? dot / denom : 0.0;
  }
  return out;
}

std::string LanguageDetector::detect(std::string_view text) const {
  std::string_view trimmed = trim(text);
  if (utf8_decode(trimmed).size() < kMinDetectChars) return std::string(kUnknown);
  std::string best(kUnknown);
  double best_score = -1;
  for (const auto& [lang, score] : similarities(trimmed)) {
    if (score > best_score) {
      best = lang;
      best_score = score;
    }
  }
  if (best_score < kMinSimilarity) return std::string(kUnknown);
  return best;
}

}  // namespace geoprov::features
