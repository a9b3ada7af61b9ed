#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "geoprov/country.hpp"

namespace geoprov::features {

inline constexpr int kMaxNgram = 3;
inline constexpr size_t kMinDetectChars = 40;
inline constexpr double kMinSimilarity = 0.25;

// Relative frequencies of character 1..3-grams for one language. The
// frequencies of each gram length sum to one.
struct NgramProfile {
  std::string lang;
  std::map<std::string, double> ngrams;

  friend bool operator==(const NgramProfile&, const NgramProfile&) = default;
};

// Lower-cased letters separated by single spaces, padded with one space on
// each side. Everything that is not a letter acts as a word break.
std::u32string normalize_text(std::string_view text);

// Per-length normalized n-gram frequencies of `text`.
std::map<std::string, double> ngram_frequencies(std::string_view text);

NgramProfile train_profile(std::string lang, std::string_view corpus);

// Throws DataFormatError when the profile is empty or a gram length does not
// sum to 1 within 1e-9.
void validate_profile(const NgramProfile& profile);

std::string profile_to_json(const NgramProfile& profile);
NgramProfile profile_from_json(std::string_view text);
NgramProfile load_profile(const std::filesystem::path& path);
// Every *.json file in `dir`, sorted by language.
std::vector<NgramProfile> load_profiles(const std::filesystem::path& dir);

// Removes markup, scripts, styles and comments; decodes common entities.
std::string strip_html(std::string_view html);

class LanguageDetector {
 public:
  LanguageDetector() = default;
  explicit LanguageDetector(std::vector<NgramProfile> profiles);

  // Cosine similarity of the text's n-gram vector with each profile.
  std::map<std::string, double> similarities(std::string_view text) const;

  // Best-matching language, or UNKNOWN for short text (< 40 characters after
  // trimming) or a best similarity below 0.25. Ties go to the smaller code.
  std::string detect(std::string_view text) const;

  const std::vector<NgramProfile>& profiles() const { return profiles_; }

 private:
  std::vector<NgramProfile> profiles_;
  std::vector<std::unordered_map<std::string, double>> tables_;
  std::vector<double> norms_;
};

inline std::string detect_language(const LanguageDetector& detector, std::string_view text) {
  return detector.detect(text);
}

}  // namespace geoprov::features
