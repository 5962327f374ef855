#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace eyetrack {

// Unicode helpers. Coverage is pinned by tests: ASCII plus the Latin-1
// supplement for casing, and ASCII/Latin-1 punctuation, general
// punctuation (U+2010..U+205E) and currency signs for the punct class.
std::vector<std::uint32_t> decode_utf8(std::string_view s);
std::string encode_utf8(std::uint32_t cp);
bool is_punct_codepoint(std::uint32_t cp);
bool is_upper_codepoint(std::uint32_t cp);
std::uint32_t lower_codepoint(std::uint32_t cp);

// The four context-free token predictors.
struct SurfaceFeatures {
  int length = 0;         // Unicode scalar values, not bytes
  double log_freq = 0.0;  // natural log of word probability
  bool has_upper = false;
  bool has_punct = false;
};

// Word probabilities in (0, 1], keyed by normalized form. Out-of-vocabulary
// words fall back to floor_probability.
struct FrequencyTable {
  std::unordered_map<std::string, double> probabilities;
  double floor_probability = 1e-8;

  // CSV file `word,probability`, lowercase words, one row per word.
  static FrequencyTable load_csv(const std::filesystem::path& path);
  void save_csv(const std::filesystem::path& path) const;

  double probability(std::string_view word) const;
};

// Lowercase and strip leading/trailing punctuation; may return "".
std::string normalize_for_lookup(std::string_view word);

double log_frequency(std::string_view word, const FrequencyTable& table);
SurfaceFeatures extract_surface(std::string_view word, const FrequencyTable& table);

}  // namespace eyetrack
