#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace eyetrack {

inline constexpr std::size_t kNumFeatures = 5;
inline constexpr std::array<std::string_view, kNumFeatures> kFeatureNames{
    "nFix", "FFD", "GPT", "TRT", "fixProp"};

// The five token-level reading measures on the task scale. Official task
// files keep every value in [0, 100]; rescaled auxiliary data and model
// predictions only guarantee finiteness.
struct GazeTargets {
  std::array<double, kNumFeatures> values{};

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  bool all_finite() const;
  bool operator==(const GazeTargets&) const = default;
};

struct TokenRecord {
  long sentence_id = 0;
  long word_id = 0;  // position within the sentence, consecutive
  std::string word;
  std::optional<GazeTargets> targets;
};

struct Sentence {
  long sentence_id = 0;
  std::vector<TokenRecord> tokens;
};

struct Dataset {
  std::vector<Sentence> sentences;  // sentence_ids strictly increasing
  bool has_targets = false;

  std::size_t token_count() const;
  std::vector<const TokenRecord*> tokens() const;  // flat view in corpus order
};

// Throws IntegrityError when a Dataset invariant does not hold.
void validate_dataset(const Dataset& d);

// Single-feature summary; population convention for std_dev.
struct FeatureStats {
  double mean = 0.0;
  double std_dev = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<std::pair<double, std::size_t>> histogram;  // (lower_edge, count)
};

// Task CSV schema: sentence_id,word_id,word[,nFix,FFD,GPT,TRT,fixProp].
// Rows may arrive in any order; the loaded Dataset is sorted by
// (sentence_id, word_id).
Dataset load_task_csv(const std::filesystem::path& path, bool has_targets);

// First `n_train` sentences in corpus order vs. the remainder.
std::pair<Dataset, Dataset> dev_split(const Dataset& d, std::size_t n_train = 600);

// One prediction per token, token order. Values round-trip exactly through
// load_task_csv.
void write_predictions_csv(const Dataset& d, const std::vector<GazeTargets>& preds,
                           const std::filesystem::path& path);

FeatureStats compute_stats(const std::vector<double>& values, int n_bins);
std::array<FeatureStats, kNumFeatures> feature_stats(const Dataset& d, int n_bins);

std::vector<GazeTargets> gather_targets(const Dataset& d);

// Content fingerprint used for training provenance.
std::uint64_t dataset_hash(const Dataset& d);

}  // namespace eyetrack
