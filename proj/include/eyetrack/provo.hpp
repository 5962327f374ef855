#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "eyetrack/corpus.hpp"

namespace eyetrack {

// Header names of the Provo interest-area report; remappable so minor
// release variants load without code changes.
struct ProvoColumnMap {
  std::string participant = "Participant_ID";
  std::string text_id = "Text_ID";
  std::string sentence_number = "Sentence_Number";
  std::string word_number = "Word_In_Sentence_Number";
  std::string word = "Word";
  std::string fixation_count = "IA_FIXATION_COUNT";
  std::string first_fixation_duration = "IA_FIRST_FIXATION_DURATION";
  std::string regression_path_duration = "IA_REGRESSION_PATH_DURATION";
  std::string dwell_time = "IA_DWELL_TIME";
};

// One (participant, word) observation. Empty/NA measure cells stay missing.
struct ProvoRow {
  std::string participant_id;
  long text_id = 0;
  long sentence_number = 0;
  long word_number = 0;
  std::string word;
  std::optional<double> fixation_count;
  std::optional<double> first_fixation_duration;  // ms
  std::optional<double> regression_path_duration;  // ms
  std::optional<double> dwell_time;                // ms
};

std::vector<ProvoRow> load_provo_csv(const std::filesystem::path& path,
                                     const ProvoColumnMap& columns = {});

// Per-word means across participants, before rescaling.
// raw[fixProp] is a proportion in [0, 1].
struct WordAggregate {
  long text_id = 0;
  long sentence_number = 0;
  long word_number = 0;
  std::string word;
  GazeTargets raw;
  int n_participants = 0;
};

struct AggregateReport {
  std::size_t words_excluded = 0;  // keys with no usable observation at all
};

// Missing-value policy: absent fixation_count / dwell_time count as 0
// (a skipped word has zero fixations and zero dwell); absent
// first_fixation_duration / regression_path_duration are left out of that
// word's mean.
std::vector<WordAggregate> aggregate_words(const std::vector<ProvoRow>& rows,
                                           AggregateReport* report = nullptr);

// x' = (x - mean_src) / std_src * target_std + target_mean, population
// convention. Throws IntegrityError when the source is constant.
std::vector<double> affine_rescale(const std::vector<double>& values, double target_mean,
                                   double target_std);

struct ProvoBuildResult {
  Dataset dataset;
  std::array<FeatureStats, kNumFeatures> raw_stats;
  std::array<FeatureStats, kNumFeatures> rescaled_stats;
  std::array<std::size_t, kNumFeatures> outside_task_range{};  // values outside [0,100]
  std::size_t words_excluded = 0;
};

// Sentences grouped on (text_id, sentence_number); sentence_ids assigned
// sequentially from kProvoSentenceIdOffset so they cannot collide with task
// ids. No clamping after the rescale.
inline constexpr long kProvoSentenceIdOffset = 100000;

ProvoBuildResult build_provo_dataset(const std::vector<WordAggregate>& aggregates,
                                     const std::array<FeatureStats, kNumFeatures>& task_stats,
                                     int hist_bins = 20);

// `feature,stage,mean,std,min,max` with stage in {raw, rescaled, task}.
void write_stats_csv(const ProvoBuildResult& result,
                     const std::array<FeatureStats, kNumFeatures>& task_stats,
                     const std::filesystem::path& path);

// `feature,stage,lower_edge,count` histogram dumps for external plotting.
void write_histogram_csv(const ProvoBuildResult& result,
                         const std::array<FeatureStats, kNumFeatures>& task_stats,
                         const std::filesystem::path& path);

}  // namespace eyetrack
