#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "eyetrack/corpus.hpp"
#include "eyetrack/features.hpp"
#include "eyetrack/provo.hpp"

namespace eyetrack {

// Synthetic data for tests and pipeline smoke runs. Targets are noisy
// linear functions of the surface features so the regression baselines
// have signal to find; the suite never needs the license-gated corpora.

Dataset make_task_fixture(int n_sentences, std::uint64_t seed, bool with_targets = true,
                          double noise_scale = 1.0);

// Probabilities for the fixture lexicon plus common fillers, Zipf-shaped.
FrequencyTable make_fixture_frequency_table();

std::vector<ProvoRow> make_provo_fixture(int n_texts, int sentences_per_text,
                                         int n_participants, std::uint64_t seed,
                                         double missing_rate = 0.05);

void write_provo_csv(const std::vector<ProvoRow>& rows, const std::filesystem::path& path);

}  // namespace eyetrack
