#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "eyetrack/nn/train.hpp"

namespace eyetrack {

// Identically configured runs under different seeds, predictions averaged.

struct EnsembleStage {
  std::string label;
  const Dataset* data = nullptr;
  nn::TrainConfig config;  // seed is overridden per member
};

struct EnsembleSpec {
  int n_members = 10;
  std::vector<std::uint64_t> seeds;  // default {1..n}; must be distinct

  std::vector<std::uint64_t> resolved_seeds() const;
};

struct MemberOutcome {
  int index = 0;
  std::uint64_t seed = 0;
  std::filesystem::path dir;
  bool ok = false;
  bool skipped = false;  // already complete per provenance member key
  std::string error;
};

// Trains one checkpoint per seed under out_dir/member_<k>. Members whose
// provenance key already matches are skipped, failures are recorded and the
// partial ensemble stays usable. `jobs` bounds member-level parallelism.
std::vector<MemberOutcome> train_ensemble(
    const std::function<nn::NeuralCheckpoint(std::uint64_t seed)>& make_init,
    const std::vector<EnsembleStage>& stages, const EnsembleSpec& spec,
    const std::filesystem::path& out_dir, int jobs = 1, std::ostream* heartbeat = nullptr);

void write_ensemble_manifest(const std::vector<MemberOutcome>& members,
                             const std::filesystem::path& path);
struct ManifestEntry {
  std::filesystem::path checkpoint_dir;
  std::uint64_t seed = 0;
};
std::vector<ManifestEntry> read_ensemble_manifest(const std::filesystem::path& path);

// Elementwise arithmetic mean; all members must have identical shape.
std::vector<GazeTargets> average_predictions(
    const std::vector<std::vector<GazeTargets>>& member_predictions);

}  // namespace eyetrack
