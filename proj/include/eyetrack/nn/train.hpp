#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "eyetrack/nn/model.hpp"

namespace eyetrack::nn {

struct TrainConfig {
  double learning_rate = 1e-4;  // paper grid {1e-5, 2e-5, 5e-5, 1e-4}
  int batch_size = 16;          // paper grid {8, 16, 32}
  int epochs = 150;
  std::uint64_t seed = 1;
  // AdamW at the usual defaults; decay skips biases and LayerNorm.
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double weight_decay = 0.01;
};

struct AdamW {
  explicit AdamW(TrainConfig cfg) : cfg(cfg) {}

  TrainConfig cfg;
  std::vector<Mat> m, v;
  long step_count = 0;

  void step(const std::vector<Tensor*>& params);
};

struct EpochLog {
  int epoch = 0;      // 0 is the pre-training evaluation
  double loss = 0.0;  // epoch 0: full-data loss; else mean batch loss
  double seconds = 0.0;
};

struct StageInfo {
  std::string data_label;
  std::string data_hash;
  TrainConfig config;
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

struct Provenance {
  std::string created_at;
  std::vector<StageInfo> stages;
  std::string member_key;  // identity hash of (config, seeds, data)
};

struct NeuralCheckpoint {
  TransformerEncoder model;
  BpeTokenizer tokenizer;
  Provenance provenance;

  void save(const std::filesystem::path& dir) const;
  static NeuralCheckpoint load(const std::filesystem::path& dir);
};

// Random-weight checkpoint for a config + tokenizer pair.
NeuralCheckpoint make_checkpoint(const EncoderConfig& cfg, BpeTokenizer tokenizer,
                                 std::uint64_t seed);

struct TrainCallbacks {
  std::ostream* heartbeat = nullptr;              // one line per epoch
  std::optional<std::filesystem::path> log_file;  // JSONL epoch records
  std::string stage_label;
};

// Fine-tunes every parameter (encoder + head) with AdamW on the summed
// per-feature MSE. Appends a stage to the checkpoint provenance.
std::vector<EpochLog> train(NeuralCheckpoint& ckpt, const Dataset& data,
                            const TrainConfig& cfg, const std::string& data_label,
                            const TrainCallbacks& callbacks = {});

// Stage 1 on the auxiliary data, stage 2 continues from the full weights.
void two_stage_train(NeuralCheckpoint& ckpt, const Dataset& auxiliary, const Dataset& task,
                     const TrainConfig& stage1, const TrainConfig& stage2,
                     const TrainCallbacks& callbacks = {});

// Deterministic inference: one prediction per token, token order.
std::vector<GazeTargets> predict(const NeuralCheckpoint& ckpt, const Dataset& d,
                                 int batch_size = 32);

// Per-word predictions for an ad-hoc batch of sentences.
std::vector<std::vector<GazeTargets>> predict_sentences(const NeuralCheckpoint& ckpt,
                                                        const std::vector<Sentence>& batch);

// Full-data loss (no dropout): per-feature mean over every word, summed.
double dataset_loss(const NeuralCheckpoint& ckpt, const Dataset& d, int batch_size = 32);

// Central-difference check of head (or any named tensor) gradients on one
// batch. Returns the worst relative error over the sampled entries.
double gradient_check(NeuralCheckpoint& ckpt, const Dataset& batch_data,
                      const std::string& tensor_name, int max_entries = 64,
                      double step = 1e-5);

std::string ensemble_member_key(const EncoderConfig& cfg,
                                const std::vector<StageInfo>& stages, std::uint64_t seed);

}  // namespace eyetrack::nn
