#include "eyetrack/nn/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iostream>
#include <unordered_map>

#include <json.hpp>

#include "eyetrack/errors.hpp"

namespace eyetrack::nn {

using nlohmann::json;

// ---------------------------------------------------------------- AdamW

void AdamW::step(const std::vector<Tensor*>& params) {
  if (m.empty()) {
    m.reserve(params.size());
    v.reserve(params.size());
    for (const Tensor* t : params) {
      m.push_back(Mat::Zero(t->value.rows(), t->value.cols()));
      v.push_back(Mat::Zero(t->value.rows(), t->value.cols()));
    }
  }
  ++step_count;
  const double bias1 = 1.0 - std::pow(cfg.beta1, step_count);
  const double bias2 = 1.0 - std::pow(cfg.beta2, step_count);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& t = *params[i];
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * t.grad;
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * t.grad.cwiseProduct(t.grad);
    const Mat m_hat = m[i] / bias1;
    const Mat v_hat = v[i] / bias2;
    Mat update = (m_hat.array() / (v_hat.array().sqrt() + cfg.adam_eps)).matrix();
    if (t.decay && cfg.weight_decay > 0.0) update += cfg.weight_decay * t.value;
    t.value -= cfg.learning_rate * update;
  }
}

// ----------------------------------------------------------------- json

namespace {

json config_to_json(const EncoderConfig& cfg) {
  return json{{"checkpoint_name", cfg.checkpoint_name},
              {"vocab_size", cfg.vocab_size},
              {"hidden_dim", cfg.hidden_dim},
              {"num_layers", cfg.num_layers},
              {"num_heads", cfg.num_heads},
              {"ffn_dim", cfg.ffn_dim},
              {"max_sequence_length", cfg.max_sequence_length},
              {"layer_norm_eps", cfg.layer_norm_eps},
              {"dropout", cfg.dropout},
              {"attention_dropout", cfg.attention_dropout},
              {"pad_token_id", cfg.pad_token_id},
              {"bos_token_id", cfg.bos_token_id},
              {"eos_token_id", cfg.eos_token_id},
              {"position_offset", cfg.position_offset}};
}

EncoderConfig config_from_json(const json& j) {
  EncoderConfig cfg;
  cfg.checkpoint_name = j.at("checkpoint_name").get<std::string>();
  cfg.vocab_size = j.at("vocab_size").get<int>();
  cfg.hidden_dim = j.at("hidden_dim").get<int>();
  cfg.num_layers = j.at("num_layers").get<int>();
  cfg.num_heads = j.at("num_heads").get<int>();
  cfg.ffn_dim = j.at("ffn_dim").get<int>();
  cfg.max_sequence_length = j.at("max_sequence_length").get<int>();
  cfg.layer_norm_eps = j.at("layer_norm_eps").get<double>();
  cfg.dropout = j.at("dropout").get<double>();
  cfg.attention_dropout = j.at("attention_dropout").get<double>();
  cfg.pad_token_id = j.at("pad_token_id").get<int>();
  cfg.bos_token_id = j.at("bos_token_id").get<int>();
  cfg.eos_token_id = j.at("eos_token_id").get<int>();
  cfg.position_offset = j.at("position_offset").get<int>();
  return cfg;
}

json train_config_to_json(const TrainConfig& cfg) {
  return json{{"learning_rate", cfg.learning_rate},
              {"batch_size", cfg.batch_size},
              {"epochs", cfg.epochs},
              {"seed", cfg.seed},
              {"beta1", cfg.beta1},
              {"beta2", cfg.beta2},
              {"adam_eps", cfg.adam_eps},
              {"weight_decay", cfg.weight_decay}};
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig cfg;
  cfg.learning_rate = j.at("learning_rate").get<double>();
  cfg.batch_size = j.at("batch_size").get<int>();
  cfg.epochs = j.at("epochs").get<int>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.beta1 = j.value("beta1", 0.9);
  cfg.beta2 = j.value("beta2", 0.999);
  cfg.adam_eps = j.value("adam_eps", 1e-8);
  cfg.weight_decay = j.value("weight_decay", 0.01);
  return cfg;
}

std::string now_utc() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// ------------------------------------------------------------- weights io

constexpr char kWeightsMagic[8] = {'E', 'Y', 'T', 'K', 'W', 'B', '0', '1'};

template <typename T>
void write_pod(std::ofstream& f, T v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T read_pod(std::ifstream& f) {
  T v{};
  f.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

void save_weights(const std::vector<const Tensor*>& params,
                  const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write weights file: " + path.string());
  f.write(kWeightsMagic, sizeof(kWeightsMagic));
  write_pod<std::uint64_t>(f, params.size());
  for (const Tensor* t : params) {
    write_pod<std::uint32_t>(f, static_cast<std::uint32_t>(t->name.size()));
    f.write(t->name.data(), static_cast<std::streamsize>(t->name.size()));
    write_pod<std::uint64_t>(f, static_cast<std::uint64_t>(t->value.rows()));
    write_pod<std::uint64_t>(f, static_cast<std::uint64_t>(t->value.cols()));
    for (Eigen::Index r = 0; r < t->value.rows(); ++r) {
      for (Eigen::Index c = 0; c < t->value.cols(); ++c) {
        write_pod<double>(f, t->value(r, c));
      }
    }
  }
}

void load_weights(const std::vector<Tensor*>& params, const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open weights file: " + path.string());
  char magic[8];
  f.read(magic, sizeof(magic));
  if (!f || std::memcmp(magic, kWeightsMagic, sizeof(magic)) != 0) {
    throw SchemaError("not a weights file: " + path.string());
  }
  std::unordered_map<std::string, Tensor*> by_name;
  for (Tensor* t : params) by_name[t->name] = t;

  const auto n = read_pod<std::uint64_t>(f);
  std::size_t loaded = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto name_len = read_pod<std::uint32_t>(f);
    std::string name(name_len, '\0');
    f.read(name.data(), name_len);
    const auto rows = read_pod<std::uint64_t>(f);
    const auto cols = read_pod<std::uint64_t>(f);
    if (!f) throw ParseError("truncated weights file: " + path.string());
    auto it = by_name.find(name);
    if (it == by_name.end()) {
      throw SchemaError("unknown tensor '" + name + "' in " + path.string());
    }
    Tensor& t = *it->second;
    if (static_cast<std::uint64_t>(t.value.rows()) != rows ||
        static_cast<std::uint64_t>(t.value.cols()) != cols) {
      throw IntegrityError("tensor '" + name + "' shape mismatch in " + path.string());
    }
    for (std::uint64_t r = 0; r < rows; ++r) {
      for (std::uint64_t c = 0; c < cols; ++c) {
        t.value(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            read_pod<double>(f);
      }
    }
    ++loaded;
  }
  if (!f) throw ParseError("truncated weights file: " + path.string());
  if (loaded != params.size()) {
    throw IntegrityError("weights file holds " + std::to_string(loaded) + " tensors, model has " +
                         std::to_string(params.size()));
  }
}

// ------------------------------------------------------------- batching

struct EncodedCorpus {
  std::vector<EncodedSentence> sentences;
  std::vector<Mat> targets;  // per sentence, n_words x 5 (empty when unlabeled)
};

EncodedCorpus encode_corpus(const NeuralCheckpoint& ckpt, const Dataset& d,
                            bool with_targets) {
  EncodedCorpus out;
  out.sentences.reserve(d.sentences.size());
  for (const auto& s : d.sentences) {
    out.sentences.push_back(
        tokenize_align(s, ckpt.tokenizer, ckpt.model.cfg.max_sequence_length));
    if (with_targets) {
      Mat t(s.tokens.size(), kNumFeatures);
      for (std::size_t w = 0; w < s.tokens.size(); ++w) {
        for (std::size_t f = 0; f < kNumFeatures; ++f) t(w, f) = (*s.tokens[w].targets)[f];
      }
      out.targets.push_back(std::move(t));
    }
  }
  return out;
}

PreparedBatch batch_of(const EncodedCorpus& corpus, const std::vector<std::size_t>& indices,
                       std::size_t begin, std::size_t end, int pad_id, Mat* targets) {
  std::vector<const EncodedSentence*> sents;
  sents.reserve(end - begin);
  Eigen::Index n_words = 0;
  for (std::size_t i = begin; i < end; ++i) {
    sents.push_back(&corpus.sentences[indices[i]]);
    n_words += static_cast<Eigen::Index>(
        corpus.sentences[indices[i]].alignment.first_subtoken.size());
  }
  if (targets) {
    targets->resize(n_words, kNumFeatures);
    Eigen::Index row = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const Mat& t = corpus.targets[indices[i]];
      targets->middleRows(row, t.rows()) = t;
      row += t.rows();
    }
  }
  return prepare_batch(sents, pad_id);
}

}  // namespace

// ------------------------------------------------------------ checkpoint

void NeuralCheckpoint::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  {
    json j = config_to_json(model.cfg);
    j["format"] = "eyetrack-checkpoint";
    j["version"] = 1;
    std::ofstream f(dir / "config.json", std::ios::binary);
    if (!f) throw ConfigError("cannot write config.json under " + dir.string());
    f << j.dump(2) << "\n";
  }
  save_weights(model.parameters(), dir / "weights.bin");
  tokenizer.save(dir);
  {
    json stages = json::array();
    for (const auto& s : provenance.stages) {
      stages.push_back({{"data_label", s.data_label},
                        {"data_hash", s.data_hash},
                        {"config", train_config_to_json(s.config)},
                        {"initial_loss", s.initial_loss},
                        {"final_loss", s.final_loss}});
    }
    json j{{"created_at", provenance.created_at.empty() ? now_utc() : provenance.created_at},
           {"member_key", provenance.member_key},
           {"stages", std::move(stages)}};
    std::ofstream f(dir / "provenance.json", std::ios::binary);
    if (!f) throw ConfigError("cannot write provenance.json under " + dir.string());
    f << j.dump(2) << "\n";
  }
}

NeuralCheckpoint NeuralCheckpoint::load(const std::filesystem::path& dir) {
  std::ifstream cf(dir / "config.json", std::ios::binary);
  if (!cf) throw ConfigError("not a checkpoint directory (missing config.json): " + dir.string());
  json cj;
  try {
    cf >> cj;
  } catch (const json::exception& e) {
    throw ParseError("invalid config.json in " + dir.string() + ": " + e.what());
  }
  if (cj.value("format", "") != "eyetrack-checkpoint") {
    throw SchemaError("not a checkpoint config: " + dir.string());
  }

  NeuralCheckpoint ckpt;
  ckpt.model = TransformerEncoder::random_init(config_from_json(cj), 0);
  load_weights(ckpt.model.parameters(), dir / "weights.bin");
  ckpt.tokenizer = BpeTokenizer::from_files(dir / "vocab.json", dir / "merges.txt");

  std::ifstream pf(dir / "provenance.json", std::ios::binary);
  if (pf) {
    json pj;
    try {
      pf >> pj;
    } catch (const json::exception& e) {
      throw ParseError("invalid provenance.json in " + dir.string() + ": " + e.what());
    }
    ckpt.provenance.created_at = pj.value("created_at", "");
    ckpt.provenance.member_key = pj.value("member_key", "");
    if (pj.contains("stages")) {
      for (const auto& sj : pj["stages"]) {
        StageInfo s;
        s.data_label = sj.value("data_label", "");
        s.data_hash = sj.value("data_hash", "");
        if (sj.contains("config")) s.config = train_config_from_json(sj["config"]);
        s.initial_loss = sj.value("initial_loss", 0.0);
        s.final_loss = sj.value("final_loss", 0.0);
        ckpt.provenance.stages.push_back(std::move(s));
      }
    }
  }
  return ckpt;
}

NeuralCheckpoint make_checkpoint(const EncoderConfig& cfg, BpeTokenizer tokenizer,
                                 std::uint64_t seed) {
  NeuralCheckpoint ckpt;
  ckpt.model = TransformerEncoder::random_init(cfg, seed);
  ckpt.tokenizer = std::move(tokenizer);
  ckpt.provenance.created_at = now_utc();
  return ckpt;
}

// -------------------------------------------------------------- training

std::vector<EpochLog> train(NeuralCheckpoint& ckpt, const Dataset& data,
                            const TrainConfig& cfg, const std::string& data_label,
                            const TrainCallbacks& callbacks) {
  if (!data.has_targets) throw IntegrityError("training data has no targets");
  if (cfg.learning_rate <= 0.0 || cfg.batch_size < 1 || cfg.epochs < 0) {
    throw ConfigError("invalid train config (lr > 0, batch_size >= 1, epochs >= 0)");
  }

  const EncodedCorpus corpus = encode_corpus(ckpt, data, true);
  const int pad_id = ckpt.tokenizer.pad_id();
  Rng rng(cfg.seed);
  AdamW optimizer(cfg);
  const std::vector<Tensor*> params = ckpt.model.parameters();

  std::ofstream log_stream;
  if (callbacks.log_file) {
    log_stream.open(*callbacks.log_file, std::ios::binary | std::ios::app);
    if (!log_stream) throw ConfigError("cannot write log file: " + callbacks.log_file->string());
  }
  const std::string label =
      callbacks.stage_label.empty() ? data_label : callbacks.stage_label;
  auto emit = [&](const EpochLog& entry, int total_epochs) {
    if (callbacks.heartbeat) {
      (*callbacks.heartbeat) << label << " epoch " << entry.epoch << "/" << total_epochs
                             << " loss " << entry.loss << " elapsed " << entry.seconds
                             << "s\n";
      callbacks.heartbeat->flush();
    }
    if (log_stream) {
      log_stream << json{{"stage", label},
                         {"epoch", entry.epoch},
                         {"loss", entry.loss},
                         {"seconds", entry.seconds}}
                        .dump()
                 << "\n";
      log_stream.flush();
    }
  };

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  std::vector<EpochLog> logs;
  logs.push_back({0, dataset_loss(ckpt, data, cfg.batch_size), 0.0});
  emit(logs.front(), cfg.epochs);

  std::vector<std::size_t> order(corpus.sentences.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t n_batches = 0;
    for (std::size_t begin = 0; begin < order.size();
         begin += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(order.size(), begin + static_cast<std::size_t>(cfg.batch_size));
      Mat targets;
      const PreparedBatch batch = batch_of(corpus, order, begin, end, pad_id, &targets);

      const Mat pred = forward_words(ckpt.model, batch, true, &rng);
      Mat grad;
      const double loss = summed_mse(pred, targets, &grad);
      if (!std::isfinite(loss)) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                std::to_string(n_batches) + ", lr " +
                                std::to_string(cfg.learning_rate),
                            loss);
      }
      ckpt.model.zero_grads();
      backward_words(ckpt.model, batch, grad);
      optimizer.step(params);
      epoch_loss += loss;
      ++n_batches;
    }
    EpochLog entry{epoch, epoch_loss / static_cast<double>(n_batches), elapsed()};
    logs.push_back(entry);
    emit(entry, cfg.epochs);
  }

  StageInfo stage;
  stage.data_label = data_label;
  stage.data_hash = hex64(dataset_hash(data));
  stage.config = cfg;
  stage.initial_loss = logs.front().loss;
  stage.final_loss = logs.back().loss;
  ckpt.provenance.stages.push_back(stage);
  ckpt.provenance.member_key =
      ensemble_member_key(ckpt.model.cfg, ckpt.provenance.stages, cfg.seed);
  return logs;
}

void two_stage_train(NeuralCheckpoint& ckpt, const Dataset& auxiliary, const Dataset& task,
                     const TrainConfig& stage1, const TrainConfig& stage2,
                     const TrainCallbacks& callbacks) {
  TrainCallbacks cb1 = callbacks;
  cb1.stage_label = (callbacks.stage_label.empty() ? "" : callbacks.stage_label + ":") +
                    std::string("stage1/auxiliary");
  TrainCallbacks cb2 = callbacks;
  cb2.stage_label =
      (callbacks.stage_label.empty() ? "" : callbacks.stage_label + ":") + std::string("stage2/task");
  train(ckpt, auxiliary, stage1, "auxiliary", cb1);
  train(ckpt, task, stage2, "task", cb2);
}

// ------------------------------------------------------------- inference

std::vector<GazeTargets> predict(const NeuralCheckpoint& ckpt, const Dataset& d,
                                 int batch_size) {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  const EncodedCorpus corpus = encode_corpus(ckpt, d, false);
  std::vector<std::size_t> order(corpus.sentences.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<GazeTargets> out;
  out.reserve(d.token_count());
  for (std::size_t begin = 0; begin < order.size();
       begin += static_cast<std::size_t>(batch_size)) {
    const std::size_t end =
        std::min(order.size(), begin + static_cast<std::size_t>(batch_size));
    const PreparedBatch batch =
        batch_of(corpus, order, begin, end, ckpt.tokenizer.pad_id(), nullptr);
    const Mat pred = forward_words(ckpt.model, batch, false, nullptr);
    for (Eigen::Index r = 0; r < pred.rows(); ++r) {
      GazeTargets g;
      for (std::size_t f = 0; f < kNumFeatures; ++f) g[f] = pred(r, f);
      out.push_back(g);
    }
  }
  return out;
}

std::vector<std::vector<GazeTargets>> predict_sentences(const NeuralCheckpoint& ckpt,
                                                        const std::vector<Sentence>& batch) {
  std::vector<EncodedSentence> encoded;
  encoded.reserve(batch.size());
  std::vector<const EncodedSentence*> ptrs;
  for (const auto& s : batch) {
    encoded.push_back(tokenize_align(s, ckpt.tokenizer, ckpt.model.cfg.max_sequence_length));
  }
  for (const auto& e : encoded) ptrs.push_back(&e);
  const PreparedBatch prepared = prepare_batch(ptrs, ckpt.tokenizer.pad_id());
  const Mat pred = forward_words(ckpt.model, prepared, false, nullptr);

  std::vector<std::vector<GazeTargets>> out(batch.size());
  Eigen::Index row = 0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    out[b].resize(prepared.words_per_sentence[b]);
    for (int w = 0; w < prepared.words_per_sentence[b]; ++w) {
      for (std::size_t f = 0; f < kNumFeatures; ++f) out[b][w][f] = pred(row, f);
      ++row;
    }
  }
  return out;
}

double dataset_loss(const NeuralCheckpoint& ckpt, const Dataset& d, int batch_size) {
  if (!d.has_targets) throw IntegrityError("dataset_loss requires targets");
  const EncodedCorpus corpus = encode_corpus(ckpt, d, true);
  std::vector<std::size_t> order(corpus.sentences.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  double sum_sq = 0.0;
  std::size_t n_words = 0;
  for (std::size_t begin = 0; begin < order.size();
       begin += static_cast<std::size_t>(batch_size)) {
    const std::size_t end =
        std::min(order.size(), begin + static_cast<std::size_t>(batch_size));
    Mat targets;
    const PreparedBatch batch =
        batch_of(corpus, order, begin, end, ckpt.tokenizer.pad_id(), &targets);
    const Mat pred = forward_words(ckpt.model, batch, false, nullptr);
    sum_sq += (pred - targets).squaredNorm();
    n_words += static_cast<std::size_t>(pred.rows());
  }
  return sum_sq / static_cast<double>(n_words);
}

// --------------------------------------------------------- gradient check

double gradient_check(NeuralCheckpoint& ckpt, const Dataset& batch_data,
                      const std::string& tensor_name, int max_entries, double step) {
  // Dropout off for a deterministic loss surface.
  std::vector<std::pair<double*, double>> saved;
  auto disable = [&saved](DropoutLayer& layer) {
    saved.emplace_back(&layer.p, layer.p);
    layer.p = 0.0;
  };
  disable(ckpt.model.embeddings.drop);
  for (auto& blk : ckpt.model.blocks) {
    disable(blk.attn.attn_drop);
    disable(blk.attn_out_drop);
    disable(blk.ff_drop);
  }

  const EncodedCorpus corpus = encode_corpus(ckpt, batch_data, true);
  std::vector<std::size_t> order(corpus.sentences.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Mat targets;
  const PreparedBatch batch = batch_of(corpus, order, 0, order.size(),
                                       ckpt.tokenizer.pad_id(), &targets);

  Tensor* tensor = nullptr;
  for (Tensor* t : ckpt.model.parameters()) {
    if (t->name == tensor_name) tensor = t;
  }
  if (!tensor) throw ConfigError("no tensor named '" + tensor_name + "'");

  ckpt.model.zero_grads();
  {
    const Mat pred = forward_words(ckpt.model, batch, true, nullptr);
    Mat grad;
    summed_mse(pred, targets, &grad);
    backward_words(ckpt.model, batch, grad);
  }
  const Mat analytic = tensor->grad;

  auto loss_at = [&] {
    const Mat pred = forward_words(ckpt.model, batch, false, nullptr);
    return summed_mse(pred, targets, nullptr);
  };

  const Eigen::Index total = tensor->value.size();
  const Eigen::Index stride = std::max<Eigen::Index>(1, total / max_entries);
  double worst = 0.0;
  for (Eigen::Index flat = 0; flat < total; flat += stride) {
    const Eigen::Index r = flat % tensor->value.rows();
    const Eigen::Index c = flat / tensor->value.rows();
    const double theta = tensor->value(r, c);
    const double h = step * std::max(1.0, std::abs(theta));
    tensor->value(r, c) = theta + h;
    const double up = loss_at();
    tensor->value(r, c) = theta - h;
    const double down = loss_at();
    tensor->value(r, c) = theta;
    const double fd = (up - down) / (2.0 * h);
    const double a = analytic(r, c);
    const double rel = std::abs(a - fd) / std::max(1e-6, std::abs(a) + std::abs(fd));
    worst = std::max(worst, rel);
  }

  for (auto& [ptr, old] : saved) *ptr = old;
  return worst;
}

std::string ensemble_member_key(const EncoderConfig& cfg,
                                const std::vector<StageInfo>& stages, std::uint64_t seed) {
  json j{{"encoder", config_to_json(cfg)}, {"seed", seed}};
  json sj = json::array();
  for (const auto& s : stages) {
    sj.push_back({{"data_label", s.data_label},
                  {"data_hash", s.data_hash},
                  {"config", train_config_to_json(s.config)}});
  }
  j["stages"] = std::move(sj);
  return hex64(fnv1a(j.dump()));
}

}  // namespace eyetrack::nn
