#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eyetrack/matrix.hpp"
#include "eyetrack/nn/tokenizer.hpp"
#include "eyetrack/rng.hpp"

namespace eyetrack::nn {

// Bidirectional post-LN transformer encoder (RoBERTa layout) with a 5-output
// linear regression head on the last hidden layer. Forward and backward are
// written out by hand; activations live in (batch*seq_len, hidden) matrices.
//
// Caches are only written when forward runs in training mode, so inference
// on a shared model is safe for concurrent readers.

struct EncoderConfig {
  std::string checkpoint_name = "custom";
  int vocab_size = 0;
  int hidden_dim = 768;
  int num_layers = 12;
  int num_heads = 12;
  int ffn_dim = 3072;
  int max_sequence_length = 512;  // subtokens including BOS/EOS
  double layer_norm_eps = 1e-5;
  double dropout = 0.1;
  double attention_dropout = 0.1;
  int pad_token_id = 1;
  int bos_token_id = 0;
  int eos_token_id = 2;
  int position_offset = 2;  // RoBERTa positions start at pad_id + 1
};

EncoderConfig tiny_encoder_config(int vocab_size);   // desk-scale tests
EncoderConfig small_encoder_config(int vocab_size);  // small experiments
EncoderConfig roberta_base_config();

struct Tensor {
  std::string name;
  Mat value;
  Mat grad;
  bool decay = true;  // weight decay applies; off for biases and LayerNorm

  void setup(Eigen::Index rows, Eigen::Index cols, std::string n, bool decay_flag = true);
};

struct BatchShape {
  int batch = 0;
  int seq_len = 0;
  std::vector<std::uint8_t> key_valid;  // batch*seq_len, 0 on padding
};

struct LinearLayer {
  Tensor w;  // in x out
  Tensor b;  // 1 x out

  void init(int in, int out, const std::string& prefix, Rng* rng, double init_std);
  Mat forward(const Mat& x, bool training) const;
  Mat backward(const Mat& dy);
  void collect(std::vector<Tensor*>& out);

  mutable Mat x_cache;
};

struct LayerNormLayer {
  Tensor gamma;  // 1 x dim
  Tensor beta;   // 1 x dim
  double eps = 1e-5;

  void init(int dim, const std::string& prefix, double eps_value);
  Mat forward(const Mat& x, bool training) const;
  Mat backward(const Mat& dy);
  void collect(std::vector<Tensor*>& out);

  mutable Mat x_hat;
  mutable Vec inv_std;
};

struct DropoutLayer {
  double p = 0.0;

  Mat forward(const Mat& x, bool training, Rng* rng) const;
  Mat backward(const Mat& dy) const;

  mutable Mat mask;  // 0 or 1/(1-p)
  mutable bool active = false;
};

Mat gelu(const Mat& x);
Mat gelu_backward(const Mat& x, const Mat& dy);

struct SelfAttentionLayer {
  int num_heads = 0;
  int head_dim = 0;
  LinearLayer q, k, v, out;
  DropoutLayer attn_drop;

  void init(int hidden, int heads, const std::string& prefix, Rng* rng, double init_std,
            double attn_dropout);
  Mat forward(const Mat& x, const BatchShape& shape, bool training, Rng* rng) const;
  Mat backward(const Mat& dy, const BatchShape& shape);
  void collect(std::vector<Tensor*>& out);

  mutable Mat q_cache, k_cache, v_cache;
  mutable std::vector<Mat> probs;       // batch*heads entries of seq x seq
  mutable std::vector<Mat> drop_masks;  // empty when attention dropout is off
};

struct EncoderBlock {
  SelfAttentionLayer attn;
  DropoutLayer attn_out_drop;
  LayerNormLayer ln_attn;
  LinearLayer ff_in, ff_out;
  DropoutLayer ff_drop;
  LayerNormLayer ln_ff;

  void init(const EncoderConfig& cfg, int index, Rng* rng, double init_std);
  Mat forward(const Mat& x, const BatchShape& shape, bool training, Rng* rng) const;
  Mat backward(const Mat& dy, const BatchShape& shape);
  void collect(std::vector<Tensor*>& out);

  mutable Mat gelu_in;
};

struct EmbeddingLayer {
  Tensor word;        // vocab x hidden
  Tensor position;    // (max_seq + offset) x hidden
  Tensor token_type;  // 1 x hidden
  LayerNormLayer ln;
  DropoutLayer drop;
  int position_offset = 2;

  void init(const EncoderConfig& cfg, Rng* rng, double init_std);
  Mat forward(const std::vector<int>& ids, const BatchShape& shape, bool training,
              Rng* rng) const;
  void backward(const Mat& dy);
  void collect(std::vector<Tensor*>& out);

  mutable std::vector<int> ids_cache;
  mutable std::vector<int> pos_cache;
};

struct TransformerEncoder {
  EncoderConfig cfg;
  EmbeddingLayer embeddings;
  std::vector<EncoderBlock> blocks;
  LinearLayer head;  // hidden x 5

  static TransformerEncoder random_init(const EncoderConfig& cfg, std::uint64_t seed);

  std::vector<Tensor*> parameters();
  std::vector<const Tensor*> parameters() const;
  void zero_grads();

  Mat encode(const std::vector<int>& ids, const BatchShape& shape, bool training,
             Rng* rng) const;
  void encode_backward(const Mat& d_hidden, const BatchShape& shape);
};

// Sentences padded to a common length, plus the first-subtoken gather list.
struct PreparedBatch {
  BatchShape shape;
  std::vector<int> ids;                    // batch*seq_len, padded
  std::vector<Eigen::Index> gather_rows;   // row per word, batch word order
  std::vector<int> words_per_sentence;
};

PreparedBatch prepare_batch(const std::vector<const EncodedSentence*>& sentences, int pad_id);

// Per-word predictions (n_words x 5) for a prepared batch.
Mat forward_words(const TransformerEncoder& model, const PreparedBatch& batch, bool training,
                  Rng* rng);
// Backward pass for forward_words; accumulates parameter gradients.
void backward_words(TransformerEncoder& model, const PreparedBatch& batch,
                    const Mat& d_predictions);

// Batch loss: sum over the 5 features of the mean squared error over words.
double summed_mse(const Mat& pred, const Mat& target, Mat* grad = nullptr);

}  // namespace eyetrack::nn
