#include "eyetrack/nn/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eyetrack/errors.hpp"

namespace eyetrack::nn {

namespace {

constexpr double kMaskValue = -1e9;
constexpr double kInitStd = 0.02;

void fill_normal(Mat& m, Rng& rng, double stddev) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = rng.normal(0.0, stddev);
  }
}

}  // namespace

EncoderConfig tiny_encoder_config(int vocab_size) {
  EncoderConfig cfg;
  cfg.checkpoint_name = "tiny";
  cfg.vocab_size = vocab_size;
  cfg.hidden_dim = 32;
  cfg.num_layers = 2;
  cfg.num_heads = 2;
  cfg.ffn_dim = 64;
  cfg.max_sequence_length = 256;
  cfg.dropout = 0.0;
  cfg.attention_dropout = 0.0;
  return cfg;
}

EncoderConfig small_encoder_config(int vocab_size) {
  EncoderConfig cfg;
  cfg.checkpoint_name = "small";
  cfg.vocab_size = vocab_size;
  cfg.hidden_dim = 128;
  cfg.num_layers = 4;
  cfg.num_heads = 4;
  cfg.ffn_dim = 512;
  cfg.max_sequence_length = 512;
  cfg.dropout = 0.1;
  cfg.attention_dropout = 0.1;
  return cfg;
}

EncoderConfig roberta_base_config() {
  EncoderConfig cfg;
  cfg.checkpoint_name = "roberta-base";
  cfg.vocab_size = 50265;
  cfg.hidden_dim = 768;
  cfg.num_layers = 12;
  cfg.num_heads = 12;
  cfg.ffn_dim = 3072;
  cfg.max_sequence_length = 512;
  return cfg;
}

void Tensor::setup(Eigen::Index rows, Eigen::Index cols, std::string n, bool decay_flag) {
  name = std::move(n);
  value = Mat::Zero(rows, cols);
  grad = Mat::Zero(rows, cols);
  decay = decay_flag;
}

// ---------------------------------------------------------------- linear

void LinearLayer::init(int in, int out, const std::string& prefix, Rng* rng,
                       double init_std) {
  w.setup(in, out, prefix + ".w", true);
  b.setup(1, out, prefix + ".b", false);
  if (rng) fill_normal(w.value, *rng, init_std);
}

Mat LinearLayer::forward(const Mat& x, bool training) const {
  if (training) x_cache = x;
  return (x * w.value).rowwise() + b.value.row(0);
}

Mat LinearLayer::backward(const Mat& dy) {
  w.grad.noalias() += x_cache.transpose() * dy;
  b.grad.row(0) += dy.colwise().sum();
  return dy * w.value.transpose();
}

void LinearLayer::collect(std::vector<Tensor*>& out) {
  out.push_back(&w);
  out.push_back(&b);
}

// ------------------------------------------------------------- layernorm

void LayerNormLayer::init(int dim, const std::string& prefix, double eps_value) {
  gamma.setup(1, dim, prefix + ".gamma", false);
  beta.setup(1, dim, prefix + ".beta", false);
  gamma.value.setOnes();
  eps = eps_value;
}

Mat LayerNormLayer::forward(const Mat& x, bool training) const {
  const Eigen::Index n = x.rows();
  const Eigen::Index dim = x.cols();
  Mat normalized(n, dim);
  Vec inv(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const double mean = x.row(r).mean();
    const double var = (x.row(r).array() - mean).square().sum() / dim;
    const double inv_r = 1.0 / std::sqrt(var + eps);
    normalized.row(r) = (x.row(r).array() - mean) * inv_r;
    inv(r) = inv_r;
  }
  Mat y = normalized * gamma.value.row(0).asDiagonal();
  y.rowwise() += beta.value.row(0);
  if (training) {
    x_hat = std::move(normalized);
    inv_std = std::move(inv);
  }
  return y;
}

Mat LayerNormLayer::backward(const Mat& dy) {
  const Eigen::Index n = dy.rows();
  const Eigen::Index dim = dy.cols();
  gamma.grad.row(0) += (dy.array() * x_hat.array()).colwise().sum().matrix();
  beta.grad.row(0) += dy.colwise().sum();

  Mat dx(n, dim);
  const auto g = gamma.value.row(0).array();
  for (Eigen::Index r = 0; r < n; ++r) {
    const Eigen::ArrayXd dxhat = dy.row(r).array().transpose() * g.transpose();
    const double sum_dxhat = dxhat.sum();
    const double sum_dxhat_xhat = (dxhat * x_hat.row(r).array().transpose()).sum();
    dx.row(r) = (inv_std(r) / dim) *
                (dim * dxhat - sum_dxhat - x_hat.row(r).array().transpose() * sum_dxhat_xhat)
                    .matrix()
                    .transpose();
  }
  return dx;
}

void LayerNormLayer::collect(std::vector<Tensor*>& out) {
  out.push_back(&gamma);
  out.push_back(&beta);
}

// --------------------------------------------------------------- dropout

Mat DropoutLayer::forward(const Mat& x, bool training, Rng* rng) const {
  if (!training || p <= 0.0) {
    active = false;
    return x;
  }
  active = true;
  const double keep = 1.0 / (1.0 - p);
  mask = Mat(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      mask(r, c) = rng->uniform() < p ? 0.0 : keep;
    }
  }
  return x.cwiseProduct(mask);
}

Mat DropoutLayer::backward(const Mat& dy) const {
  if (!active) return dy;
  return dy.cwiseProduct(mask);
}

// ------------------------------------------------------------------ gelu

Mat gelu(const Mat& x) {
  return x.unaryExpr(
      [](double v) { return 0.5 * v * (1.0 + std::erf(v / std::numbers::sqrt2)); });
}

Mat gelu_backward(const Mat& x, const Mat& dy) {
  static const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  const Mat local = x.unaryExpr([](double v) {
    return 0.5 * (1.0 + std::erf(v / std::numbers::sqrt2)) +
           v * inv_sqrt_2pi * std::exp(-0.5 * v * v);
  });
  return dy.cwiseProduct(local);
}

// ------------------------------------------------------------- attention

void SelfAttentionLayer::init(int hidden, int heads, const std::string& prefix, Rng* rng,
                              double init_std, double attn_dropout) {
  if (hidden % heads != 0) throw ConfigError("hidden_dim must be divisible by num_heads");
  num_heads = heads;
  head_dim = hidden / heads;
  q.init(hidden, hidden, prefix + ".q", rng, init_std);
  k.init(hidden, hidden, prefix + ".k", rng, init_std);
  v.init(hidden, hidden, prefix + ".v", rng, init_std);
  out.init(hidden, hidden, prefix + ".out", rng, init_std);
  attn_drop.p = attn_dropout;
}

Mat SelfAttentionLayer::forward(const Mat& x, const BatchShape& shape, bool training,
                                Rng* rng) const {
  const int B = shape.batch;
  const int T = shape.seq_len;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

  const Mat Q = q.forward(x, training);
  const Mat K = k.forward(x, training);
  const Mat V = v.forward(x, training);

  if (training) {
    probs.assign(static_cast<std::size_t>(B) * num_heads, Mat());
    drop_masks.assign(attn_drop.p > 0.0 ? static_cast<std::size_t>(B) * num_heads : 0, Mat());
  }

  Mat ctx = Mat::Zero(x.rows(), x.cols());
  for (int b = 0; b < B; ++b) {
    for (int h = 0; h < num_heads; ++h) {
      const auto Qb = Q.block(static_cast<Eigen::Index>(b) * T, h * head_dim, T, head_dim);
      const auto Kb = K.block(static_cast<Eigen::Index>(b) * T, h * head_dim, T, head_dim);
      const auto Vb = V.block(static_cast<Eigen::Index>(b) * T, h * head_dim, T, head_dim);

      Mat scores = Qb * Kb.transpose() * scale;
      for (int t = 0; t < T; ++t) {
        if (!shape.key_valid[static_cast<std::size_t>(b) * T + t]) {
          scores.col(t).array() += kMaskValue;
        }
      }
      // row softmax
      Mat P(T, T);
      for (int r = 0; r < T; ++r) {
        const double m = scores.row(r).maxCoeff();
        Eigen::ArrayXd e = (scores.row(r).array() - m).exp();
        P.row(r) = (e / e.sum()).matrix();
      }

      Mat Pd;
      const bool use_drop = training && attn_drop.p > 0.0;
      if (use_drop) {
        Mat m(T, T);
        const double keep = 1.0 / (1.0 - attn_drop.p);
        for (Eigen::Index cc = 0; cc < m.cols(); ++cc) {
          for (Eigen::Index rr = 0; rr < m.rows(); ++rr) {
            m(rr, cc) = rng->uniform() < attn_drop.p ? 0.0 : keep;
          }
        }
        Pd = P.cwiseProduct(m);
        drop_masks[static_cast<std::size_t>(b) * num_heads + h] = std::move(m);
      } else {
        Pd = P;
      }
      ctx.block(static_cast<Eigen::Index>(b) * T, h * head_dim, T, head_dim).noalias() =
          Pd * Vb;
      if (training) probs[static_cast<std::size_t>(b) * num_heads + h] = std::move(P);
    }
  }

  if (training) {
    q_cache = Q;
    k_cache = K;
    v_cache = V;
  }
  return out.forward(ctx, training);
}

Mat SelfAttentionLayer::backward(const Mat& dy, const BatchShape& shape) {
  const int B = shape.batch;
  const int T = shape.seq_len;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

  const Mat d_ctx = out.backward(dy);
  Mat dQ = Mat::Zero(d_ctx.rows(), d_ctx.cols());
  Mat dK = Mat::Zero(d_ctx.rows(), d_ctx.cols());
  Mat dV = Mat::Zero(d_ctx.rows(), d_ctx.cols());

  for (int b = 0; b < B; ++b) {
    for (int h = 0; h < num_heads; ++h) {
      const Mat& P = probs[static_cast<std::size_t>(b) * num_heads + h];
      const auto Qb =
          q_cache.block(static_cast<Eigen::Index>(b) * T, h * head_dim, T, head_dim);
      const auto Kb =
          k_cache.block(static_cast<Eigen::Index>(b) * T, h * head_dim, T, head_dim);
      const auto Vb =
          v_cache.block(static_cast<Eigen::Index>(b) * T, h * head_dim, T, head_dim);
      const auto d_ctx_b =
          d_ctx.block(static_cast<Eigen::Index>(b) * T, h * head_dim, T, head_dim);

      Mat Pd_grad = d_ctx_b * Vb.transpose();  // gradient wrt dropped probs
      const bool used_drop = !drop_masks.empty();
      Mat dV_contrib;
      if (used_drop) {
        const Mat& m = drop_masks[static_cast<std::size_t>(b) * num_heads + h];
        dV_contrib = (P.cwiseProduct(m)).transpose() * d_ctx_b;
        Pd_grad = Pd_grad.cwiseProduct(m);
      } else {
        dV_contrib = P.transpose() * d_ctx_b;
      }

      // softmax backward per row
      Mat dS(T, T);
      for (int r = 0; r < T; ++r) {
        const double dot = Pd_grad.row(r).dot(P.row(r));
        dS.row(r) = P.row(r).cwiseProduct(Pd_grad.row(r) - Eigen::RowVectorXd::Constant(T, dot));
      }

      dQ.block(static_cast<Eigen::Index>(b) * T, h * head_dim, T, head_dim).noalias() =
          dS * Kb * scale;
      dK.block(static_cast<Eigen::Index>(b) * T, h * head_dim, T, head_dim).noalias() =
          dS.transpose() * Qb * scale;
      dV.block(static_cast<Eigen::Index>(b) * T, h * head_dim, T, head_dim) = dV_contrib;
    }
  }

  Mat dx = q.backward(dQ);
  dx += k.backward(dK);
  dx += v.backward(dV);
  return dx;
}

void SelfAttentionLayer::collect(std::vector<Tensor*>& out_params) {
  q.collect(out_params);
  k.collect(out_params);
  v.collect(out_params);
  out.collect(out_params);
}

// ----------------------------------------------------------------- block

void EncoderBlock::init(const EncoderConfig& cfg, int index, Rng* rng, double init_std) {
  const std::string prefix = "layers." + std::to_string(index);
  attn.init(cfg.hidden_dim, cfg.num_heads, prefix + ".attn", rng, init_std,
            cfg.attention_dropout);
  attn_out_drop.p = cfg.dropout;
  ln_attn.init(cfg.hidden_dim, prefix + ".ln_attn", cfg.layer_norm_eps);
  ff_in.init(cfg.hidden_dim, cfg.ffn_dim, prefix + ".ff_in", rng, init_std);
  ff_out.init(cfg.ffn_dim, cfg.hidden_dim, prefix + ".ff_out", rng, init_std);
  ff_drop.p = cfg.dropout;
  ln_ff.init(cfg.hidden_dim, prefix + ".ln_ff", cfg.layer_norm_eps);
}

Mat EncoderBlock::forward(const Mat& x, const BatchShape& shape, bool training,
                          Rng* rng) const {
  Mat a = attn.forward(x, shape, training, rng);
  a = attn_out_drop.forward(a, training, rng);
  const Mat h = ln_attn.forward(x + a, training);

  Mat f = ff_in.forward(h, training);
  if (training) gelu_in = f;
  Mat g = gelu(f);
  Mat f2 = ff_out.forward(g, training);
  f2 = ff_drop.forward(f2, training, rng);
  return ln_ff.forward(h + f2, training);
}

Mat EncoderBlock::backward(const Mat& dy, const BatchShape& shape) {
  const Mat d_sum2 = ln_ff.backward(dy);  // wrt h + f2
  Mat df2 = ff_drop.backward(d_sum2);
  Mat dg = ff_out.backward(df2);
  Mat df = gelu_backward(gelu_in, dg);
  Mat dh = ff_in.backward(df);
  dh += d_sum2;

  const Mat d_sum1 = ln_attn.backward(dh);  // wrt x + a
  Mat da = attn_out_drop.backward(d_sum1);
  Mat dx = attn.backward(da, shape);
  dx += d_sum1;
  return dx;
}

void EncoderBlock::collect(std::vector<Tensor*>& out) {
  attn.collect(out);
  ln_attn.collect(out);
  ff_in.collect(out);
  ff_out.collect(out);
  ln_ff.collect(out);
}

// ------------------------------------------------------------ embeddings

void EmbeddingLayer::init(const EncoderConfig& cfg, Rng* rng, double init_std) {
  word.setup(cfg.vocab_size, cfg.hidden_dim, "embeddings.word", true);
  position.setup(cfg.max_sequence_length + cfg.position_offset, cfg.hidden_dim,
                 "embeddings.position", true);
  token_type.setup(1, cfg.hidden_dim, "embeddings.token_type", true);
  ln.init(cfg.hidden_dim, "embeddings.ln", cfg.layer_norm_eps);
  drop.p = cfg.dropout;
  position_offset = cfg.position_offset;
  if (rng) {
    fill_normal(word.value, *rng, init_std);
    fill_normal(position.value, *rng, init_std);
    fill_normal(token_type.value, *rng, init_std);
  }
}

Mat EmbeddingLayer::forward(const std::vector<int>& ids, const BatchShape& shape,
                            bool training, Rng* rng) const {
  const Eigen::Index n = static_cast<Eigen::Index>(ids.size());
  Mat x(n, word.value.cols());
  std::vector<int> positions(ids.size());
  for (Eigen::Index r = 0; r < n; ++r) {
    const int id = ids[r];
    if (id < 0 || id >= word.value.rows()) {
      throw IntegrityError("token id " + std::to_string(id) + " outside the vocabulary");
    }
    const int pos = position_offset + static_cast<int>(r % shape.seq_len);
    positions[r] = pos;
    x.row(r) = word.value.row(id) + position.value.row(pos) + token_type.value.row(0);
  }
  if (training) {
    ids_cache = ids;
    pos_cache = std::move(positions);
  }
  Mat y = ln.forward(x, training);
  return drop.forward(y, training, rng);
}

void EmbeddingLayer::backward(const Mat& dy) {
  Mat d_ln = drop.backward(dy);
  Mat dx = ln.backward(d_ln);
  for (Eigen::Index r = 0; r < dx.rows(); ++r) {
    word.grad.row(ids_cache[r]) += dx.row(r);
    position.grad.row(pos_cache[r]) += dx.row(r);
  }
  token_type.grad.row(0) += dx.colwise().sum();
}

void EmbeddingLayer::collect(std::vector<Tensor*>& out) {
  out.push_back(&word);
  out.push_back(&position);
  out.push_back(&token_type);
  ln.collect(out);
}

// --------------------------------------------------------------- encoder

TransformerEncoder TransformerEncoder::random_init(const EncoderConfig& cfg,
                                                   std::uint64_t seed) {
  if (cfg.vocab_size <= 0) throw ConfigError("encoder config needs a positive vocab_size");
  TransformerEncoder model;
  model.cfg = cfg;
  Rng rng(seed);
  model.embeddings.init(cfg, &rng, kInitStd);
  model.blocks.resize(cfg.num_layers);
  for (int i = 0; i < cfg.num_layers; ++i) model.blocks[i].init(cfg, i, &rng, kInitStd);
  model.head.init(cfg.hidden_dim, static_cast<int>(kNumFeatures), "head", &rng, kInitStd);
  return model;
}

std::vector<Tensor*> TransformerEncoder::parameters() {
  std::vector<Tensor*> out;
  embeddings.collect(out);
  for (auto& blk : blocks) blk.collect(out);
  head.collect(out);
  return out;
}

std::vector<const Tensor*> TransformerEncoder::parameters() const {
  std::vector<Tensor*> mut = const_cast<TransformerEncoder*>(this)->parameters();
  return {mut.begin(), mut.end()};
}

void TransformerEncoder::zero_grads() {
  for (Tensor* t : parameters()) t->grad.setZero();
}

Mat TransformerEncoder::encode(const std::vector<int>& ids, const BatchShape& shape,
                               bool training, Rng* rng) const {
  Mat x = embeddings.forward(ids, shape, training, rng);
  for (const auto& blk : blocks) x = blk.forward(x, shape, training, rng);
  return x;
}

void TransformerEncoder::encode_backward(const Mat& d_hidden, const BatchShape& shape) {
  Mat d = d_hidden;
  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) d = it->backward(d, shape);
  embeddings.backward(d);
}

// ----------------------------------------------------------- batch level

PreparedBatch prepare_batch(const std::vector<const EncodedSentence*>& sentences,
                            int pad_id) {
  if (sentences.empty()) throw IntegrityError("prepare_batch over zero sentences");
  PreparedBatch batch;
  batch.shape.batch = static_cast<int>(sentences.size());
  int max_len = 0;
  for (const auto* s : sentences) {
    max_len = std::max(max_len, static_cast<int>(s->token_ids.size()));
  }
  batch.shape.seq_len = max_len;
  batch.ids.assign(static_cast<std::size_t>(batch.shape.batch) * max_len, pad_id);
  batch.shape.key_valid.assign(batch.ids.size(), 0);
  for (int b = 0; b < batch.shape.batch; ++b) {
    const auto& ids = sentences[b]->token_ids;
    for (std::size_t t = 0; t < ids.size(); ++t) {
      batch.ids[static_cast<std::size_t>(b) * max_len + t] = ids[t];
      batch.shape.key_valid[static_cast<std::size_t>(b) * max_len + t] = 1;
    }
    batch.words_per_sentence.push_back(
        static_cast<int>(sentences[b]->alignment.first_subtoken.size()));
    for (int idx : sentences[b]->alignment.first_subtoken) {
      batch.gather_rows.push_back(static_cast<Eigen::Index>(b) * max_len + idx);
    }
  }
  return batch;
}

Mat forward_words(const TransformerEncoder& model, const PreparedBatch& batch, bool training,
                  Rng* rng) {
  const Mat hidden = model.encode(batch.ids, batch.shape, training, rng);
  Mat gathered(batch.gather_rows.size(), hidden.cols());
  for (std::size_t i = 0; i < batch.gather_rows.size(); ++i) {
    gathered.row(i) = hidden.row(batch.gather_rows[i]);
  }
  return model.head.forward(gathered, training);
}

void backward_words(TransformerEncoder& model, const PreparedBatch& batch,
                    const Mat& d_predictions) {
  const Mat d_gathered = model.head.backward(d_predictions);
  Mat d_hidden = Mat::Zero(static_cast<Eigen::Index>(batch.ids.size()), model.cfg.hidden_dim);
  for (std::size_t i = 0; i < batch.gather_rows.size(); ++i) {
    d_hidden.row(batch.gather_rows[i]) += d_gathered.row(i);
  }
  model.encode_backward(d_hidden, batch.shape);
}

double summed_mse(const Mat& pred, const Mat& target, Mat* grad) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw IntegrityError("summed_mse shape mismatch");
  }
  const double n = static_cast<double>(pred.rows());
  const Mat diff = pred - target;
  const double loss = diff.array().square().colwise().sum().sum() / n;
  if (grad) *grad = 2.0 * diff / n;
  return loss;
}

}  // namespace eyetrack::nn
