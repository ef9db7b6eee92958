#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "flowids/tokenizer.hpp"

namespace flowids {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Activation { Relu, Gelu };

struct EncoderConfig {
  std::size_t n_layers = 2;
  std::size_t hidden_dim = 128;
  std::size_t n_heads = 4;
  std::size_t ffn_dim = 512;
  std::size_t max_positions = 512;
  std::size_t vocab_size = 0;
  std::size_t n_classes = 2;
  double dropout_rate = 0.1;
  Activation activation = Activation::Relu;
  double init_std = 0.02;
  double layer_norm_eps = 1e-12;

  std::size_t head_dim() const { return hidden_dim / n_heads; }
  // Throws Error when the shape constraints do not hold.
  void validate() const;

  // 2 layers, 128 hidden, 4 heads, 512 FFN.
  static EncoderConfig desk(std::size_t vocab_size);
  // 12 layers, 768 hidden, 12 heads, 3072 FFN, GELU.
  static EncoderConfig faithful(std::size_t vocab_size);

  bool operator==(const EncoderConfig&) const = default;
};

template <typename T>
struct LayerParams {
  Matrix<T> wq, bq, wk, bk, wv, bv, wo, bo;  // projections are d x d, biases 1 x d
  Matrix<T> ln1_gain, ln1_bias;
  Matrix<T> w1, b1, w2, b2;  // d x ffn, 1 x ffn, ffn x d, 1 x d
  Matrix<T> ln2_gain, ln2_bias;
};

template <typename T>
struct EncoderParams {
  EncoderConfig config;
  Matrix<T> token_embedding;     // vocab x d
  Matrix<T> segment_embedding;   // 2 x d
  Matrix<T> position_embedding;  // max_positions x d
  std::vector<LayerParams<T>> layers;
  Matrix<T> classifier_weight;  // d x n_classes
  Matrix<T> classifier_bias;    // 1 x n_classes
  Matrix<T> mlm_bias;           // 1 x vocab; MLM decoder shares token_embedding

  // Visits every tensor in a fixed order with a stable dotted name.
  template <typename F>
  void visit(F&& f) {
    visit_impl(*this, f);
  }
  template <typename F>
  void visit(F&& f) const {
    visit_impl(*this, f);
  }

  EncoderParams zeros_like() const;
  std::size_t parameter_count() const;

 private:
  template <typename Self, typename F>
  static void visit_impl(Self& p, F& f) {
    f("embeddings.token", p.token_embedding);
    f("embeddings.segment", p.segment_embedding);
    f("embeddings.position", p.position_embedding);
    for (std::size_t i = 0; i < p.layers.size(); ++i) {
      auto& l = p.layers[i];
      const std::string pre = "layer." + std::to_string(i) + ".";
      f(pre + "attention.query.weight", l.wq);
      f(pre + "attention.query.bias", l.bq);
      f(pre + "attention.key.weight", l.wk);
      f(pre + "attention.key.bias", l.bk);
      f(pre + "attention.value.weight", l.wv);
      f(pre + "attention.value.bias", l.bv);
      f(pre + "attention.output.weight", l.wo);
      f(pre + "attention.output.bias", l.bo);
      f(pre + "attention.norm.gain", l.ln1_gain);
      f(pre + "attention.norm.bias", l.ln1_bias);
      f(pre + "ffn.in.weight", l.w1);
      f(pre + "ffn.in.bias", l.b1);
      f(pre + "ffn.out.weight", l.w2);
      f(pre + "ffn.out.bias", l.b2);
      f(pre + "ffn.norm.gain", l.ln2_gain);
      f(pre + "ffn.norm.bias", l.ln2_bias);
    }
    f("classifier.weight", p.classifier_weight);
    f("classifier.bias", p.classifier_bias);
    f("mlm.bias", p.mlm_bias);
  }
};

// Weights ~ N(0, init_std) truncated to +-2 init_std, biases 0, norm gains 1.
template <typename T>
EncoderParams<T> init_params(const EncoderConfig& config, std::uint64_t seed);

template <typename To, typename From>
EncoderParams<To> cast_params(const EncoderParams<From>& p);

// h[p] = token[id_p] + segment[seg_p] + position[p] over the first `length`
// positions.
template <typename T>
Matrix<T> embed_sequence(std::span<const TokenId> ids, std::span<const std::uint8_t> segments,
                         std::size_t length, const EncoderParams<T>& params);

template <typename T>
struct AttentionResult {
  Matrix<T> output;              // after the output projection
  Matrix<T> q, k, v;             // projected, n x d
  std::vector<Matrix<T>> probs;  // per head, n x n, rows sum to 1 over unmasked keys
  Matrix<T> context;             // concatenated heads before the output projection
};

// Multi-head scaled dot-product attention; keys with mask 0 get -inf bias.
// Throws Error when no key is unmasked.
template <typename T>
AttentionResult<T> self_attention(const Matrix<T>& hidden, std::span<const std::uint8_t> mask,
                                  const LayerParams<T>& layer, std::size_t n_heads);

template <typename T>
Matrix<T> feed_forward(const Matrix<T>& hidden, const LayerParams<T>& layer, Activation act);

template <typename T>
struct LayerTape {
  Matrix<T> input;
  AttentionResult<T> attention;
  Matrix<T> attention_dropout;  // multiplier mask; empty in eval mode
  Matrix<T> norm1_xhat;
  Eigen::Matrix<T, Eigen::Dynamic, 1> norm1_rstd;
  Matrix<T> norm1_out;
  Matrix<T> ffn_pre;  // x W1 + b1
  Matrix<T> ffn_act;
  Matrix<T> ffn_dropout;
  Matrix<T> norm2_xhat;
  Eigen::Matrix<T, Eigen::Dynamic, 1> norm2_rstd;
};

template <typename T>
struct SequenceTape {
  std::size_t length = 0;
  std::vector<TokenId> ids;  // as fed (after any MLM corruption)
  std::vector<std::uint8_t> segments;
  Matrix<T> embedding_dropout;
  std::vector<LayerTape<T>> layers;
  Matrix<T> output;  // final hidden states, length x d
};

enum class Mode { Train, Eval };
enum class Objective { Classification, Mlm };

template <typename T>
struct ForwardResult {
  Matrix<T> logits;  // batch x n_classes, from the [CLS] position
  std::vector<SequenceTape<T>> tapes;
};

// Post-norm encoder stack. Dropout is applied only in Train mode, with masks
// drawn from (seed, batch index). Positions beyond the attention mask are
// never computed.
template <typename T>
ForwardResult<T> forward(std::span<const TokenSequence> batch, const EncoderParams<T>& params,
                         Mode mode, std::uint64_t seed);

// Hidden states of one sequence with explicit (possibly corrupted) ids.
template <typename T>
SequenceTape<T> forward_sequence(std::span<const TokenId> ids, std::span<const std::uint8_t> segments,
                                 std::span<const std::uint8_t> mask, const EncoderParams<T>& params,
                                 Mode mode, std::uint64_t seed);

struct MlmOptions {
  const Vocabulary* vocab = nullptr;
  double mask_rate = 0.15;
};

template <typename T>
struct LossAndGradients {
  double loss = 0.0;
  EncoderParams<T> gradients;
  std::size_t mlm_positions = 0;
};

// Classification: mean softmax cross-entropy on [CLS] logits.
// Mlm: mean cross-entropy over all masked positions in the batch, with
// corruption drawn by mlm_mask(seed, batch index); throws Error when no
// position is masked.
template <typename T>
LossAndGradients<T> loss_and_gradients(std::span<const TokenSequence> batch,
                                       std::span<const int> labels, const EncoderParams<T>& params,
                                       Objective objective, Mode mode, std::uint64_t seed,
                                       const MlmOptions& mlm = {});

// Row-wise softmax probability of class 1.
template <typename T>
std::vector<double> positive_scores(const Matrix<T>& logits);

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace flowids
