#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "flowids/checkpoint.hpp"
#include "flowids/encoder.hpp"
#include "flowids/evaluation.hpp"

namespace flowids {

// Mean binary cross-entropy with probabilities clamped to [1e-7, 1 - 1e-7].
double binary_cross_entropy(std::span<const double> probabilities, std::span<const int> labels);

struct MlpConfig {
  std::size_t input_dim = 512;
  std::size_t hidden1 = 128;
  std::size_t hidden2 = 128;
  double dropout_rate = 0.5;

  void validate() const;
};

template <typename T>
struct MlpParams {
  MlpConfig config;
  Matrix<T> w1, b1, w2, b2, w3, b3;

  template <typename F>
  void visit(F&& f) {
    f("dense1.weight", w1); f("dense1.bias", b1);
    f("dense2.weight", w2); f("dense2.bias", b2);
    f("output.weight", w3); f("output.bias", b3);
  }
  template <typename F>
  void visit(F&& f) const {
    const_cast<MlpParams*>(this)->visit([&](const std::string& n, Matrix<T>& m) { f(n, static_cast<const Matrix<T>&>(m)); });
  }
};

struct CnnConfig {
  std::size_t input_len = 512;
  std::size_t filters = 128;
  std::size_t kernel = 5;
  std::size_t pool = 2;
  std::size_t dense = 128;
  double dropout_rate = 0.5;
  bool same_padding = false;  // default: valid convolution

  std::size_t conv1_len() const;
  std::size_t pool1_len() const;
  std::size_t conv2_len() const;
  std::size_t pool2_len() const;
  std::size_t flat_dim() const { return pool2_len() * filters; }
  void validate() const;
};

// Convolution weights are stored im2col-style: (kernel * in_channels) x out_channels,
// row index = tap * in_channels + channel.
template <typename T>
struct CnnParams {
  CnnConfig config;
  Matrix<T> c1w, c1b, c2w, c2b, dw, db, ow, ob;

  template <typename F>
  void visit(F&& f) {
    f("conv1.weight", c1w); f("conv1.bias", c1b);
    f("conv2.weight", c2w); f("conv2.bias", c2b);
    f("dense.weight", dw); f("dense.bias", db);
    f("output.weight", ow); f("output.bias", ob);
  }
  template <typename F>
  void visit(F&& f) const {
    const_cast<CnnParams*>(this)->visit([&](const std::string& n, Matrix<T>& m) { f(n, static_cast<const Matrix<T>&>(m)); });
  }
};

// Glorot-uniform weights, zero biases.
template <typename T>
MlpParams<T> init_mlp(const MlpConfig& config, std::uint64_t seed);
template <typename T>
CnnParams<T> init_cnn(const CnnConfig& config, std::uint64_t seed);

// input: length x in_channels. Output: out_len x out_channels.
template <typename T>
Matrix<T> conv1d(const Matrix<T>& input, const Matrix<T>& weight, const Matrix<T>& bias,
                 std::size_t kernel, bool same_padding);
// Non-overlapping max pooling along rows; trailing rows that do not fill a
// window are dropped. `argmax` (optional) receives the winning input row per
// output cell, first maximum on ties.
template <typename T>
Matrix<T> max_pool1d(const Matrix<T>& input, std::size_t pool, std::vector<std::size_t>* argmax = nullptr);

template <typename P>
struct BaselineGradients {
  double loss = 0.0;
  P gradients;
};

// Loss is the mean of softplus(z) - y*z over the batch (cross-entropy on the
// logit). Train mode applies inverted dropout seeded by `seed`.
template <typename T>
BaselineGradients<MlpParams<T>> mlp_loss_and_gradients(const MlpParams<T>& params, const Matrix<T>& x,
                                                       std::span<const int> labels, Mode mode,
                                                       std::uint64_t seed);
template <typename T>
BaselineGradients<CnnParams<T>> cnn_loss_and_gradients(const CnnParams<T>& params, const Matrix<T>& x,
                                                       std::span<const int> labels, Mode mode,
                                                       std::uint64_t seed);

// Eval-mode P(attack) per row.
template <typename T>
std::vector<double> mlp_predict(const MlpParams<T>& params, const Matrix<T>& x);
template <typename T>
std::vector<double> cnn_predict(const CnnParams<T>& params, const Matrix<T>& x);

struct BaselineTrainOptions {
  std::size_t epochs = 5;
  std::size_t batch_size = 128;
  double learning_rate = 1e-3;
  std::size_t patience = 2;  // epochs without validation improvement
  double threshold = 0.5;
  std::uint64_t seed = 0;
};

struct BaselineEpoch {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

template <typename P>
struct BaselineFit {
  P best;
  std::vector<BaselineEpoch> history;
  bool early_stopped = false;
};

BaselineFit<MlpParams<float>> train_mlp(const Matrix<float>& x, std::span<const int> y,
                                        const Matrix<float>& x_val, std::span<const int> y_val,
                                        const MlpConfig& config, const BaselineTrainOptions& options,
                                        const std::function<void(const BaselineEpoch&)>& on_epoch = {});
BaselineFit<CnnParams<float>> train_cnn(const Matrix<float>& x, std::span<const int> y,
                                        const Matrix<float>& x_val, std::span<const int> y_val,
                                        const CnnConfig& config, const BaselineTrainOptions& options,
                                        const std::function<void(const BaselineEpoch&)>& on_epoch = {});

std::vector<int> threshold_scores(std::span<const double> scores, double threshold = 0.5);

Checkpoint mlp_checkpoint(const MlpParams<float>& params);
MlpParams<float> mlp_from_checkpoint(const Checkpoint& ckpt);
Checkpoint cnn_checkpoint(const CnnParams<float>& params);
CnnParams<float> cnn_from_checkpoint(const Checkpoint& ckpt);

}  // namespace flowids
