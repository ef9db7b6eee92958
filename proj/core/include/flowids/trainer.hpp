#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "flowids/encoder.hpp"
#include "flowids/evaluation.hpp"

namespace flowids {

struct TrainingArguments {
  double learning_rate = 1e-5;
  double weight_decay = 0.01;
  std::size_t batch_size = 128;
  std::size_t grad_accumulation = 1;
  std::size_t epochs = 1;
  std::size_t eval_every = 100;
  bool early_stopping = true;
  std::size_t patience = 3;
  std::size_t warmup_steps = 500;
  std::size_t total_steps = 0;  // 0 = derive from the training set size
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  // Optimizer updates for a training set of n examples.
  std::size_t steps_for(std::size_t n_train) const;
  void validate() const;
};

// Linear warmup from 0 to learning_rate, then linear decay to 0 at total_steps.
double lr_at_step(std::size_t step, const TrainingArguments& args);

template <typename T>
struct OptimizerState {
  std::vector<Matrix<T>> m, v;
  std::size_t t = 0;
};

// A parameter tensor paired with its gradient; `decay` selects decoupled
// weight decay for this tensor.
template <typename T>
struct ParamSlot {
  std::string name;
  Matrix<T>* param;
  const Matrix<T>* grad;
  bool decay = true;
};

// Bias-corrected moments, then p -= lr * (m_hat / (sqrt(v_hat) + eps) + wd * p)
// for decayed tensors. Throws Error on a non-finite gradient before touching
// any parameter.
template <typename T>
void adamw_update(std::span<const ParamSlot<T>> slots, OptimizerState<T>& state, double lr,
                  const TrainingArguments& args);

// Pairs encoder tensors with gradients. Biases and normalization parameters
// are excluded from weight decay.
template <typename T>
std::vector<ParamSlot<T>> encoder_slots(EncoderParams<T>& params, const EncoderParams<T>& grads);

struct TrainLogRow {
  std::size_t step = 0;
  double train_loss = 0.0;  // mean batch loss since the previous evaluation
  double val_loss = 0.0;
  double accuracy = 0.0;
  double precision = 0.0;  // weighted averages
  double recall = 0.0;
  double f1 = 0.0;

  bool operator==(const TrainLogRow&) const = default;
};

struct TrainLog {
  std::vector<TrainLogRow> rows;

  // "step,train_loss,val_loss,accuracy,precision,recall,f1"
  std::string csv() const;
  bool operator==(const TrainLog&) const = default;
};

enum class TrainStatus { Completed, EarlyStopped, Diverged };

struct FineTuneResult {
  EncoderParams<float> best;  // lowest validation loss seen
  TrainLog log;
  TrainStatus status = TrainStatus::Completed;
  std::size_t steps = 0;
  double best_val_loss = 0.0;
  std::string diagnostic;
};

struct EvalResult {
  double loss = 0.0;
  std::vector<double> scores;  // P(attack)
  std::vector<int> predictions;
  MetricsReport metrics;
};

// Eval-mode pass over a labeled set in batches.
EvalResult evaluate_encoder(const EncoderParams<float>& params, std::span<const TokenSequence> data,
                            std::size_t batch_size = 64);

// Seeded-shuffle mini-batch training with periodic validation, in-memory
// checkpointing of the best model and early stopping on validation loss.
// `on_eval` (optional) sees each log row as it is produced.
FineTuneResult fine_tune(const EncoderParams<float>& initial, std::span<const TokenSequence> train,
                         std::span<const TokenSequence> validation, const TrainingArguments& args,
                         const std::function<void(const TrainLogRow&)>& on_eval = {});

}  // namespace flowids
