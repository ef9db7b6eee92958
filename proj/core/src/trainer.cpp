#include "flowids/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

#include "flowids/error.hpp"

namespace flowids {

std::size_t TrainingArguments::steps_for(std::size_t n_train) const {
  if (total_steps) return total_steps;
  const std::size_t batches = (n_train + batch_size - 1) / batch_size;
  const std::size_t per_epoch = std::max<std::size_t>(1, (batches + grad_accumulation - 1) / grad_accumulation);
  return per_epoch * epochs;
}

void TrainingArguments::validate() const {
  if (!(learning_rate > 0.0)) throw Error("learning_rate must be positive");
  if (weight_decay < 0.0) throw Error("weight_decay must be non-negative");
  if (batch_size == 0 || grad_accumulation == 0 || epochs == 0 || eval_every == 0)
    throw Error("batch_size, grad_accumulation, epochs and eval_every must be positive");
  if (early_stopping && patience == 0) throw Error("patience must be positive");
  if (total_steps && warmup_steps > total_steps) throw Error("warmup_steps exceeds total_steps");
}

double lr_at_step(std::size_t step, const TrainingArguments& args) {
  const std::size_t total = args.total_steps;
  if (step > total) throw Error("step beyond total_steps");
  if (args.warmup_steps > total) throw Error("warmup_steps exceeds total_steps");
  const double s = static_cast<double>(step);
  if (step < args.warmup_steps) return args.learning_rate * s / static_cast<double>(args.warmup_steps);
  if (total == args.warmup_steps) return args.learning_rate;
  return args.learning_rate * static_cast<double>(total - step) /
         static_cast<double>(total - args.warmup_steps);
}

template <typename T>
void adamw_update(std::span<const ParamSlot<T>> slots, OptimizerState<T>& state, double lr,
                  const TrainingArguments& args) {
  for (const auto& s : slots) {
    if (s.param->rows() != s.grad->rows() || s.param->cols() != s.grad->cols())
      throw Error("gradient shape mismatch for " + s.name);
    if (!s.grad->allFinite()) throw Error("non-finite gradient in " + s.name);
  }
  if (state.m.empty()) {
    for (const auto& s : slots) {
      state.m.push_back(Matrix<T>::Zero(s.param->rows(), s.param->cols()));
      state.v.push_back(Matrix<T>::Zero(s.param->rows(), s.param->cols()));
    }
  }
  if (state.m.size() != slots.size()) throw Error("optimizer state does not match parameters");
  ++state.t;
  const double bc1 = 1.0 - std::pow(args.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(args.beta2, static_cast<double>(state.t));
  const T b1 = static_cast<T>(args.beta1), b2 = static_cast<T>(args.beta2);
  const T step = static_cast<T>(lr);
  const T inv_bc1 = static_cast<T>(1.0 / bc1), inv_bc2 = static_cast<T>(1.0 / bc2);
  const T eps = static_cast<T>(args.epsilon);
  const T wd = static_cast<T>(args.weight_decay);
  for (std::size_t i = 0; i < slots.size(); ++i) {
    auto p = slots[i].param->array();
    const auto g = slots[i].grad->array();
    auto m = state.m[i].array();
    auto v = state.v[i].array();
    m = b1 * m + (T(1) - b1) * g;
    v = b2 * v + (T(1) - b2) * g.square();
    if (slots[i].decay && wd != T(0)) {
      p -= step * ((m * inv_bc1) / ((v * inv_bc2).sqrt() + eps) + wd * p);
    } else {
      p -= step * ((m * inv_bc1) / ((v * inv_bc2).sqrt() + eps));
    }
  }
}

template <typename T>
std::vector<ParamSlot<T>> encoder_slots(EncoderParams<T>& params, const EncoderParams<T>& grads) {
  std::vector<const Matrix<T>*> g;
  grads.visit([&](const std::string&, const Matrix<T>& m) { g.push_back(&m); });
  std::vector<ParamSlot<T>> slots;
  std::size_t i = 0;
  params.visit([&](const std::string& name, Matrix<T>& m) {
    const bool no_decay = name.ends_with(".bias") || name.find(".norm.") != std::string::npos;
    slots.push_back({name, &m, g[i++], !no_decay});
  });
  return slots;
}

std::string TrainLog::csv() const {
  std::ostringstream os;
  os << std::setprecision(9);
  os << "step,train_loss,val_loss,accuracy,precision,recall,f1\n";
  for (const auto& r : rows) {
    os << r.step << ',' << r.train_loss << ',' << r.val_loss << ',' << r.accuracy << ','
       << r.precision << ',' << r.recall << ',' << r.f1 << '\n';
  }
  return os.str();
}

EvalResult evaluate_encoder(const EncoderParams<float>& params, std::span<const TokenSequence> data,
                            std::size_t batch_size) {
  if (data.empty()) throw Error("cannot evaluate an empty set");
  EvalResult r;
  std::vector<int> labels;
  labels.reserve(data.size());
  double total = 0.0;
  for (std::size_t b = 0; b < data.size(); b += batch_size) {
    const auto chunk = data.subspan(b, std::min(batch_size, data.size() - b));
    const auto fwd = forward<float>(chunk, params, Mode::Eval, 0);
    for (Eigen::Index i = 0; i < fwd.logits.rows(); ++i) {
      const double z0 = fwd.logits(i, 0), z1 = fwd.logits(i, 1);
      const double mx = std::max(z0, z1);
      const double lse = mx + std::log(std::exp(z0 - mx) + std::exp(z1 - mx));
      const int y = chunk[static_cast<std::size_t>(i)].label;
      total += lse - (y ? z1 : z0);
      const double p1 = std::exp(z1 - lse);
      r.scores.push_back(p1);
      r.predictions.push_back(z1 > z0 ? 1 : 0);
      labels.push_back(y);
    }
  }
  r.loss = total / static_cast<double>(data.size());
  r.metrics = classification_metrics(confusion_matrix(r.predictions, labels));
  return r;
}

FineTuneResult fine_tune(const EncoderParams<float>& initial, std::span<const TokenSequence> train,
                         std::span<const TokenSequence> validation, const TrainingArguments& args_in,
                         const std::function<void(const TrainLogRow&)>& on_eval) {
  if (train.empty() || validation.empty()) throw Error("fine_tune needs nonempty train and validation sets");
  TrainingArguments args = args_in;
  args.total_steps = args.steps_for(train.size());
  args.validate();

  FineTuneResult result;
  result.best = initial;
  result.best_val_loss = std::numeric_limits<double>::infinity();
  EncoderParams<float> params = initial;
  OptimizerState<float> opt;
  std::mt19937_64 rng(args.seed);

  std::vector<std::size_t> order(train.size());
  std::vector<TokenSequence> batch;
  std::vector<int> labels;
  double window_loss = 0.0;
  std::size_t window_batches = 0;
  std::size_t step = 0;
  std::size_t stale_evals = 0;
  std::size_t micro = 0;
  EncoderParams<float> accum;

  auto finish = [&](TrainStatus status, std::string diag = {}) {
    result.status = status;
    result.steps = step;
    result.diagnostic = std::move(diag);
    // Without any evaluation the final weights stand in for the best ones,
    // unless they are the diverged ones.
    if (result.log.rows.empty() && status != TrainStatus::Diverged) result.best = params;
    return result;
  };

  // An explicit total_steps keeps cycling epochs until it is reached.
  const bool fixed_steps = args_in.total_steps != 0;
  for (std::size_t epoch = 0; step < args.total_steps && (fixed_steps || epoch < args.epochs);
       ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t b = 0; b < order.size() && step < args.total_steps; b += args.batch_size) {
      batch.clear();
      labels.clear();
      for (std::size_t i = b; i < std::min(order.size(), b + args.batch_size); ++i) {
        batch.push_back(train[order[i]]);
        labels.push_back(train[order[i]].label);
      }
      auto lg = loss_and_gradients<float>(batch, labels, params, Objective::Classification,
                                          Mode::Train, mix_seed(args.seed, step * 1000003 + micro));
      if (!std::isfinite(lg.loss)) {
        return finish(TrainStatus::Diverged, "non-finite training loss at step " + std::to_string(step));
      }
      window_loss += lg.loss;
      ++window_batches;
      if (args.grad_accumulation == 1) {
        accum = std::move(lg.gradients);
      } else if (micro == 0) {
        accum = std::move(lg.gradients);
      } else {
        std::vector<Matrix<float>*> dst;
        accum.visit([&](const std::string&, Matrix<float>& m) { dst.push_back(&m); });
        std::size_t k = 0;
        lg.gradients.visit([&](const std::string&, const Matrix<float>& m) { *dst[k++] += m; });
      }
      if (++micro < args.grad_accumulation) continue;
      if (args.grad_accumulation > 1) {
        const float inv = 1.0f / static_cast<float>(args.grad_accumulation);
        accum.visit([&](const std::string&, Matrix<float>& m) { m *= inv; });
      }
      micro = 0;

      try {
        const auto slots = encoder_slots(params, accum);
        adamw_update<float>(slots, opt, lr_at_step(step, args), args);
      } catch (const Error& e) {
        return finish(TrainStatus::Diverged, e.what());
      }
      ++step;

      if (step % args.eval_every == 0) {
        const auto ev = evaluate_encoder(params, validation);
        if (!std::isfinite(ev.loss)) {
          return finish(TrainStatus::Diverged, "non-finite validation loss at step " + std::to_string(step));
        }
        TrainLogRow row;
        row.step = step;
        row.train_loss = window_loss / static_cast<double>(window_batches);
        row.val_loss = ev.loss;
        row.accuracy = ev.metrics.accuracy;
        row.precision = ev.metrics.weighted.precision;
        row.recall = ev.metrics.weighted.recall;
        row.f1 = ev.metrics.weighted.f1;
        result.log.rows.push_back(row);
        if (on_eval) on_eval(row);
        window_loss = 0.0;
        window_batches = 0;
        if (ev.loss < result.best_val_loss) {
          result.best_val_loss = ev.loss;
          result.best = params;
          stale_evals = 0;
        } else if (args.early_stopping && ++stale_evals >= args.patience) {
          return finish(TrainStatus::EarlyStopped);
        }
      }
    }
  }
  return finish(TrainStatus::Completed);
}

template void adamw_update<float>(std::span<const ParamSlot<float>>, OptimizerState<float>&, double,
                                  const TrainingArguments&);
template void adamw_update<double>(std::span<const ParamSlot<double>>, OptimizerState<double>&,
                                   double, const TrainingArguments&);
template std::vector<ParamSlot<float>> encoder_slots<float>(EncoderParams<float>&,
                                                            const EncoderParams<float>&);
template std::vector<ParamSlot<double>> encoder_slots<double>(EncoderParams<double>&,
                                                              const EncoderParams<double>&);

}  // namespace flowids
