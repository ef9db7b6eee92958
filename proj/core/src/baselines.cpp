#include "flowids/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "flowids/error.hpp"
#include "flowids/trainer.hpp"

namespace flowids {

double binary_cross_entropy(std::span<const double> p, std::span<const int> y) {
  if (p.size() != y.size()) throw Error("binary_cross_entropy: length mismatch");
  if (p.empty()) throw Error("binary_cross_entropy: empty input");
  constexpr double lo = 1e-7, hi = 1.0 - 1e-7;
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double q = std::clamp(p[i], lo, hi);
    total -= y[i] ? std::log(q) : std::log(1.0 - q);
  }
  return total / static_cast<double>(p.size());
}

void MlpConfig::validate() const {
  if (!input_dim || !hidden1 || !hidden2) throw Error("mlp dimensions must be positive");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) throw Error("dropout_rate must be in [0, 1)");
}

std::size_t CnnConfig::conv1_len() const {
  return same_padding ? input_len : (input_len >= kernel ? input_len - kernel + 1 : 0);
}
std::size_t CnnConfig::pool1_len() const { return conv1_len() / pool; }
std::size_t CnnConfig::conv2_len() const {
  const auto l = pool1_len();
  return same_padding ? l : (l >= kernel ? l - kernel + 1 : 0);
}
std::size_t CnnConfig::pool2_len() const { return conv2_len() / pool; }

void CnnConfig::validate() const {
  if (!filters || !kernel || !pool || !dense) throw Error("cnn dimensions must be positive");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) throw Error("dropout_rate must be in [0, 1)");
  if (pool2_len() == 0) throw Error("cnn input too short for two conv/pool stages");
}

namespace {

template <typename T>
Matrix<T> glorot(std::size_t rows, std::size_t cols, double fan_in, double fan_out, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> u(-limit, limit);
  Matrix<T> m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(u(rng));
  return m;
}

template <typename T>
Matrix<T> zeros(std::size_t rows, std::size_t cols) {
  return Matrix<T>::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

template <typename T>
Matrix<T> dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Mode mode, std::mt19937_64& rng) {
  Matrix<T> m = Matrix<T>::Ones(rows, cols);
  if (mode == Mode::Eval || rate == 0.0) return m;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const T keep = static_cast<T>(1.0 / (1.0 - rate));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng) < rate ? T(0) : keep;
  return m;
}

template <typename T>
Matrix<T> relu(const Matrix<T>& x) { return x.cwiseMax(T(0)); }

template <typename T>
Matrix<T> relu_grad(const Matrix<T>& upstream, const Matrix<T>& pre) {
  return (pre.array() > T(0)).select(upstream, T(0));
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }
double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Logit loss and its gradient (already divided by the batch size).
template <typename T>
double logit_loss(const Matrix<T>& z, std::span<const int> y, Matrix<T>& dz) {
  const auto n = static_cast<double>(z.rows());
  dz.resize(z.rows(), 1);
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double zi = static_cast<double>(z(i, 0));
    const int yi = y[static_cast<std::size_t>(i)];
    total += softplus(zi) - yi * zi;
    dz(i, 0) = static_cast<T>((sigmoid(zi) - yi) / n);
  }
  return total / n;
}

void check_batch(Eigen::Index rows, std::size_t labels, Eigen::Index cols, std::size_t expected) {
  if (rows == 0) throw Error("empty batch");
  if (static_cast<std::size_t>(rows) != labels) throw Error("batch and label counts differ");
  if (static_cast<std::size_t>(cols) != expected)
    throw Error("input has " + std::to_string(cols) + " features, model expects " + std::to_string(expected));
}

// (out_len x kernel*channels) patches; out-of-range taps read zero padding.
template <typename T>
Matrix<T> im2col(const Matrix<T>& input, std::size_t kernel, bool same, std::size_t& pad_left) {
  const auto len = static_cast<std::size_t>(input.rows());
  const auto ch = static_cast<std::size_t>(input.cols());
  pad_left = same ? (kernel - 1) / 2 : 0;
  const std::size_t out_len = same ? len : (len >= kernel ? len - kernel + 1 : 0);
  if (out_len == 0) throw Error("conv1d input shorter than the kernel");
  Matrix<T> cols = Matrix<T>::Zero(static_cast<Eigen::Index>(out_len), static_cast<Eigen::Index>(kernel * ch));
  for (std::size_t r = 0; r < out_len; ++r) {
    for (std::size_t tap = 0; tap < kernel; ++tap) {
      const auto src = static_cast<std::ptrdiff_t>(r + tap) - static_cast<std::ptrdiff_t>(pad_left);
      if (src < 0 || src >= static_cast<std::ptrdiff_t>(len)) continue;
      cols.row(static_cast<Eigen::Index>(r)).segment(static_cast<Eigen::Index>(tap * ch), static_cast<Eigen::Index>(ch)) =
          input.row(src);
    }
  }
  return cols;
}

template <typename T>
Matrix<T> col2im(const Matrix<T>& dcols, std::size_t len, std::size_t ch, std::size_t kernel, std::size_t pad_left) {
  Matrix<T> out = Matrix<T>::Zero(static_cast<Eigen::Index>(len), static_cast<Eigen::Index>(ch));
  for (Eigen::Index r = 0; r < dcols.rows(); ++r) {
    for (std::size_t tap = 0; tap < kernel; ++tap) {
      const auto dst = static_cast<std::ptrdiff_t>(r) + static_cast<std::ptrdiff_t>(tap) -
                       static_cast<std::ptrdiff_t>(pad_left);
      if (dst < 0 || dst >= static_cast<std::ptrdiff_t>(len)) continue;
      out.row(dst) += dcols.row(r).segment(static_cast<Eigen::Index>(tap * ch), static_cast<Eigen::Index>(ch));
    }
  }
  return out;
}

template <typename T>
Matrix<T> unpool(const Matrix<T>& grad, const std::vector<std::size_t>& argmax, Eigen::Index in_rows) {
  Matrix<T> out = Matrix<T>::Zero(in_rows, grad.cols());
  for (Eigen::Index r = 0; r < grad.rows(); ++r)
    for (Eigen::Index c = 0; c < grad.cols(); ++c)
      out(static_cast<Eigen::Index>(argmax[static_cast<std::size_t>(r * grad.cols() + c)]), c) += grad(r, c);
  return out;
}

}  // namespace

template <typename T>
MlpParams<T> init_mlp(const MlpConfig& c, std::uint64_t seed) {
  c.validate();
  std::mt19937_64 rng(seed);
  MlpParams<T> p;
  p.config = c;
  p.w1 = glorot<T>(c.input_dim, c.hidden1, double(c.input_dim), double(c.hidden1), rng);
  p.b1 = zeros<T>(1, c.hidden1);
  p.w2 = glorot<T>(c.hidden1, c.hidden2, double(c.hidden1), double(c.hidden2), rng);
  p.b2 = zeros<T>(1, c.hidden2);
  p.w3 = glorot<T>(c.hidden2, 1, double(c.hidden2), 1.0, rng);
  p.b3 = zeros<T>(1, 1);
  return p;
}

template <typename T>
CnnParams<T> init_cnn(const CnnConfig& c, std::uint64_t seed) {
  c.validate();
  std::mt19937_64 rng(seed);
  CnnParams<T> p;
  p.config = c;
  const double k = static_cast<double>(c.kernel), f = static_cast<double>(c.filters);
  p.c1w = glorot<T>(c.kernel, c.filters, k, k * f, rng);
  p.c1b = zeros<T>(1, c.filters);
  p.c2w = glorot<T>(c.kernel * c.filters, c.filters, k * f, k * f, rng);
  p.c2b = zeros<T>(1, c.filters);
  p.dw = glorot<T>(c.flat_dim(), c.dense, double(c.flat_dim()), double(c.dense), rng);
  p.db = zeros<T>(1, c.dense);
  p.ow = glorot<T>(c.dense, 1, double(c.dense), 1.0, rng);
  p.ob = zeros<T>(1, 1);
  return p;
}

template <typename T>
Matrix<T> conv1d(const Matrix<T>& input, const Matrix<T>& weight, const Matrix<T>& bias, std::size_t kernel,
                 bool same_padding) {
  if (static_cast<std::size_t>(weight.rows()) != kernel * static_cast<std::size_t>(input.cols()))
    throw Error("conv1d weight rows must equal kernel * in_channels");
  if (bias.rows() != 1 || bias.cols() != weight.cols()) throw Error("conv1d bias shape mismatch");
  std::size_t pad = 0;
  Matrix<T> out = im2col(input, kernel, same_padding, pad) * weight;
  out.rowwise() += bias.row(0);
  return out;
}

template <typename T>
Matrix<T> max_pool1d(const Matrix<T>& input, std::size_t pool, std::vector<std::size_t>* argmax) {
  if (pool == 0) throw Error("pool size must be positive");
  const auto out_rows = static_cast<Eigen::Index>(static_cast<std::size_t>(input.rows()) / pool);
  Matrix<T> out(out_rows, input.cols());
  if (argmax) argmax->assign(static_cast<std::size_t>(out.size()), 0);
  for (Eigen::Index r = 0; r < out_rows; ++r) {
    for (Eigen::Index c = 0; c < input.cols(); ++c) {
      auto best_row = r * static_cast<Eigen::Index>(pool);
      for (std::size_t j = 1; j < pool; ++j) {
        const auto row = r * static_cast<Eigen::Index>(pool) + static_cast<Eigen::Index>(j);
        if (input(row, c) > input(best_row, c)) best_row = row;
      }
      out(r, c) = input(best_row, c);
      if (argmax) (*argmax)[static_cast<std::size_t>(r * input.cols() + c)] = static_cast<std::size_t>(best_row);
    }
  }
  return out;
}

template <typename T>
BaselineGradients<MlpParams<T>> mlp_loss_and_gradients(const MlpParams<T>& p, const Matrix<T>& x,
                                                       std::span<const int> y, Mode mode, std::uint64_t seed) {
  check_batch(x.rows(), y.size(), x.cols(), p.config.input_dim);
  std::mt19937_64 rng(seed);
  const double rate = p.config.dropout_rate;

  Matrix<T> h1pre = x * p.w1;
  h1pre.rowwise() += p.b1.row(0);
  const Matrix<T> mask1 = dropout_mask<T>(h1pre.rows(), h1pre.cols(), rate, mode, rng);
  const Matrix<T> d1 = relu(h1pre).cwiseProduct(mask1);
  Matrix<T> h2pre = d1 * p.w2;
  h2pre.rowwise() += p.b2.row(0);
  const Matrix<T> mask2 = dropout_mask<T>(h2pre.rows(), h2pre.cols(), rate, mode, rng);
  const Matrix<T> d2 = relu(h2pre).cwiseProduct(mask2);
  Matrix<T> z = d2 * p.w3;
  z.array() += p.b3(0, 0);

  BaselineGradients<MlpParams<T>> out;
  Matrix<T> dz;
  out.loss = logit_loss(z, y, dz);
  auto& g = out.gradients;
  g.config = p.config;
  g.w3 = d2.transpose() * dz;
  g.b3 = dz.colwise().sum();
  const Matrix<T> dh2 = relu_grad<T>((dz * p.w3.transpose()).cwiseProduct(mask2), h2pre);
  g.w2 = d1.transpose() * dh2;
  g.b2 = dh2.colwise().sum();
  const Matrix<T> dh1 = relu_grad<T>((dh2 * p.w2.transpose()).cwiseProduct(mask1), h1pre);
  g.w1 = x.transpose() * dh1;
  g.b1 = dh1.colwise().sum();
  return out;
}

namespace {

template <typename T>
struct CnnSampleTape {
  Matrix<T> cols1, a1pre, p1, cols2, a2pre;
  std::vector<std::size_t> arg1, arg2;
  std::size_t pad1 = 0, pad2 = 0;
};

// Convolutional stages for one sample; returns the flattened pooled features.
template <typename T>
void cnn_features(const CnnParams<T>& p, const Matrix<T>& x, Eigen::Index row, CnnSampleTape<T>& tape,
                  Matrix<T>& flat, Eigen::Index flat_row) {
  const auto& c = p.config;
  const Matrix<T> signal = x.row(row).transpose();
  tape.cols1 = im2col(signal, c.kernel, c.same_padding, tape.pad1);
  tape.a1pre = tape.cols1 * p.c1w;
  tape.a1pre.rowwise() += p.c1b.row(0);
  tape.p1 = max_pool1d<T>(relu(tape.a1pre), c.pool, &tape.arg1);
  tape.cols2 = im2col(tape.p1, c.kernel, c.same_padding, tape.pad2);
  tape.a2pre = tape.cols2 * p.c2w;
  tape.a2pre.rowwise() += p.c2b.row(0);
  const Matrix<T> p2 = max_pool1d<T>(relu(tape.a2pre), c.pool, &tape.arg2);
  flat.row(flat_row) = Eigen::Map<const Matrix<T>>(p2.data(), 1, p2.size());
}

}  // namespace

template <typename T>
BaselineGradients<CnnParams<T>> cnn_loss_and_gradients(const CnnParams<T>& p, const Matrix<T>& x,
                                                       std::span<const int> y, Mode mode, std::uint64_t seed) {
  const auto& c = p.config;
  check_batch(x.rows(), y.size(), x.cols(), c.input_len);
  std::mt19937_64 rng(seed);
  const auto batch = x.rows();
  std::vector<CnnSampleTape<T>> tapes(static_cast<std::size_t>(batch));
  Matrix<T> flat(batch, static_cast<Eigen::Index>(c.flat_dim()));
  for (Eigen::Index i = 0; i < batch; ++i) cnn_features(p, x, i, tapes[static_cast<std::size_t>(i)], flat, i);

  Matrix<T> dpre = flat * p.dw;
  dpre.rowwise() += p.db.row(0);
  const Matrix<T> mask = dropout_mask<T>(dpre.rows(), dpre.cols(), c.dropout_rate, mode, rng);
  const Matrix<T> d = relu(dpre).cwiseProduct(mask);
  Matrix<T> z = d * p.ow;
  z.array() += p.ob(0, 0);

  BaselineGradients<CnnParams<T>> out;
  Matrix<T> dz;
  out.loss = logit_loss(z, y, dz);
  auto& g = out.gradients;
  g.config = c;
  g.ow = d.transpose() * dz;
  g.ob = dz.colwise().sum();
  const Matrix<T> dd = relu_grad<T>((dz * p.ow.transpose()).cwiseProduct(mask), dpre);
  g.dw = flat.transpose() * dd;
  g.db = dd.colwise().sum();
  const Matrix<T> dflat = dd * p.dw.transpose();

  g.c1w = Matrix<T>::Zero(p.c1w.rows(), p.c1w.cols());
  g.c1b = Matrix<T>::Zero(1, p.c1b.cols());
  g.c2w = Matrix<T>::Zero(p.c2w.rows(), p.c2w.cols());
  g.c2b = Matrix<T>::Zero(1, p.c2b.cols());
  const auto f = static_cast<Eigen::Index>(c.filters);
  for (Eigen::Index i = 0; i < batch; ++i) {
    const auto& t = tapes[static_cast<std::size_t>(i)];
    const Matrix<T> dp2 = Eigen::Map<const Matrix<T>>(dflat.row(i).data(), dflat.cols() / f, f);
    const Matrix<T> da2 = relu_grad<T>(unpool(dp2, t.arg2, t.a2pre.rows()), t.a2pre);
    g.c2w.noalias() += t.cols2.transpose() * da2;
    g.c2b += da2.colwise().sum();
    const Matrix<T> dp1 = col2im<T>(da2 * p.c2w.transpose(), static_cast<std::size_t>(t.p1.rows()), c.filters,
                                    c.kernel, t.pad2);
    const Matrix<T> da1 = relu_grad<T>(unpool(dp1, t.arg1, t.a1pre.rows()), t.a1pre);
    g.c1w.noalias() += t.cols1.transpose() * da1;
    g.c1b += da1.colwise().sum();
  }
  return out;
}

template <typename T>
std::vector<double> mlp_predict(const MlpParams<T>& p, const Matrix<T>& x) {
  std::vector<double> out;
  if (x.rows() == 0) return out;
  check_batch(x.rows(), static_cast<std::size_t>(x.rows()), x.cols(), p.config.input_dim);
  Matrix<T> h1 = x * p.w1;
  h1.rowwise() += p.b1.row(0);
  Matrix<T> h2 = relu(h1) * p.w2;
  h2.rowwise() += p.b2.row(0);
  const Matrix<T> z = relu(h2) * p.w3;
  for (Eigen::Index i = 0; i < z.rows(); ++i) out.push_back(sigmoid(static_cast<double>(z(i, 0) + p.b3(0, 0))));
  return out;
}

template <typename T>
std::vector<double> cnn_predict(const CnnParams<T>& p, const Matrix<T>& x) {
  std::vector<double> out;
  if (x.rows() == 0) return out;
  check_batch(x.rows(), static_cast<std::size_t>(x.rows()), x.cols(), p.config.input_len);
  CnnSampleTape<T> tape;
  Matrix<T> flat(1, static_cast<Eigen::Index>(p.config.flat_dim()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    cnn_features(p, x, i, tape, flat, 0);
    Matrix<T> h = flat * p.dw;
    h += p.db;
    const T z = (relu(h) * p.ow)(0, 0) + p.ob(0, 0);
    out.push_back(sigmoid(static_cast<double>(z)));
  }
  return out;
}

std::vector<int> threshold_scores(std::span<const double> scores, double threshold) {
  std::vector<int> out;
  out.reserve(scores.size());
  for (double s : scores) out.push_back(s >= threshold ? 1 : 0);
  return out;
}

namespace {

Matrix<float> gather_rows(const Matrix<float>& x, std::span<const std::size_t> idx) {
  Matrix<float> out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

template <typename P, typename LossFn, typename PredictFn>
BaselineFit<P> fit_baseline(P params, const Matrix<float>& x, std::span<const int> y, const Matrix<float>& x_val,
                            std::span<const int> y_val, const BaselineTrainOptions& o, LossFn loss_fn,
                            PredictFn predict_fn, const std::function<void(const BaselineEpoch&)>& on_epoch) {
  if (x.rows() == 0 || x_val.rows() == 0) throw Error("baseline training needs nonempty train and validation sets");
  if (static_cast<std::size_t>(x.rows()) != y.size() || static_cast<std::size_t>(x_val.rows()) != y_val.size())
    throw Error("feature rows and labels differ in count");
  if (!o.epochs || !o.batch_size || !o.patience) throw Error("epochs, batch_size and patience must be positive");

  TrainingArguments adam;
  adam.learning_rate = o.learning_rate;
  adam.weight_decay = 0.0;
  adam.epsilon = 1e-7;
  OptimizerState<float> opt;
  std::mt19937_64 rng(o.seed);

  BaselineFit<P> fit;
  fit.best = params;
  double best = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  std::vector<std::size_t> order(static_cast<std::size_t>(x.rows()));
  std::vector<int> labels;
  std::uint64_t update = 0;
  for (std::size_t epoch = 1; epoch <= o.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    double train_total = 0.0;
    for (std::size_t b = 0; b < order.size(); b += o.batch_size) {
      const auto idx = std::span<const std::size_t>(order).subspan(b, std::min(o.batch_size, order.size() - b));
      labels.clear();
      for (auto i : idx) labels.push_back(y[i]);
      auto lg = loss_fn(params, gather_rows(x, idx), labels, mix_seed(o.seed, update++));
      if (!std::isfinite(lg.loss)) throw Error("baseline training diverged at epoch " + std::to_string(epoch));
      train_total += lg.loss * static_cast<double>(idx.size());
      std::vector<const Matrix<float>*> grads;
      lg.gradients.visit([&](const std::string&, const Matrix<float>& m) { grads.push_back(&m); });
      std::vector<ParamSlot<float>> slots;
      std::size_t k = 0;
      params.visit([&](const std::string& name, Matrix<float>& m) { slots.push_back({name, &m, grads[k++], false}); });
      adamw_update<float>(slots, opt, o.learning_rate, adam);
    }
    const auto scores = predict_fn(params, x_val);
    BaselineEpoch e;
    e.epoch = epoch;
    e.train_loss = train_total / static_cast<double>(order.size());
    e.val_loss = binary_cross_entropy(scores, y_val);
    e.val_accuracy = classification_metrics(confusion_matrix(threshold_scores(scores, o.threshold), y_val)).accuracy;
    fit.history.push_back(e);
    if (on_epoch) on_epoch(e);
    if (e.val_loss < best) {
      best = e.val_loss;
      fit.best = params;
      stale = 0;
    } else if (++stale >= o.patience) {
      fit.early_stopped = true;
      break;
    }
  }
  return fit;
}

template <typename P>
Checkpoint params_checkpoint(const P& params) {
  Checkpoint ckpt;
  params.visit([&](const std::string& name, const Matrix<float>& m) {
    ckpt.tensors.push_back({name, static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()),
                            std::vector<float>(m.data(), m.data() + m.size())});
  });
  return ckpt;
}

template <typename P>
void fill_params(P& params, const Checkpoint& ckpt) {
  params.visit([&](const std::string& name, Matrix<float>& m) {
    const auto& t = ckpt.tensor(name);
    if (t.rows != static_cast<std::size_t>(m.rows()) || t.cols != static_cast<std::size_t>(m.cols()))
      throw Error("tensor " + name + " has the wrong shape for the model config");
    std::memcpy(m.data(), t.data.data(), t.data.size() * sizeof(float));
  });
}

std::string need(const Checkpoint& ckpt, const std::string& key) {
  auto v = ckpt.setting(key);
  if (!v) throw Error("checkpoint config lacks " + key);
  return *v;
}

void expect_model(const Checkpoint& ckpt, const std::string& model) {
  const auto m = need(ckpt, "model");
  if (m != model) throw Error("checkpoint holds a " + m + " model, expected " + model);
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

BaselineFit<MlpParams<float>> train_mlp(const Matrix<float>& x, std::span<const int> y, const Matrix<float>& x_val,
                                        std::span<const int> y_val, const MlpConfig& config,
                                        const BaselineTrainOptions& options,
                                        const std::function<void(const BaselineEpoch&)>& on_epoch) {
  return fit_baseline(
      init_mlp<float>(config, options.seed), x, y, x_val, y_val, options,
      [](const MlpParams<float>& p, const Matrix<float>& bx, std::span<const int> by, std::uint64_t s) {
        return mlp_loss_and_gradients<float>(p, bx, by, Mode::Train, s);
      },
      [](const MlpParams<float>& p, const Matrix<float>& bx) { return mlp_predict<float>(p, bx); }, on_epoch);
}

BaselineFit<CnnParams<float>> train_cnn(const Matrix<float>& x, std::span<const int> y, const Matrix<float>& x_val,
                                        std::span<const int> y_val, const CnnConfig& config,
                                        const BaselineTrainOptions& options,
                                        const std::function<void(const BaselineEpoch&)>& on_epoch) {
  return fit_baseline(
      init_cnn<float>(config, options.seed), x, y, x_val, y_val, options,
      [](const CnnParams<float>& p, const Matrix<float>& bx, std::span<const int> by, std::uint64_t s) {
        return cnn_loss_and_gradients<float>(p, bx, by, Mode::Train, s);
      },
      [](const CnnParams<float>& p, const Matrix<float>& bx) { return cnn_predict<float>(p, bx); }, on_epoch);
}

Checkpoint mlp_checkpoint(const MlpParams<float>& p) {
  Checkpoint ckpt = params_checkpoint(p);
  ckpt.settings.insert(ckpt.settings.begin(), {{"model", "mlp"},
                                               {"mlp.input_dim", std::to_string(p.config.input_dim)},
                                               {"mlp.hidden1", std::to_string(p.config.hidden1)},
                                               {"mlp.hidden2", std::to_string(p.config.hidden2)},
                                               {"mlp.dropout", num(p.config.dropout_rate)}});
  return ckpt;
}

MlpParams<float> mlp_from_checkpoint(const Checkpoint& ckpt) {
  expect_model(ckpt, "mlp");
  MlpConfig c;
  c.input_dim = std::stoull(need(ckpt, "mlp.input_dim"));
  c.hidden1 = std::stoull(need(ckpt, "mlp.hidden1"));
  c.hidden2 = std::stoull(need(ckpt, "mlp.hidden2"));
  c.dropout_rate = std::stod(need(ckpt, "mlp.dropout"));
  auto p = init_mlp<float>(c, 0);
  fill_params(p, ckpt);
  return p;
}

Checkpoint cnn_checkpoint(const CnnParams<float>& p) {
  Checkpoint ckpt = params_checkpoint(p);
  const auto& c = p.config;
  ckpt.settings.insert(ckpt.settings.begin(), {{"model", "cnn"},
                                               {"cnn.input_len", std::to_string(c.input_len)},
                                               {"cnn.filters", std::to_string(c.filters)},
                                               {"cnn.kernel", std::to_string(c.kernel)},
                                               {"cnn.pool", std::to_string(c.pool)},
                                               {"cnn.dense", std::to_string(c.dense)},
                                               {"cnn.dropout", num(c.dropout_rate)},
                                               {"cnn.padding", c.same_padding ? "same" : "valid"}});
  return ckpt;
}

CnnParams<float> cnn_from_checkpoint(const Checkpoint& ckpt) {
  expect_model(ckpt, "cnn");
  CnnConfig c;
  c.input_len = std::stoull(need(ckpt, "cnn.input_len"));
  c.filters = std::stoull(need(ckpt, "cnn.filters"));
  c.kernel = std::stoull(need(ckpt, "cnn.kernel"));
  c.pool = std::stoull(need(ckpt, "cnn.pool"));
  c.dense = std::stoull(need(ckpt, "cnn.dense"));
  c.dropout_rate = std::stod(need(ckpt, "cnn.dropout"));
  const auto pad = need(ckpt, "cnn.padding");
  if (pad != "same" && pad != "valid") throw Error("unknown padding " + pad);
  c.same_padding = pad == "same";
  auto p = init_cnn<float>(c, 0);
  fill_params(p, ckpt);
  return p;
}

#define FLOWIDS_BASELINE_INSTANTIATE(T)                                                                      \
  template MlpParams<T> init_mlp<T>(const MlpConfig&, std::uint64_t);                                       \
  template CnnParams<T> init_cnn<T>(const CnnConfig&, std::uint64_t);                                       \
  template Matrix<T> conv1d<T>(const Matrix<T>&, const Matrix<T>&, const Matrix<T>&, std::size_t, bool);    \
  template Matrix<T> max_pool1d<T>(const Matrix<T>&, std::size_t, std::vector<std::size_t>*);               \
  template BaselineGradients<MlpParams<T>> mlp_loss_and_gradients<T>(const MlpParams<T>&, const Matrix<T>&, \
                                                                     std::span<const int>, Mode, std::uint64_t); \
  template BaselineGradients<CnnParams<T>> cnn_loss_and_gradients<T>(const CnnParams<T>&, const Matrix<T>&, \
                                                                     std::span<const int>, Mode, std::uint64_t); \
  template std::vector<double> mlp_predict<T>(const MlpParams<T>&, const Matrix<T>&);                       \
  template std::vector<double> cnn_predict<T>(const CnnParams<T>&, const Matrix<T>&);

FLOWIDS_BASELINE_INSTANTIATE(float)
FLOWIDS_BASELINE_INSTANTIATE(double)

}  // namespace flowids
