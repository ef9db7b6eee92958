#include "flowids/encoder.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "flowids/error.hpp"

namespace flowids {

template <typename T>
using Column = Eigen::Matrix<T, Eigen::Dynamic, 1>;

void EncoderConfig::validate() const {
  if (n_layers == 0) throw Error("encoder needs at least one layer");
  if (hidden_dim == 0 || n_heads == 0 || hidden_dim % n_heads != 0)
    throw Error("hidden_dim must be a positive multiple of n_heads");
  if (ffn_dim == 0) throw Error("ffn_dim must be positive");
  if (max_positions < 2) throw Error("max_positions must be at least 2");
  if (vocab_size == 0) throw Error("vocab_size must be positive");
  if (n_classes != 2) throw Error("only binary classification is supported");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw Error("dropout_rate must lie in [0, 1)");
  if (!(init_std > 0.0)) throw Error("init_std must be positive");
}

EncoderConfig EncoderConfig::desk(std::size_t vocab_size) {
  EncoderConfig c;
  c.vocab_size = vocab_size;
  return c;
}

EncoderConfig EncoderConfig::faithful(std::size_t vocab_size) {
  EncoderConfig c;
  c.n_layers = 12;
  c.hidden_dim = 768;
  c.n_heads = 12;
  c.ffn_dim = 3072;
  c.vocab_size = vocab_size;
  c.activation = Activation::Gelu;
  return c;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

template <typename T>
EncoderParams<T> EncoderParams<T>::zeros_like() const {
  EncoderParams<T> z = *this;
  z.visit([](const std::string&, Matrix<T>& m) { m.setZero(); });
  return z;
}

template <typename T>
std::size_t EncoderParams<T>::parameter_count() const {
  std::size_t n = 0;
  visit([&](const std::string&, const Matrix<T>& m) { n += static_cast<std::size_t>(m.size()); });
  return n;
}

template <typename T>
EncoderParams<T> init_params(const EncoderConfig& config, std::uint64_t seed) {
  config.validate();
  const auto d = static_cast<Eigen::Index>(config.hidden_dim);
  const auto f = static_cast<Eigen::Index>(config.ffn_dim);
  const auto v = static_cast<Eigen::Index>(config.vocab_size);
  const auto c = static_cast<Eigen::Index>(config.n_classes);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto weight = [&](Eigen::Index rows, Eigen::Index cols) {
    Matrix<T> m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      double z;
      do {
        z = normal(rng);
      } while (std::abs(z) > 2.0);
      m.data()[i] = static_cast<T>(z * config.init_std);
    }
    return m;
  };
  auto zeros = [](Eigen::Index cols) { return Matrix<T>::Zero(1, cols); };
  auto ones = [](Eigen::Index cols) { return Matrix<T>::Ones(1, cols); };

  EncoderParams<T> p;
  p.config = config;
  p.token_embedding = weight(v, d);
  p.segment_embedding = weight(2, d);
  p.position_embedding = weight(static_cast<Eigen::Index>(config.max_positions), d);
  p.layers.resize(config.n_layers);
  for (auto& l : p.layers) {
    l.wq = weight(d, d);
    l.bq = zeros(d);
    l.wk = weight(d, d);
    l.bk = zeros(d);
    l.wv = weight(d, d);
    l.bv = zeros(d);
    l.wo = weight(d, d);
    l.bo = zeros(d);
    l.ln1_gain = ones(d);
    l.ln1_bias = zeros(d);
    l.w1 = weight(d, f);
    l.b1 = zeros(f);
    l.w2 = weight(f, d);
    l.b2 = zeros(d);
    l.ln2_gain = ones(d);
    l.ln2_bias = zeros(d);
  }
  p.classifier_weight = weight(d, c);
  p.classifier_bias = zeros(c);
  p.mlm_bias = zeros(v);
  return p;
}

template <typename To, typename From>
EncoderParams<To> cast_params(const EncoderParams<From>& p) {
  EncoderParams<To> out;
  out.config = p.config;
  out.layers.resize(p.layers.size());
  std::vector<const Matrix<From>*> src;
  p.visit([&](const std::string&, const Matrix<From>& m) { src.push_back(&m); });
  // Shapes are set by assignment, so visit order is the only coupling.
  std::size_t i = 0;
  out.visit([&](const std::string&, Matrix<To>& m) { m = src[i++]->template cast<To>(); });
  return out;
}

template <typename T>
Matrix<T> embed_sequence(std::span<const TokenId> ids, std::span<const std::uint8_t> segments,
                         std::size_t length, const EncoderParams<T>& params) {
  if (length > ids.size() || length > segments.size()) throw Error("sequence shorter than length");
  if (length > params.config.max_positions)
    throw Error("sequence length " + std::to_string(length) + " exceeds max_positions");
  Matrix<T> h(static_cast<Eigen::Index>(length), static_cast<Eigen::Index>(params.config.hidden_dim));
  for (std::size_t p = 0; p < length; ++p) {
    const auto id = ids[p];
    if (id < 0 || static_cast<std::size_t>(id) >= params.config.vocab_size)
      throw Error("token id out of range: " + std::to_string(id));
    if (segments[p] > 1) throw Error("segment id out of range");
    const auto r = static_cast<Eigen::Index>(p);
    h.row(r) = params.token_embedding.row(id) + params.segment_embedding.row(segments[p]) +
               params.position_embedding.row(r);
  }
  return h;
}

template <typename T>
AttentionResult<T> self_attention(const Matrix<T>& hidden, std::span<const std::uint8_t> mask,
                                  const LayerParams<T>& layer, std::size_t n_heads) {
  const Eigen::Index n = hidden.rows();
  const Eigen::Index d = hidden.cols();
  if (static_cast<Eigen::Index>(mask.size()) != n) throw Error("attention mask length mismatch");
  if (n_heads == 0 || d % static_cast<Eigen::Index>(n_heads) != 0)
    throw Error("hidden size not divisible by head count");
  bool any = false;
  for (auto m : mask) any = any || m;
  if (!any) throw Error("all-masked key row: attention has no unmasked key");

  const Eigen::Index dk = d / static_cast<Eigen::Index>(n_heads);
  const T scale = T(1) / std::sqrt(static_cast<T>(dk));

  AttentionResult<T> r;
  r.q = (hidden * layer.wq).rowwise() + layer.bq.row(0);
  r.k = (hidden * layer.wk).rowwise() + layer.bk.row(0);
  r.v = (hidden * layer.wv).rowwise() + layer.bv.row(0);
  r.context.resize(n, d);
  r.probs.resize(n_heads);
  for (std::size_t h = 0; h < n_heads; ++h) {
    const Eigen::Index c0 = static_cast<Eigen::Index>(h) * dk;
    Matrix<T> s = (r.q.middleCols(c0, dk) * r.k.middleCols(c0, dk).transpose()) * scale;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!mask[static_cast<std::size_t>(j)]) s.col(j).setConstant(-std::numeric_limits<T>::infinity());
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const T mx = s.row(i).maxCoeff();
      s.row(i) = (s.row(i).array() - mx).exp();
      s.row(i) /= s.row(i).sum();
    }
    r.context.middleCols(c0, dk) = s * r.v.middleCols(c0, dk);
    r.probs[h] = std::move(s);
  }
  r.output = (r.context * layer.wo).rowwise() + layer.bo.row(0);
  return r;
}

namespace {

template <typename T>
T activate(T x, Activation a) {
  if (a == Activation::Relu) return x > T(0) ? x : T(0);
  return T(0.5) * x * (T(1) + std::erf(x / std::sqrt(T(2))));
}

template <typename T>
T activate_grad(T x, Activation a) {
  if (a == Activation::Relu) return x > T(0) ? T(1) : T(0);
  const T cdf = T(0.5) * (T(1) + std::erf(x / std::sqrt(T(2))));
  const T pdf = std::exp(T(-0.5) * x * x) / std::sqrt(T(2) * T(3.14159265358979323846));
  return cdf + x * pdf;
}

template <typename T>
Matrix<T> layer_norm(const Matrix<T>& x, const Matrix<T>& gain, const Matrix<T>& bias, double eps,
                     Matrix<T>& xhat, Column<T>& rstd) {
  const Eigen::Index n = x.rows();
  xhat.resize(n, x.cols());
  rstd.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const T mu = x.row(r).mean();
    auto centered = (x.row(r).array() - mu).eval();
    const T var = centered.square().mean();
    const T rs = T(1) / std::sqrt(var + static_cast<T>(eps));
    xhat.row(r) = centered * rs;
    rstd(r) = rs;
  }
  Matrix<T> y = (xhat.array().rowwise() * gain.row(0).array()).matrix();
  y.rowwise() += bias.row(0);
  return y;
}

template <typename T>
Matrix<T> layer_norm_backward(const Matrix<T>& dy, const Matrix<T>& xhat, const Column<T>& rstd,
                              const Matrix<T>& gain, Matrix<T>& dgain, Matrix<T>& dbias) {
  dgain.row(0) += (dy.array() * xhat.array()).colwise().sum().matrix();
  dbias.row(0) += dy.colwise().sum();
  Matrix<T> dxhat = (dy.array().rowwise() * gain.row(0).array()).matrix();
  Matrix<T> dx(dy.rows(), dy.cols());
  for (Eigen::Index r = 0; r < dy.rows(); ++r) {
    const T m1 = dxhat.row(r).mean();
    const T m2 = (dxhat.row(r).array() * xhat.row(r).array()).mean();
    dx.row(r) = (rstd(r) * (dxhat.row(r).array() - m1 - xhat.row(r).array() * m2)).matrix();
  }
  return dx;
}

template <typename T>
Matrix<T> dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, std::mt19937_64& rng) {
  Matrix<T> m(rows, cols);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const T keep = static_cast<T>(1.0 / (1.0 - rate));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = unit(rng) < rate ? T(0) : keep;
  return m;
}

std::size_t prefix_length(std::span<const std::uint8_t> mask) {
  std::size_t n = 0;
  while (n < mask.size() && mask[n]) ++n;
  for (std::size_t i = n; i < mask.size(); ++i) {
    if (mask[i]) throw Error("attention mask must be a prefix of ones");
  }
  return n;
}

}  // namespace

template <typename T>
Matrix<T> feed_forward(const Matrix<T>& hidden, const LayerParams<T>& layer, Activation act) {
  Matrix<T> pre = (hidden * layer.w1).rowwise() + layer.b1.row(0);
  pre = pre.unaryExpr([act](T x) { return activate(x, act); });
  Matrix<T> out = pre * layer.w2;
  out.rowwise() += layer.b2.row(0);
  return out;
}

template <typename T>
SequenceTape<T> forward_sequence(std::span<const TokenId> ids, std::span<const std::uint8_t> segments,
                                 std::span<const std::uint8_t> mask, const EncoderParams<T>& params,
                                 Mode mode, std::uint64_t seed) {
  const auto& cfg = params.config;
  if (ids.size() != mask.size() || ids.size() != segments.size())
    throw Error("shape mismatch between ids, segments and mask");
  const std::size_t n = prefix_length(mask);
  if (n == 0) throw Error("all-masked key row: sequence has no unmasked token");

  SequenceTape<T> tape;
  tape.length = n;
  tape.ids.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n));
  tape.segments.assign(segments.begin(), segments.begin() + static_cast<std::ptrdiff_t>(n));

  const bool drop = mode == Mode::Train && cfg.dropout_rate > 0.0;
  std::mt19937_64 rng(seed);
  const auto rows = static_cast<Eigen::Index>(n);
  const auto d = static_cast<Eigen::Index>(cfg.hidden_dim);

  Matrix<T> h = embed_sequence<T>(ids, segments, n, params);
  if (drop) {
    tape.embedding_dropout = dropout_mask<T>(rows, d, cfg.dropout_rate, rng);
    h.array() *= tape.embedding_dropout.array();
  }
  const std::vector<std::uint8_t> ones(n, 1);
  tape.layers.resize(params.layers.size());
  for (std::size_t li = 0; li < params.layers.size(); ++li) {
    const auto& layer = params.layers[li];
    auto& lt = tape.layers[li];
    lt.input = h;
    lt.attention = self_attention<T>(h, ones, layer, cfg.n_heads);
    Matrix<T> a = lt.attention.output;
    if (drop) {
      lt.attention_dropout = dropout_mask<T>(rows, d, cfg.dropout_rate, rng);
      a.array() *= lt.attention_dropout.array();
    }
    lt.norm1_out = layer_norm<T>(h + a, layer.ln1_gain, layer.ln1_bias, cfg.layer_norm_eps,
                                 lt.norm1_xhat, lt.norm1_rstd);
    lt.ffn_pre = (lt.norm1_out * layer.w1).rowwise() + layer.b1.row(0);
    const auto act = cfg.activation;
    lt.ffn_act = lt.ffn_pre.unaryExpr([act](T x) { return activate(x, act); });
    Matrix<T> f = lt.ffn_act * layer.w2;
    f.rowwise() += layer.b2.row(0);
    if (drop) {
      lt.ffn_dropout = dropout_mask<T>(rows, d, cfg.dropout_rate, rng);
      f.array() *= lt.ffn_dropout.array();
    }
    h = layer_norm<T>(lt.norm1_out + f, layer.ln2_gain, layer.ln2_bias, cfg.layer_norm_eps,
                      lt.norm2_xhat, lt.norm2_rstd);
  }
  tape.output = std::move(h);
  return tape;
}

namespace {

// Accumulates parameter gradients of one sequence given dL/d(output).
template <typename T>
void backward_sequence(const SequenceTape<T>& tape, Matrix<T> dh, const EncoderParams<T>& params,
                       EncoderParams<T>& grads) {
  const auto& cfg = params.config;
  const auto n = static_cast<Eigen::Index>(tape.length);
  const Eigen::Index d = static_cast<Eigen::Index>(cfg.hidden_dim);
  const Eigen::Index dk = d / static_cast<Eigen::Index>(cfg.n_heads);
  const T scale = T(1) / std::sqrt(static_cast<T>(dk));

  for (std::size_t li = params.layers.size(); li-- > 0;) {
    const auto& layer = params.layers[li];
    auto& g = grads.layers[li];
    const auto& lt = tape.layers[li];

    // Second sublayer: h = LN2(x1 + drop(act(x1 W1 + b1) W2 + b2)).
    Matrix<T> dres2 = layer_norm_backward<T>(dh, lt.norm2_xhat, lt.norm2_rstd, layer.ln2_gain,
                                             g.ln2_gain, g.ln2_bias);
    Matrix<T> df = dres2;
    if (lt.ffn_dropout.size()) df.array() *= lt.ffn_dropout.array();
    g.w2.noalias() += lt.ffn_act.transpose() * df;
    g.b2.row(0) += df.colwise().sum();
    Matrix<T> dpre = df * layer.w2.transpose();
    const auto act = cfg.activation;
    dpre.array() *= lt.ffn_pre.unaryExpr([act](T x) { return activate_grad(x, act); }).array();
    g.w1.noalias() += lt.norm1_out.transpose() * dpre;
    g.b1.row(0) += dpre.colwise().sum();
    Matrix<T> dx1 = dres2;
    dx1.noalias() += dpre * layer.w1.transpose();

    // First sublayer: x1 = LN1(x + drop(attention(x))).
    Matrix<T> dres1 = layer_norm_backward<T>(dx1, lt.norm1_xhat, lt.norm1_rstd, layer.ln1_gain,
                                             g.ln1_gain, g.ln1_bias);
    Matrix<T> da = dres1;
    if (lt.attention_dropout.size()) da.array() *= lt.attention_dropout.array();
    const auto& at = lt.attention;
    g.wo.noalias() += at.context.transpose() * da;
    g.bo.row(0) += da.colwise().sum();
    Matrix<T> dctx = da * layer.wo.transpose();

    Matrix<T> dq(n, d), dkm(n, d), dv(n, d);
    for (std::size_t hh = 0; hh < cfg.n_heads; ++hh) {
      const Eigen::Index c0 = static_cast<Eigen::Index>(hh) * dk;
      const auto& p = at.probs[hh];
      auto dc = dctx.middleCols(c0, dk);
      Matrix<T> dp = dc * at.v.middleCols(c0, dk).transpose();
      dv.middleCols(c0, dk) = p.transpose() * dc;
      Column<T> row_dot = (dp.array() * p.array()).rowwise().sum();
      Matrix<T> ds = (p.array() * (dp.array().colwise() - row_dot.array())).matrix() * scale;
      dq.middleCols(c0, dk) = ds * at.k.middleCols(c0, dk);
      dkm.middleCols(c0, dk) = ds.transpose() * at.q.middleCols(c0, dk);
    }
    g.wq.noalias() += lt.input.transpose() * dq;
    g.bq.row(0) += dq.colwise().sum();
    g.wk.noalias() += lt.input.transpose() * dkm;
    g.bk.row(0) += dkm.colwise().sum();
    g.wv.noalias() += lt.input.transpose() * dv;
    g.bv.row(0) += dv.colwise().sum();

    dh = dres1;
    dh.noalias() += dq * layer.wq.transpose();
    dh.noalias() += dkm * layer.wk.transpose();
    dh.noalias() += dv * layer.wv.transpose();
  }

  if (tape.embedding_dropout.size()) dh.array() *= tape.embedding_dropout.array();
  for (Eigen::Index p = 0; p < n; ++p) {
    const auto sp = static_cast<std::size_t>(p);
    grads.token_embedding.row(tape.ids[sp]) += dh.row(p);
    grads.segment_embedding.row(tape.segments[sp]) += dh.row(p);
    grads.position_embedding.row(p) += dh.row(p);
  }
}

// Softmax over one row of logits, computed in double for the loss value.
template <typename T>
Matrix<T> softmax_row(const Matrix<T>& z, double& log_sum_exp) {
  const T mx = z.maxCoeff();
  Matrix<T> e = (z.array() - mx).exp().matrix();
  const T s = e.sum();
  log_sum_exp = static_cast<double>(mx) + std::log(static_cast<double>(s));
  return e / s;
}

void check_batch(std::span<const TokenSequence> batch) {
  if (batch.empty()) throw Error("empty batch");
  const auto len = batch.front().ids.size();
  for (const auto& s : batch) {
    if (s.ids.size() != len || s.attention_mask.size() != len || s.segment_ids.size() != len)
      throw Error("shape mismatch: batch items must share max_len");
  }
}

}  // namespace

template <typename T>
ForwardResult<T> forward(std::span<const TokenSequence> batch, const EncoderParams<T>& params,
                         Mode mode, std::uint64_t seed) {
  check_batch(batch);
  ForwardResult<T> r;
  r.logits.resize(static_cast<Eigen::Index>(batch.size()),
                  static_cast<Eigen::Index>(params.config.n_classes));
  r.tapes.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& s = batch[i];
    auto tape = forward_sequence<T>(s.ids, s.segment_ids, s.attention_mask, params, mode,
                                    mix_seed(seed, i));
    r.logits.row(static_cast<Eigen::Index>(i)) =
        tape.output.row(0) * params.classifier_weight + params.classifier_bias;
    r.tapes.push_back(std::move(tape));
  }
  return r;
}

template <typename T>
LossAndGradients<T> loss_and_gradients(std::span<const TokenSequence> batch,
                                       std::span<const int> labels, const EncoderParams<T>& params,
                                       Objective objective, Mode mode, std::uint64_t seed,
                                       const MlmOptions& mlm) {
  check_batch(batch);
  LossAndGradients<T> out;
  out.gradients = params.zeros_like();
  auto& grads = out.gradients;
  const auto d = static_cast<Eigen::Index>(params.config.hidden_dim);

  if (objective == Objective::Classification) {
    if (labels.size() != batch.size()) throw Error("label count does not match batch size");
    const T inv_b = T(1) / static_cast<T>(batch.size());
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const int y = labels[i];
      if (y < 0 || static_cast<std::size_t>(y) >= params.config.n_classes)
        throw Error("classification label out of range");
      const auto& s = batch[i];
      auto tape = forward_sequence<T>(s.ids, s.segment_ids, s.attention_mask, params, mode,
                                      mix_seed(seed, i));
      Matrix<T> cls = tape.output.row(0);
      Matrix<T> z = cls * params.classifier_weight + params.classifier_bias;
      double lse = 0.0;
      Matrix<T> dz = softmax_row<T>(z, lse);
      total += lse - static_cast<double>(z(0, y));
      dz(0, y) -= T(1);
      dz *= inv_b;
      grads.classifier_weight.noalias() += cls.transpose() * dz;
      grads.classifier_bias += dz;
      Matrix<T> dh = Matrix<T>::Zero(static_cast<Eigen::Index>(tape.length), d);
      dh.row(0) = dz * params.classifier_weight.transpose();
      backward_sequence<T>(tape, std::move(dh), params, grads);
    }
    out.loss = total / static_cast<double>(batch.size());
    return out;
  }

  if (!mlm.vocab) throw Error("mlm objective requires a vocabulary");
  if (mlm.vocab->size() != params.config.vocab_size) throw Error("vocabulary size mismatch");
  std::vector<MlmCorruption> corrupted;
  corrupted.reserve(batch.size());
  std::size_t positions = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    corrupted.push_back(mlm_mask(batch[i], *mlm.vocab, mlm.mask_rate, mix_seed(~seed, i)));
    positions += corrupted.back().targets.size();
  }
  if (positions == 0) throw Error("mlm objective with zero masked positions");
  out.mlm_positions = positions;
  const T inv_m = T(1) / static_cast<T>(positions);
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& s = batch[i];
    const auto& c = corrupted[i];
    if (c.targets.empty()) continue;
    auto tape = forward_sequence<T>(c.ids, s.segment_ids, s.attention_mask, params, mode,
                                    mix_seed(seed, i));
    Matrix<T> dh = Matrix<T>::Zero(static_cast<Eigen::Index>(tape.length), d);
    for (const auto& [pos, original] : c.targets) {
      const auto r = static_cast<Eigen::Index>(pos);
      Matrix<T> hrow = tape.output.row(r);
      Matrix<T> z = hrow * params.token_embedding.transpose() + params.mlm_bias;
      double lse = 0.0;
      Matrix<T> dz = softmax_row<T>(z, lse);
      total += lse - static_cast<double>(z(0, original));
      dz(0, original) -= T(1);
      dz *= inv_m;
      grads.mlm_bias += dz;
      grads.token_embedding.noalias() += dz.transpose() * hrow;
      dh.row(r) = dz * params.token_embedding;
    }
    backward_sequence<T>(tape, std::move(dh), params, grads);
  }
  out.loss = total / static_cast<double>(positions);
  return out;
}

template <typename T>
std::vector<double> positive_scores(const Matrix<T>& logits) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double z0 = static_cast<double>(logits(i, 0));
    const double z1 = static_cast<double>(logits(i, 1));
    out.push_back(1.0 / (1.0 + std::exp(z0 - z1)));
  }
  return out;
}

#define FLOWIDS_INSTANTIATE_ENCODER(T)                                                            \
  template struct EncoderParams<T>;                                                               \
  template EncoderParams<T> init_params<T>(const EncoderConfig&, std::uint64_t);                  \
  template Matrix<T> embed_sequence<T>(std::span<const TokenId>, std::span<const std::uint8_t>,   \
                                       std::size_t, const EncoderParams<T>&);                     \
  template AttentionResult<T> self_attention<T>(const Matrix<T>&, std::span<const std::uint8_t>,  \
                                                const LayerParams<T>&, std::size_t);              \
  template Matrix<T> feed_forward<T>(const Matrix<T>&, const LayerParams<T>&, Activation);        \
  template SequenceTape<T> forward_sequence<T>(std::span<const TokenId>,                          \
                                               std::span<const std::uint8_t>,                     \
                                               std::span<const std::uint8_t>,                     \
                                               const EncoderParams<T>&, Mode, std::uint64_t);     \
  template ForwardResult<T> forward<T>(std::span<const TokenSequence>, const EncoderParams<T>&,   \
                                       Mode, std::uint64_t);                                      \
  template LossAndGradients<T> loss_and_gradients<T>(                                             \
      std::span<const TokenSequence>, std::span<const int>, const EncoderParams<T>&, Objective,    \
      Mode, std::uint64_t, const MlmOptions&);                                                    \
  template std::vector<double> positive_scores<T>(const Matrix<T>&);

FLOWIDS_INSTANTIATE_ENCODER(float)
FLOWIDS_INSTANTIATE_ENCODER(double)

template EncoderParams<double> cast_params<double, float>(const EncoderParams<float>&);
template EncoderParams<float> cast_params<float, double>(const EncoderParams<double>&);

}  // namespace flowids
