#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "flowids/checkpoint.hpp"
#include "flowids/error.hpp"
#include "flowids/trainer.hpp"

using namespace flowids;
namespace fs = std::filesystem;

namespace {

TrainingArguments schedule(double peak, std::size_t warmup, std::size_t total) {
  TrainingArguments a;
  a.learning_rate = peak;
  a.warmup_steps = warmup;
  a.total_steps = total;
  return a;
}

struct Scalar {
  Matrix<double> p = Matrix<double>::Constant(1, 1, 1.0);
  Matrix<double> g = Matrix<double>::Zero(1, 1);
  std::vector<ParamSlot<double>> slots() { return {{"w", &p, &g, true}}; }
};

std::vector<TokenSequence> toy_set(const Vocabulary& v, std::size_t n, std::uint64_t seed) {
  std::vector<TokenSequence> out;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(rng() % 2);
    out.push_back(encode(y ? "attack flood flood" : "normal quiet", v, 8, y));
  }
  return out;
}

}  // namespace

TEST_CASE("learning-rate schedule") {
  const auto a = schedule(1e-5, 500, 2000);
  CHECK(lr_at_step(0, a) == 0.0);
  CHECK(lr_at_step(250, a) == doctest::Approx(5e-6).epsilon(1e-12));
  CHECK(lr_at_step(500, a) == 1e-5);
  CHECK(lr_at_step(1250, a) == doctest::Approx(5e-6).epsilon(1e-12));
  CHECK(lr_at_step(2000, a) == 0.0);
  CHECK_THROWS_AS(lr_at_step(2001, a), Error);
  double peak = 0.0;
  for (std::size_t s = 0; s <= 2000; ++s) peak = std::max(peak, lr_at_step(s, a));
  CHECK(peak == 1e-5);
}

TEST_CASE("adamw hand cases") {
  TrainingArguments args;
  {
    Scalar s;
    args.weight_decay = 0.01;
    OptimizerState<double> st;
    const auto slots = s.slots();
    adamw_update<double>(slots, st, 0.1, args);
    CHECK(s.p(0, 0) == doctest::Approx(0.999).epsilon(1e-12));
    CHECK(st.t == 1);
  }
  {
    Scalar s;
    s.g(0, 0) = 2.0;
    args.weight_decay = 0.0;
    OptimizerState<double> st;
    const auto slots = s.slots();
    adamw_update<double>(slots, st, 0.1, args);
    CHECK(s.p(0, 0) == doctest::Approx(1.0 - 0.1 * (2.0 / (2.0 + 1e-8))).epsilon(1e-12));
  }
  {
    Scalar s;
    OptimizerState<double> st;
    const auto slots = s.slots();
    adamw_update<double>(slots, st, 0.1, args);
    CHECK(s.p(0, 0) == 1.0);
  }
  {
    // Three steps of plain Adam against the formula.
    Scalar s;
    OptimizerState<double> st;
    const double grads[] = {0.5, -1.5, 2.0};
    double m = 0, v = 0, p = 1.0;
    for (int t = 1; t <= 3; ++t) {
      s.g(0, 0) = grads[t - 1];
      const auto slots = s.slots();
      adamw_update<double>(slots, st, 0.05, args);
      m = 0.9 * m + 0.1 * grads[t - 1];
      v = 0.999 * v + 0.001 * grads[t - 1] * grads[t - 1];
      const double mh = m / (1 - std::pow(0.9, t)), vh = v / (1 - std::pow(0.999, t));
      p -= 0.05 * mh / (std::sqrt(vh) + 1e-8);
      CHECK(s.p(0, 0) == doctest::Approx(p).epsilon(1e-12));
    }
  }
  {
    Scalar s;
    s.g(0, 0) = std::nan("");
    OptimizerState<double> st;
    const auto slots = s.slots();
    CHECK_THROWS_WITH_AS(adamw_update<double>(slots, st, 0.1, args), doctest::Contains("non-finite gradient"), Error);
    CHECK(s.p(0, 0) == 1.0);
  }
}

TEST_CASE("biases and norm parameters skip weight decay") {
  auto p = init_params<float>(EncoderConfig::desk(50), 1);
  const auto g = p.zeros_like();
  for (const auto& s : encoder_slots(p, g)) {
    const bool exempt = s.name.ends_with(".bias") || s.name.find(".norm.") != std::string::npos;
    CHECK(s.decay == !exempt);
  }
}

TEST_CASE("training arguments validation") {
  TrainingArguments a;
  CHECK_NOTHROW(a.validate());
  a.patience = 0;
  CHECK_THROWS_AS(a.validate(), Error);
  a = {};
  a.total_steps = 10;
  a.warmup_steps = 11;
  CHECK_THROWS_AS(a.validate(), Error);
  a = {};
  a.batch_size = 10;
  CHECK(a.steps_for(95) == 10);
}

TEST_CASE("fine_tune: seeded, logged, best checkpoint, early stopping") {
  const auto v = build_vocab(std::vector<std::string>{"attack flood flood", "normal quiet"}, 30);
  auto cfg = EncoderConfig::desk(v.size());
  cfg.hidden_dim = 16;
  cfg.n_heads = 2;
  cfg.ffn_dim = 32;
  cfg.max_positions = 8;
  const auto init = init_params<float>(cfg, 4);
  const auto train = toy_set(v, 64, 1), val = toy_set(v, 16, 2);
  TrainingArguments args;
  args.learning_rate = 2e-3;
  args.batch_size = 8;
  args.epochs = 4;
  args.eval_every = 4;
  args.warmup_steps = 4;
  args.seed = 3;
  const auto a = fine_tune(init, train, val, args);
  const auto b = fine_tune(init, train, val, args);
  CHECK(a.log == b.log);
  REQUIRE_FALSE(a.log.rows.empty());
  for (std::size_t i = 0; i < a.log.rows.size(); ++i) {
    CHECK(a.log.rows[i].step == 4 * (i + 1));
    CHECK(a.best_val_loss <= a.log.rows[i].val_loss);
  }
  CHECK(evaluate_encoder(a.best, val).loss == doctest::Approx(a.best_val_loss).epsilon(1e-6));
  CHECK(a.log.rows.back().accuracy >= 0.97);
  CHECK(a.log.csv().rfind("step,train_loss,val_loss,accuracy,precision,recall,f1\n", 0) == 0);

  // Validation is the training text with the opposite label, so every update makes it worse:
  // patience 1 stops at the second evaluation.
  const std::vector<TokenSequence> one{encode("normal quiet", v, 8, 0)};
  const std::vector<TokenSequence> flipped{encode("normal quiet", v, 8, 1)};
  TrainingArguments p1;
  p1.learning_rate = 1e-2;
  p1.batch_size = 1;
  p1.eval_every = 1;
  p1.warmup_steps = 0;
  p1.total_steps = 50;
  p1.patience = 1;
  const auto r = fine_tune(init, one, flipped, p1);
  CHECK(r.status == TrainStatus::EarlyStopped);
  REQUIRE(r.log.rows.size() == 2);
  CHECK(r.log.rows[1].val_loss > r.log.rows[0].val_loss);
  CHECK(r.best_val_loss == r.log.rows[0].val_loss);
  p1.early_stopping = false;
  CHECK(fine_tune(init, one, flipped, p1).log.rows.size() == 50);
}

TEST_CASE("checkpoint round trip is bit exact") {
  const auto p = init_params<float>(EncoderConfig::desk(77), 8);
  const auto dir = fs::temp_directory_path() / "flowids_ckpt_test";
  fs::remove_all(dir);
  auto ck = encoder_checkpoint(p);
  ck.set("note", "x");
  save_checkpoint(dir, ck);
  const auto back = load_checkpoint(dir);
  CHECK(back == ck);
  const auto q = encoder_from_checkpoint(back);
  CHECK(q.config == p.config);
  bool same = true;
  std::vector<const Matrix<float>*> qs;
  q.visit([&](const std::string&, const Matrix<float>& m) { qs.push_back(&m); });
  std::size_t i = 0;
  p.visit([&](const std::string&, const Matrix<float>& m) { same = same && m == *qs[i++]; });
  CHECK(same);

  // Little-endian float32 on disk.
  std::ifstream bin(dir / "tensors.bin", std::ios::binary);
  unsigned char bytes[4];
  bin.read(reinterpret_cast<char*>(bytes), 4);
  const float first = p.token_embedding(0, 0);
  const auto u = std::bit_cast<std::uint32_t>(first);
  CHECK(bytes[0] == (u & 0xff));
  CHECK(bytes[3] == (u >> 24));

  fs::remove(dir / "tensors.bin");
  CHECK_THROWS_WITH_AS(load_checkpoint(dir), doctest::Contains("missing checkpoint"), Error);
  fs::remove_all(dir);
}

TEST_CASE("key value parsing") {
  const auto kv = parse_key_values("# comment\n a = 1 \n\nb=two words\n");
  REQUIRE(kv.size() == 2);
  CHECK(kv[0] == std::pair<std::string, std::string>{"a", "1"});
  CHECK(kv[1].second == "two words");
  CHECK_THROWS_AS(parse_key_values("novalue\n"), Error);
}
