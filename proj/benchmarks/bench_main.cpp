#include <benchmark/benchmark.h>

#include <random>

#include "flowids/baselines.hpp"
#include "flowids/encoder.hpp"
#include "flowids/feature_select.hpp"
#include "flowids/sentence_codec.hpp"
#include "flowids/tokenizer.hpp"

using namespace flowids;

namespace {

std::vector<std::string> corpus(std::size_t flows) {
  SyntheticSpec spec;
  spec.n_normal = flows / 2;
  spec.n_attack[AttackCategory::DDoS] = flows / 2;
  spec.seed = 1;
  const auto ds = generate_synthetic_flows(spec);
  std::vector<std::string> out;
  for (const auto& c : combine_flows(dataset_to_sentences(ds, ds.schema.features))) out.push_back(c.text);
  return out;
}

void BM_TokenizerEncode(benchmark::State& state) {
  const auto texts = corpus(400);
  const auto vocab = build_vocab(texts, 1000);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(encode(texts[i++ % texts.size()], vocab, 128));
}
BENCHMARK(BM_TokenizerEncode);

void BM_EncoderForward(benchmark::State& state) {
  const auto texts = corpus(4 * 64);
  const auto vocab = build_vocab(texts, 1000);
  const auto max_len = static_cast<std::size_t>(state.range(0));
  std::vector<TokenSequence> batch;
  for (std::size_t i = 0; i < 32; ++i) batch.push_back(encode(texts[i], vocab, max_len, 0));
  auto cfg = EncoderConfig::desk(vocab.size());
  const auto params = init_params<float>(cfg, 1);
  for (auto _ : state) benchmark::DoNotOptimize(forward<float>(batch, params, Mode::Eval, 0));
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_EncoderForward)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_EncoderTrainStep(benchmark::State& state) {
  const auto texts = corpus(4 * 64);
  const auto vocab = build_vocab(texts, 1000);
  std::vector<TokenSequence> batch;
  std::vector<int> y;
  for (std::size_t i = 0; i < 32; ++i) {
    batch.push_back(encode(texts[i], vocab, 128, int(i % 2)));
    y.push_back(int(i % 2));
  }
  const auto params = init_params<float>(EncoderConfig::desk(vocab.size()), 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(loss_and_gradients<float>(batch, y, params, Objective::Classification, Mode::Train, 0));
}
BENCHMARK(BM_EncoderTrainStep)->Unit(benchmark::kMillisecond);

void BM_ForestFit(benchmark::State& state) {
  SyntheticSpec spec;
  spec.n_normal = static_cast<std::size_t>(state.range(0));
  spec.n_attack[AttackCategory::DoS] = spec.n_normal;
  const auto ds = generate_synthetic_flows(spec);
  const auto x = FeatureMatrix::from_dataset(ds);
  const auto y = ds.labels();
  ForestConfig cfg;
  cfg.n_trees = 20;
  for (auto _ : state) benchmark::DoNotOptimize(fit_random_forest(x, y, cfg));
}
BENCHMARK(BM_ForestFit)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_CnnForward(benchmark::State& state) {
  CnnConfig cfg;
  const auto params = init_cnn<float>(cfg, 1);
  std::mt19937 rng(2);
  std::uniform_real_distribution<float> u(0.0f, 0.1f);
  Matrix<float> x(32, 512);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(cnn_predict(params, x));
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_CnnForward)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
