// Acceptance runner: one PASS/FAIL line per criterion, exit status 0 only if all pass.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "flowids/baselines.hpp"
#include "flowids/cli.hpp"
#include "flowids/error.hpp"
#include "flowids/evaluation.hpp"
#include "flowids/feature_select.hpp"
#include "flowids/flow_ingest.hpp"
#include "flowids/sentence_codec.hpp"
#include "flowids/tfidf.hpp"
#include "flowids/tokenizer.hpp"
#include "flowids/trainer.hpp"
#include "gradcheck.hpp"

using namespace flowids;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [miss]");
  }
};

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

// ---------------------------------------------------------------------------
// 1, 2: metrics

Verdict metric_oracle() {
  Verdict v;
  auto cm = [](std::uint64_t tn, std::uint64_t fp, std::uint64_t fn, std::uint64_t tp) {
    ConfusionMatrix m;
    m.tn = tn, m.fp = fp, m.fn = fn, m.tp = tp;
    return classification_metrics(m);
  };
  const auto a = cm(3418, 3, 4, 13770);
  v.require(std::abs(a.accuracy - 0.9996) <= 5e-5, "acc " + fmt(a.accuracy, 6));
  const auto b = cm(855, 0, 1364, 25808);
  v.require(std::abs(b.accuracy - 0.9513) <= 5e-5, "acc " + fmt(b.accuracy, 6));
  v.require(std::abs(b.binary.recall - 0.9498) <= 5e-5, "recall " + fmt(b.binary.recall, 6));
  const auto c = cm(855, 0, 5138, 22034);
  v.require(std::abs(c.accuracy - 0.8166) <= 1e-4, "acc " + fmt(c.accuracy, 6));
  v.require(std::abs(c.binary.recall - 0.8109) <= 1e-4, "recall " + fmt(c.binary.recall, 6));
  return v;
}

Verdict weighted_recall_identity() {
  Verdict v;
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    ConfusionMatrix m;
    m.tp = rng() % 100000, m.tn = rng() % 100000, m.fp = rng() % 100000, m.fn = rng() % 100000;
    if (m.total() == 0) m.tp = 1;
    const auto r = classification_metrics(m);
    worst = std::max(worst, std::abs(r.weighted.recall - r.accuracy));
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "max |diff| %.3g over 1000", worst);
  v.require(worst <= 1e-12, buf);
  return v;
}

// ---------------------------------------------------------------------------
// 3: gradients

template <typename P>
P jitter_biases(P p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.05, 0.3);
  p.visit([&](const std::string& name, Matrix<double>& m) {
    if (name.ends_with(".bias"))
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = (rng() % 2 ? 1 : -1) * u(rng);
  });
  return p;
}

Verdict gradient_exactness() {
  Verdict v;
  const std::vector<std::string> corpus{"flow duration=12, flow pkts/s=3.5", "bwd iat tot=7, pkt len max=40",
                                        "init bwd win byts=-1, flow iat max=99"};
  const auto vocab = build_vocab(corpus, 60);
  std::vector<TokenSequence> batch;
  std::vector<int> y;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    batch.push_back(encode(corpus[i], vocab, 12, int(i % 2)));
    y.push_back(int(i % 2));
  }
  EncoderConfig cfg;
  cfg.n_layers = 2;
  cfg.hidden_dim = 16;
  cfg.n_heads = 2;
  cfg.ffn_dim = 24;
  cfg.max_positions = 16;
  cfg.vocab_size = vocab.size();
  cfg.init_std = 0.3;
  const MlmOptions mlm{&vocab, 0.3};
  double enc = 0.0;
  for (auto objective : {Objective::Classification, Objective::Mlm}) {
    for (auto act : {Activation::Relu, Activation::Gelu}) {
      cfg.activation = act;
      const auto p = init_params<double>(cfg, 21);
      const auto lg = loss_and_gradients<double>(batch, y, p, objective, Mode::Train, 77, mlm);
      const auto checks = testing::gradient_check(
          p, lg.gradients,
          [&](const EncoderParams<double>& q) {
            return loss_and_gradients<double>(batch, y, q, objective, Mode::Train, 77, mlm).loss;
          },
          1e-6, 1e-7);
      enc = std::max(enc, testing::worst(checks));
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "encoder %.2e", enc);
  v.require(enc < 1e-5, buf);

  std::mt19937_64 rng(8);
  std::normal_distribution<double> n01(0.0, 1.0);
  auto random = [&](Eigen::Index r, Eigen::Index c) {
    Matrix<double> m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n01(rng);
    return m;
  };

  MlpConfig mc;
  mc.input_dim = 4;
  mc.hidden1 = 6;
  mc.hidden2 = 5;
  const auto mp = jitter_biases(init_mlp<double>(mc, 7), 1);
  const auto mx = random(8, 4);
  const std::vector<int> my{1, 0, 1, 1, 0, 0, 1, 0};
  const auto mg = mlp_loss_and_gradients(mp, mx, my, Mode::Train, 3);
  const double mlp = testing::worst(testing::gradient_check(
      mp, mg.gradients, [&](const MlpParams<double>& q) { return mlp_loss_and_gradients(q, mx, my, Mode::Train, 3).loss; },
      1e-5));
  std::snprintf(buf, sizeof buf, "mlp %.2e", mlp);
  v.require(mlp < 1e-5, buf);

  CnnConfig cc;
  cc.input_len = 16;
  cc.kernel = 3;
  cc.filters = 3;
  cc.dense = 4;
  double cnn = 0.0;
  for (bool same : {false, true}) {
    cc.same_padding = same;
    const auto cp = jitter_biases(init_cnn<double>(cc, 4), 2);
    const auto cx = random(3, 16);
    const std::vector<int> cy{1, 0, 1};
    const auto cg = cnn_loss_and_gradients(cp, cx, cy, Mode::Train, 5);
    cnn = std::max(cnn, testing::worst(testing::gradient_check(
                            cp, cg.gradients,
                            [&](const CnnParams<double>& q) { return cnn_loss_and_gradients(q, cx, cy, Mode::Train, 5).loss; },
                            1e-5)));
  }
  std::snprintf(buf, sizeof buf, "cnn %.2e", cnn);
  v.require(cnn < 1e-5, buf);
  return v;
}

// ---------------------------------------------------------------------------
// 4, 5: learning scenarios

std::vector<CombinedSentence> synthetic_corpus(std::size_t normal, std::size_t per_family,
                                               const std::vector<AttackCategory>& families, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.n_normal = normal;
  for (auto c : families) spec.n_attack[c] = per_family;
  spec.seed = seed;
  const auto ds = generate_synthetic_flows(spec);
  ForestConfig fc;
  fc.n_trees = 20;
  fc.max_depth = 12;
  fc.seed = seed;
  const auto report = feature_importances(fit_random_forest(FeatureMatrix::from_dataset(ds), ds.labels(), fc),
                                          ds.schema.features);
  const auto selected = select_top_k(report, 10);
  return combine_flows(dataset_to_sentences(ds, selected));
}

std::vector<TokenSequence> encode_split(const std::vector<CombinedSentence>& s, const Vocabulary& v,
                                        std::size_t max_len) {
  std::vector<TokenSequence> out;
  out.reserve(s.size());
  for (const auto& x : s) out.push_back(encode(x.text, v, max_len, x.label));
  return out;
}

std::vector<std::string> texts(const std::vector<CombinedSentence>& s) {
  std::vector<std::string> out;
  for (const auto& x : s) out.push_back(x.text);
  return out;
}

std::vector<int> labels(const std::vector<CombinedSentence>& s) {
  std::vector<int> out;
  for (const auto& x : s) out.push_back(x.label);
  return out;
}

TrainingArguments desk_arguments(std::size_t steps, std::uint64_t seed) {
  TrainingArguments a;
  a.learning_rate = 1e-3;
  a.batch_size = 32;
  a.warmup_steps = 30;
  a.total_steps = steps;
  a.eval_every = 50;
  a.patience = 3;
  a.seed = seed;
  return a;
}

struct EncoderRun {
  EvalResult test;
  std::size_t steps = 0;
};

EncoderRun train_and_test_encoder(const ScenarioSplit& split, std::size_t steps, std::uint64_t seed) {
  constexpr std::size_t kMaxLen = 128;
  const auto vocab = build_vocab(texts(split.train), 1000);
  const auto train = encode_split(split.train, vocab, kMaxLen);
  const auto val = encode_split(split.validation, vocab, kMaxLen);
  const auto test = encode_split(split.test, vocab, kMaxLen);
  auto cfg = EncoderConfig::desk(vocab.size());
  cfg.max_positions = std::max(cfg.max_positions, kMaxLen);
  const auto fit = fine_tune(init_params<float>(cfg, seed), train, val, desk_arguments(steps, seed));
  return {evaluate_encoder(fit.best, test), fit.steps};
}

double auc_of(const std::vector<double>& scores, const std::vector<CombinedSentence>& s) {
  return roc_curve_and_auc(scores, labels(s)).auc;
}

Verdict known_attack_scenario() {
  Verdict v;
  const std::vector<AttackCategory> families{AttackCategory::DDoS, AttackCategory::DoS,    AttackCategory::Probe,
                                             AttackCategory::BFA,  AttackCategory::Web,    AttackCategory::BOTNET,
                                             AttackCategory::U2R};
  const auto corpus = synthetic_corpus(10000, 2000, families, 11);
  const auto split = build_scenario_split(corpus, Scenario::KnownAttacks, 11);
  v.require(split.train.size() >= 4000 && split.test.size() >= 1000,
            "train " + std::to_string(split.train.size()) + " / test " + std::to_string(split.test.size()));
  bool all_in_train = true;
  for (auto c : families) all_in_train = all_in_train && split.composition[0][static_cast<std::size_t>(c)] > 0;
  v.require(all_in_train, "all families in train");
  const auto run = train_and_test_encoder(split, 300, 11);
  v.require(run.steps >= 300, std::to_string(run.steps) + " steps");
  v.require(run.test.metrics.accuracy >= 0.97, "test acc " + fmt(run.test.metrics.accuracy));
  const double auc = auc_of(run.test.scores, split.test);
  v.require(auc >= 0.99, "auc " + fmt(auc));
  return v;
}

double held_out_recall(const std::vector<int>& predicted, const std::vector<CombinedSentence>& test,
                       const std::vector<AttackCategory>& seen) {
  std::size_t hit = 0, total = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (std::find(seen.begin(), seen.end(), test[i].category()) != seen.end()) continue;
    ++total;
    hit += predicted[i] == 1;
  }
  return total ? static_cast<double>(hit) / static_cast<double>(total) : 0.0;
}

// Detected / total per held-out category, accumulated across calls.
void tally_held_out(const std::vector<int>& predicted, const std::vector<CombinedSentence>& test,
                    const std::vector<AttackCategory>& seen, std::map<AttackCategory, std::pair<std::size_t, std::size_t>>& acc) {
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto c = test[i].category();
    if (std::find(seen.begin(), seen.end(), c) != seen.end()) continue;
    acc[c].first += predicted[i] == 1;
    ++acc[c].second;
  }
}

Verdict unseen_attack_scenario() {
  Verdict v;
  const std::vector<AttackCategory> seen{AttackCategory::Normal, AttackCategory::DDoS, AttackCategory::DoS};
  const std::vector<AttackCategory> families{AttackCategory::DDoS, AttackCategory::DoS, AttackCategory::Probe,
                                             AttackCategory::Web, AttackCategory::U2R};
  constexpr int kSeeds = 5;
  int ordered = 0;
  double worst_recall = 1.0, worst_auc = 1.0;
  std::ostringstream per_seed;
  std::map<AttackCategory, std::pair<std::size_t, std::size_t>> by_family;
  for (int s = 0; s < kSeeds; ++s) {
    const std::uint64_t seed = 100 + static_cast<std::uint64_t>(s);
    const auto corpus = synthetic_corpus(4000, 800, families, seed);
    const auto split = build_scenario_split(corpus, Scenario::UnseenAttacks, seed, seen);

    const auto enc = train_and_test_encoder(split, 200, seed);
    const double enc_recall = held_out_recall(enc.test.predictions, split.test, seen);
    const double enc_auc = auc_of(enc.test.scores, split.test);
    tally_held_out(enc.test.predictions, split.test, seen, by_family);

    const auto tf = fit_tfidf(texts(split.train), 512);
    const auto x = tf.transform_all(texts(split.train));
    const auto xv = tf.transform_all(texts(split.validation));
    const auto xt = tf.transform_all(texts(split.test));
    BaselineTrainOptions opt;
    opt.seed = seed;
    MlpConfig mc;
    mc.input_dim = tf.size();
    const auto mlp = train_mlp(x, labels(split.train), xv, labels(split.validation), mc, opt);
    const double mlp_recall = held_out_recall(threshold_scores(mlp_predict(mlp.best, xt)), split.test, seen);
    CnnConfig cc;
    cc.input_len = tf.size();
    const auto cnn = train_cnn(x, labels(split.train), xv, labels(split.validation), cc, opt);
    const double cnn_recall = held_out_recall(threshold_scores(cnn_predict(cnn.best, xt)), split.test, seen);

    worst_recall = std::min(worst_recall, enc_recall);
    worst_auc = std::min(worst_auc, enc_auc);
    ordered += enc_recall >= mlp_recall && mlp_recall >= cnn_recall;
    per_seed << " [" << fmt(enc_recall, 3) << ">=" << fmt(mlp_recall, 3) << ">=" << fmt(cnn_recall, 3) << "]";
  }
  std::string families_detail;
  for (const auto& [c, hit_total] : by_family)
    families_detail += " " + std::string(category_name(c)) + "=" +
                       fmt(static_cast<double>(hit_total.first) / static_cast<double>(hit_total.second), 3);
  v.require(worst_recall >= 0.90, "min held-out recall " + fmt(worst_recall) + " (encoder by family:" +
                                      families_detail + ")");
  v.require(worst_auc >= 0.97, "min auc " + fmt(worst_auc));
  v.require(2 * ordered > kSeeds,
            "encoder>=mlp>=cnn in " + std::to_string(ordered) + "/" + std::to_string(kSeeds) + per_seed.str());
  return v;
}

// ---------------------------------------------------------------------------
// 6, 7, 8

Verdict codec_fidelity() {
  Verdict v;
  const auto schema = FeatureSchema::synthetic();
  std::string csv;
  for (const auto& f : schema.features) csv += f + ",";
  csv += "Label\n1605449,159.4569494,6295.878431,859760,1603130,10831.95946,3004,92.8089276,27300,64240,Normal\n";
  std::istringstream in(csv);
  const auto ds = load_flow_csv(in, schema, "reference");
  const std::string expected =
      "Flow Duration=1605449, Flow Pkts/s=159.4569494, Flow IAT Mean=6295.878431, Flow IAT Max=859760, "
      "Bwd IAT Tot=1603130, Bwd IAT Mean=10831.95946, Bwd Header Len=3004, Bwd Pkts/s=92.8089276, "
      "Pkt Len Max=27300, Init Bwd Win Byts=64240";
  v.require(flow_to_sentence(ds.records[0], ds.schema, ds.schema.features).text == expected, "reference row");

  std::mt19937_64 rng(6);
  std::vector<std::size_t> sizes{0, 1, 3, 4, 5, 7, 8, 100000, 99999};
  for (int i = 0; i < 20; ++i) sizes.push_back(rng() % 100001);
  bool counts = true, last_label = true;
  for (auto n : sizes) {
    std::vector<FlowSentence> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i].text = "F=" + std::to_string(i);
      s[i].label = static_cast<int>(rng() % 2);
      s[i].category = s[i].label ? AttackCategory::Probe : AttackCategory::Normal;
      s[i].source_index = i;
    }
    const auto c = combine_flows(s);
    counts = counts && c.size() == n / 4;
    for (std::size_t k = 0; k < c.size(); ++k) last_label = last_label && c[k].label == s[4 * k + 3].label;
  }
  v.require(counts, "floor(N/4) outputs for " + std::to_string(sizes.size()) + " sizes up to 1e5");
  v.require(last_label, "last-member labels");
  return v;
}

Verdict forest_sanity() {
  Verdict v;
  int first = 0;
  bool sums = true, constant_zero = true;
  const std::vector<std::string> names{"noise0", "planted", "noise1", "constant", "noise2"};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    FeatureMatrix x;
    x.rows = 200;
    x.cols = 5;
    std::vector<int> y;
    for (std::size_t r = 0; r < x.rows; ++r) {
      const int label = static_cast<int>(rng() % 2);
      y.push_back(label);
      x.data.insert(x.data.end(), {u(rng), label + 0.5 * u(rng), u(rng), 3.0, u(rng)});
    }
    ForestConfig cfg;
    cfg.n_trees = 25;
    cfg.seed = seed;
    const auto rep = feature_importances(fit_random_forest(x, y, cfg), names);
    const double total = std::accumulate(rep.importance.begin(), rep.importance.end(), 0.0);
    sums = sums && std::abs(total - 1.0) <= 1e-9;
    constant_zero = constant_zero && rep.of("constant") == 0.0;
    first += rep.ranking[0] == 1;
  }
  v.require(sums, "sum to 1");
  v.require(first >= 95, "planted first in " + std::to_string(first) + "/100");
  v.require(constant_zero, "constant scores 0");
  return v;
}

Verdict split_fidelity() {
  Verdict v;
  const std::vector<AttackCategory> families{AttackCategory::DDoS, AttackCategory::DoS, AttackCategory::Probe,
                                             AttackCategory::BFA, AttackCategory::Web};
  SyntheticSpec spec;
  spec.n_normal = 8000;
  for (auto c : families) spec.n_attack[c] = 1600;
  spec.seed = 3;
  const auto ds = generate_synthetic_flows(spec);
  const auto corpus = combine_flows(dataset_to_sentences(ds, ds.schema.features));
  const auto n = static_cast<double>(corpus.size());
  const auto s1 = build_scenario_split(corpus, Scenario::KnownAttacks, 3);
  const bool fractions = std::abs(static_cast<double>(s1.train.size()) - 0.68 * n) <= 1.0 &&
                         std::abs(static_cast<double>(s1.validation.size()) - 0.12 * n) <= 1.0 &&
                         std::abs(static_cast<double>(s1.test.size()) - 0.20 * n) <= 1.0;
  const auto f = scenario_fractions(Scenario::KnownAttacks);
  const bool exact = std::abs(static_cast<double>(s1.train.size()) - f.train * n) <= 1.0 &&
                     std::abs(static_cast<double>(s1.validation.size()) - f.validation * n) <= 1.0;
  v.require(fractions && exact, std::to_string(s1.train.size()) + "/" + std::to_string(s1.validation.size()) + "/" +
                                    std::to_string(s1.test.size()) + " of " + std::to_string(corpus.size()));

  const std::vector<AttackCategory> seen{AttackCategory::Normal, AttackCategory::DDoS, AttackCategory::DoS};
  const auto s2 = build_scenario_split(corpus, Scenario::UnseenAttacks, 3, seen);
  std::size_t leaked = 0;
  for (const auto* part : {&s2.train, &s2.validation})
    for (const auto& s : *part)
      for (auto c : s.group_categories) leaked += std::find(seen.begin(), seen.end(), c) == seen.end();
  v.require(leaked == 0, std::to_string(leaked) + " held-out flows in train/validation");
  return v;
}

// ---------------------------------------------------------------------------
// 9: CLI determinism

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Verdict cli_determinism() {
  Verdict v;
  const auto root = fs::temp_directory_path() / "flowids_acceptance_cli";
  fs::remove_all(root);
  fs::create_directories(root);
  const auto conf = (root / "run.conf").string();
  std::ofstream(conf) << "synth.normal = 800\nsynth.per_family = 160\nsynth.families = DDoS,DoS,Probe,Web\n"
                         "forest.n_trees = 20\ntrain.total_steps = 40\ntrain.eval_every = 20\n"
                         "tokenizer.max_len = 64\n";
  auto pipeline = [&](const fs::path& dir) {
    const auto d = [&](const char* n) { return (dir / n).string(); };
    const std::vector<std::vector<std::string>> steps{
        {"synth", "--out", d("synth")},
        {"ingest", "--in", d("synth") + "/flows.csv", "--out", d("ingest")},
        {"select", "--in", d("ingest") + "/clean.csv", "--out", d("select")},
        {"encode", "--in", d("ingest") + "/clean.csv", "--in", d("select") + "/importance.csv", "--out", d("encode")},
        {"split", "--in", d("encode"), "--out", d("split")},
        {"train", "--in", d("split"), "--out", d("model")},
        {"eval", "--in", d("split"), "--in", d("model"), "--out", d("eval")},
        {"train-baseline", "--in", d("split"), "--out", d("mlp")},
        {"eval", "--in", d("split"), "--in", d("mlp"), "--out", d("mlp_eval")},
    };
    for (auto args : steps) {
      args.insert(args.end(), {"--config", conf});
      std::ostringstream out, err;
      if (cli::run(args, out, err) != 0) throw Error(args[0] + " failed: " + err.str());
    }
  };
  try {
    pipeline(root / "a");
    pipeline(root / "b");
  } catch (const std::exception& e) {
    v.require(false, e.what());
    return v;
  }
  std::size_t compared = 0, differing = 0;
  for (const char* f : {"eval/metrics.txt", "eval/metrics.csv", "eval/scores.csv", "model/tensors.bin",
                        "model/config.txt", "model/manifest.txt", "model/vocab.txt", "mlp/tensors.bin",
                        "mlp/config.txt", "mlp_eval/metrics.txt"}) {
    ++compared;
    const auto a = slurp(root / "a" / f);
    differing += a.empty() || a != slurp(root / "b" / f);
  }
  v.require(differing == 0,
            std::to_string(compared - differing) + "/" + std::to_string(compared) + " artifacts identical");
  fs::remove_all(root);
  return v;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0 = no runtime bound
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const std::vector<Criterion> criteria{
      {1, "metric oracle", 1, metric_oracle},
      {2, "weighted recall equals accuracy", 1, weighted_recall_identity},
      {3, "gradient exactness", 120, gradient_exactness},
      {4, "known-attack scenario", 600, known_attack_scenario},
      {5, "unseen-attack scenario", 0, unseen_attack_scenario},
      {6, "codec fidelity", 5, codec_fidelity},
      {7, "forest sanity", 60, forest_sanity},
      {8, "split fidelity", 5, split_fidelity},
      {9, "cli determinism", 0, cli_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (c.budget_s > 0) v.require(secs < c.budget_s, fmt(secs, 2) + "s < " + fmt(c.budget_s, 0) + "s");
    else v.require(true, fmt(secs, 2) + "s");
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << v.detail
              << std::endl;
  }
  std::cout << "optional criterion 10 (real InSDN feature overlap): not run, dataset not bundled" << std::endl;
  return failed ? 1 : 0;
}
