#include "flowids/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "flowids/baselines.hpp"
#include "flowids/checkpoint.hpp"
#include "flowids/csv.hpp"
#include "flowids/error.hpp"
#include "flowids/evaluation.hpp"
#include "flowids/feature_select.hpp"
#include "flowids/flow_ingest.hpp"
#include "flowids/sentence_codec.hpp"
#include "flowids/tfidf.hpp"
#include "flowids/tokenizer.hpp"
#include "flowids/trainer.hpp"

namespace flowids::cli {

namespace fs = std::filesystem;

RunConfig::RunConfig()
    : values_{
          {"seed", "42"},
          {"scenario", "1"},
          {"synth.normal", "2000"},
          {"synth.per_family", "400"},
          {"synth.families", "DDoS,DoS,Probe,BFA,Web,BOTNET,U2R"},
          {"synth.separation", "1"},
          {"forest.n_trees", "100"},
          {"forest.max_depth", "0"},  // 0 = unlimited
          {"forest.min_samples_split", "2"},
          {"forest.features_per_split", "0"},  // 0 = ceil(sqrt(d))
          {"forest.bootstrap", "true"},
          {"forest.threads", "1"},
          {"select.k", "10"},
          {"codec.group_size", "4"},
          {"codec.per_category_grouping", "false"},
          {"split.seen", "Normal,DDoS,DoS"},
          {"tokenizer.vocab_size", "1000"},
          {"tokenizer.max_len", "128"},
          {"encoder.preset", "desk"},
          {"encoder.activation", "relu"},
          {"encoder.dropout", "0.1"},
          {"train.learning_rate", "0.001"},
          {"train.weight_decay", "0.01"},
          {"train.batch_size", "32"},
          {"train.grad_accumulation", "1"},
          {"train.epochs", "5"},
          {"train.eval_every", "50"},
          {"train.early_stopping", "true"},
          {"train.patience", "3"},
          {"train.warmup_steps", "30"},
          {"train.total_steps", "0"},
          {"baseline.model", "mlp"},
          {"baseline.tfidf_features", "512"},
          {"baseline.epochs", "5"},
          {"baseline.batch_size", "128"},
          {"baseline.learning_rate", "0.001"},
          {"baseline.patience", "2"},
          {"baseline.cnn_padding", "valid"},
          {"threshold", "0.5"},
      } {}

RunConfig RunConfig::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("missing config: " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  RunConfig c;
  for (const auto& [k, v] : parse_key_values(os.str())) c.set(k, v);
  return c;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error("unknown config key: " + key);
  it->second = value;
}

const std::string& RunConfig::str(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error("unknown config key: " + key);
  return it->second;
}

std::uint64_t RunConfig::u64(const std::string& key) const {
  const auto& s = str(key);
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw Error("config " + key + ": not a non-negative integer: " + s);
  return v;
}

std::size_t RunConfig::count(const std::string& key) const { return static_cast<std::size_t>(u64(key)); }

double RunConfig::real(const std::string& key) const {
  auto v = parse_finite(str(key));
  if (!v) throw Error("config " + key + ": not a finite number: " + str(key));
  return *v;
}

bool RunConfig::flag(const std::string& key) const {
  const auto& s = str(key);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw Error("config " + key + ": expected true or false: " + s);
}

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = csv::trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<AttackCategory> category_list(const RunConfig& c, const std::string& key) {
  std::vector<AttackCategory> out;
  for (const auto& name : split_list(c.str(key))) {
    auto cat = parse_category(name);
    if (!cat) throw Error("config " + key + ": unknown category " + name);
    out.push_back(*cat);
  }
  return out;
}

ForestConfig forest_config(const RunConfig& c) {
  ForestConfig f;
  f.n_trees = c.count("forest.n_trees");
  if (auto d = c.count("forest.max_depth")) f.max_depth = d;
  f.min_samples_split = c.count("forest.min_samples_split");
  if (auto m = c.count("forest.features_per_split")) f.features_per_split = m;
  f.bootstrap = c.flag("forest.bootstrap");
  f.threads = std::max<std::size_t>(1, c.count("forest.threads"));
  f.seed = c.u64("seed");
  return f;
}

TrainingArguments training_arguments(const RunConfig& c) {
  TrainingArguments a;
  a.learning_rate = c.real("train.learning_rate");
  a.weight_decay = c.real("train.weight_decay");
  a.batch_size = c.count("train.batch_size");
  a.grad_accumulation = c.count("train.grad_accumulation");
  a.epochs = c.count("train.epochs");
  a.eval_every = c.count("train.eval_every");
  a.early_stopping = c.flag("train.early_stopping");
  a.patience = c.count("train.patience");
  a.warmup_steps = c.count("train.warmup_steps");
  a.total_steps = c.count("train.total_steps");
  a.seed = c.u64("seed");
  return a;
}

BaselineTrainOptions baseline_options(const RunConfig& c) {
  BaselineTrainOptions o;
  o.epochs = c.count("baseline.epochs");
  o.batch_size = c.count("baseline.batch_size");
  o.learning_rate = c.real("baseline.learning_rate");
  o.patience = c.count("baseline.patience");
  o.threshold = c.real("threshold");
  o.seed = c.u64("seed");
  return o;
}

EncoderConfig encoder_config(const RunConfig& c, std::size_t vocab_size) {
  const auto& preset = c.str("encoder.preset");
  EncoderConfig e;
  if (preset == "desk") e = EncoderConfig::desk(vocab_size);
  else if (preset == "faithful") e = EncoderConfig::faithful(vocab_size);
  else throw Error("config encoder.preset: expected desk or faithful: " + preset);
  const auto& act = c.str("encoder.activation");
  if (act != "relu" && act != "gelu") throw Error("config encoder.activation: expected relu or gelu: " + act);
  e.activation = act == "relu" ? Activation::Relu : Activation::Gelu;
  e.dropout_rate = c.real("encoder.dropout");
  e.max_positions = std::max(e.max_positions, c.count("tokenizer.max_len"));
  e.validate();
  return e;
}

}  // namespace

void RunConfig::validate() const {
  u64("seed");
  const auto sc = count("scenario");
  if (sc != 1 && sc != 2) throw Error("config scenario: expected 1 or 2");
  count("synth.normal");
  count("synth.per_family");
  category_list(*this, "synth.families");
  const double sep = real("synth.separation");
  if (!(sep > 0.0 && sep <= 1.0)) throw Error("config synth.separation: expected (0, 1]");
  const auto f = forest_config(*this);
  if (f.n_trees == 0) throw Error("config forest.n_trees: must be at least 1");
  if (f.min_samples_split < 2) throw Error("config forest.min_samples_split: must be at least 2");
  if (count("select.k") == 0) throw Error("config select.k: must be positive");
  if (count("codec.group_size") == 0) throw Error("config codec.group_size: must be positive");
  flag("codec.per_category_grouping");
  if (category_list(*this, "split.seen").empty()) throw Error("config split.seen: empty");
  if (count("tokenizer.max_len") < 2) throw Error("config tokenizer.max_len: must be at least 2");
  count("tokenizer.vocab_size");
  encoder_config(*this, 16);
  training_arguments(*this).validate();
  const auto& model = str("baseline.model");
  if (model != "mlp" && model != "cnn") throw Error("config baseline.model: expected mlp or cnn");
  if (count("baseline.tfidf_features") == 0) throw Error("config baseline.tfidf_features: must be positive");
  const auto& pad = str("baseline.cnn_padding");
  if (pad != "valid" && pad != "same") throw Error("config baseline.cnn_padding: expected valid or same");
  const auto o = baseline_options(*this);
  if (!o.epochs || !o.batch_size || !o.patience || !(o.learning_rate > 0.0))
    throw Error("config baseline.*: epochs, batch_size, patience and learning_rate must be positive");
  if (!(o.threshold > 0.0 && o.threshold < 1.0)) throw Error("config threshold: expected (0, 1)");
}

std::string RunConfig::canonical() const {
  std::string s;
  for (const auto& [k, v] : values_) s += k + "=" + v + "\n";
  return s;
}

std::uint64_t RunConfig::hash() const { return fnv1a(canonical()); }

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) {
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("missing input: " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

std::uint64_t hash_path(const fs::path& p) {
  if (!fs::exists(p)) throw Error("missing input: " + p.string());
  if (!fs::is_directory(p)) return fnv1a(slurp(p));
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(p))
    if (e.is_regular_file() && e.path().filename() != "run.log") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& f : files) {
    h = fnv1a(fs::relative(f, p).generic_string(), h);
    h = fnv1a(slurp(f), h);
  }
  return h;
}

namespace {

struct Invocation {
  std::string command;
  RunConfig config;
  std::vector<fs::path> inputs;
  fs::path out;
  std::ostream* log = nullptr;

  const fs::path& input(std::size_t i, const char* what) const {
    if (i >= inputs.size()) throw Error(command + " needs --in " + what);
    if (!fs::exists(inputs[i])) throw Error("missing input: " + inputs[i].string());
    return inputs[i];
  }
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

// One line per invocation, appended to <out>/run.log; provenance.txt records
// the producing config for the artifacts in <out>.
void record(const Invocation& inv) {
  std::string line = inv.command + " config=" + hex64(inv.config.hash());
  for (const auto& in : inv.inputs) line += " in=" + in.generic_string() + ":" + hex64(hash_path(in));
  std::ofstream log(inv.out / "run.log", std::ios::binary | std::ios::app);
  if (!log) throw Error("cannot write " + (inv.out / "run.log").string());
  log << line << '\n';
  write_text(inv.out / "provenance.txt", "command = " + inv.command + "\nconfig_hash = " +
                                             hex64(inv.config.hash()) + "\n");
}

void cmd_synth(Invocation& inv) {
  const auto& c = inv.config;
  SyntheticSpec spec;
  spec.n_normal = c.count("synth.normal");
  for (auto cat : category_list(c, "synth.families")) {
    if (cat == AttackCategory::Normal) throw Error("config synth.families: Normal is not an attack family");
    spec.n_attack[cat] = c.count("synth.per_family");
  }
  spec.seed = c.u64("seed");
  spec.separation = c.real("synth.separation");
  const auto ds = generate_synthetic_flows(spec);
  write_flow_csv(inv.out / "flows.csv", ds);
  *inv.log << "synth: " << ds.size() << " flows -> " << (inv.out / "flows.csv").string() << '\n';
}

void cmd_ingest(Invocation& inv) {
  const auto& src = inv.input(0, "<flows.csv>");
  FeatureSchema schema;
  schema.features.clear();  // infer from the header
  auto ds = load_flow_csv(src, schema);
  ds = binarize_labels(std::move(ds));
  write_flow_csv(inv.out / "clean.csv", ds);
  write_text(inv.out / "rejections.txt", rejection_report(ds));
  *inv.log << "ingest: " << ds.size() << " rows kept, " << ds.rejections.size() << " rejected\n";
}

void cmd_select(Invocation& inv) {
  const auto ds = load_flow_csv(inv.input(0, "<clean.csv>"), FeatureSchema{{}, FeatureSchema::default_socket_features(), "Label"});
  const auto x = FeatureMatrix::from_dataset(ds);
  const auto y = ds.labels();
  const auto forest = fit_random_forest(x, y, forest_config(inv.config));
  const auto report = feature_importances(forest, ds.schema.features);
  write_importance_csv(inv.out / "importance.csv", report);
  const auto top = select_top_k(report, inv.config.count("select.k"));
  std::string text;
  for (const auto& f : top) text += f + "\n";
  write_text(inv.out / "selected.txt", text);
  *inv.log << "select: kept " << top.size() << " of " << report.features.size() << " features\n";
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::vector<std::string> out;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    line = csv::trim(line);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

void cmd_encode(Invocation& inv) {
  const auto ds = load_flow_csv(inv.input(0, "<clean.csv>"), FeatureSchema{{}, FeatureSchema::default_socket_features(), "Label"});
  std::vector<std::string> features = ds.schema.features;
  if (inv.inputs.size() > 1) {
    const auto& sel = inv.input(1, "<selected.txt|importance.csv>");
    if (sel.extension() == ".csv") {
      features = select_top_k(read_importance_csv(sel), inv.config.count("select.k"));
      // Keep the dataset's column order.
      std::vector<std::string> ordered;
      for (const auto& f : ds.schema.features)
        if (std::find(features.begin(), features.end(), f) != features.end()) ordered.push_back(f);
      features = ordered;
    } else {
      features = read_lines(sel);
    }
  }
  const auto sentences = dataset_to_sentences(ds, features);
  CombineOptions opts;
  opts.group_size = inv.config.count("codec.group_size");
  opts.per_category_grouping = inv.config.flag("codec.per_category_grouping");
  const auto combined = combine_flows(sentences, opts);
  write_sentence_csv(inv.out / "sentences.csv", combined);
  write_group_sidecar(inv.out / "groups.csv", combined);
  *inv.log << "encode: " << sentences.size() << " flows -> " << combined.size() << " combined sentences\n";
}

std::vector<CombinedSentence> load_split(const fs::path& dir, const std::string& part) {
  return read_combined(dir / (part + ".csv"), dir / (part + "_groups.csv"));
}

void cmd_split(Invocation& inv) {
  const auto& src = inv.input(0, "<encode dir>");
  const auto sentences = read_combined(src / "sentences.csv", src / "groups.csv");
  const auto scenario = inv.config.count("scenario") == 1 ? Scenario::KnownAttacks : Scenario::UnseenAttacks;
  const auto split = build_scenario_split(sentences, scenario, inv.config.u64("seed"), category_list(inv.config, "split.seen"));
  for (const auto& [name, part] : {std::pair<std::string, const std::vector<CombinedSentence>*>{"train", &split.train},
                                   {"validation", &split.validation},
                                   {"test", &split.test}}) {
    write_sentence_csv(inv.out / (name + ".csv"), *part);
    write_group_sidecar(inv.out / (name + "_groups.csv"), *part);
  }
  write_text(inv.out / "composition.txt", split.composition_report());
  *inv.log << "split: train " << split.train.size() << ", validation " << split.validation.size() << ", test "
           << split.test.size() << '\n';
}

std::vector<TokenSequence> encode_all(std::span<const CombinedSentence> s, const Vocabulary& vocab, std::size_t max_len) {
  std::vector<TokenSequence> out;
  out.reserve(s.size());
  for (const auto& x : s) out.push_back(encode(x.text, vocab, max_len, x.label));
  return out;
}

std::vector<std::string> texts_of(std::span<const CombinedSentence> s) {
  std::vector<std::string> out;
  for (const auto& x : s) out.push_back(x.text);
  return out;
}

std::vector<int> labels_of(std::span<const CombinedSentence> s) {
  std::vector<int> out;
  for (const auto& x : s) out.push_back(x.label);
  return out;
}

void cmd_train(Invocation& inv) {
  const auto& dir = inv.input(0, "<split dir>");
  const auto train = load_split(dir, "train");
  const auto val = load_split(dir, "validation");
  const auto& c = inv.config;
  const auto texts = texts_of(train);
  const auto vocab = build_vocab(texts, c.count("tokenizer.vocab_size"));
  const auto max_len = c.count("tokenizer.max_len");
  const auto train_seq = encode_all(train, vocab, max_len);
  const auto val_seq = encode_all(val, vocab, max_len);

  const auto cfg = encoder_config(c, vocab.size());
  const auto init = init_params<float>(cfg, c.u64("seed"));
  auto& log = *inv.log;
  const auto result = fine_tune(init, train_seq, val_seq, training_arguments(c), [&](const TrainLogRow& r) {
    log << "step " << r.step << " train_loss " << r.train_loss << " val_loss " << r.val_loss << " accuracy "
        << r.accuracy << '\n';
  });
  if (result.status == TrainStatus::Diverged) throw Error("training diverged: " + result.diagnostic);

  auto ckpt = encoder_checkpoint(result.best);
  ckpt.settings.insert(ckpt.settings.begin(), {"model", "encoder"});
  ckpt.set("tokenizer.max_len", std::to_string(max_len));
  ckpt.set("vocab.hash", hex64(vocab.fingerprint()));
  ckpt.set("config.hash", hex64(c.hash()));
  save_checkpoint(inv.out, ckpt);
  vocab.save(inv.out / "vocab.txt");
  write_text(inv.out / "train_log.csv", result.log.csv());
  log << "train: " << result.steps << " steps, best val_loss " << result.best_val_loss
      << (result.status == TrainStatus::EarlyStopped ? " (early stop)" : "") << '\n';
}

void cmd_train_baseline(Invocation& inv) {
  const auto& dir = inv.input(0, "<split dir>");
  const auto train = load_split(dir, "train");
  const auto val = load_split(dir, "validation");
  const auto& c = inv.config;
  const auto tfidf = fit_tfidf(texts_of(train), c.count("baseline.tfidf_features"));
  const auto x = tfidf.transform_all(texts_of(train));
  const auto xv = tfidf.transform_all(texts_of(val));
  const auto y = labels_of(train), yv = labels_of(val);
  const auto opts = baseline_options(c);
  auto& log = *inv.log;
  auto on_epoch = [&](const BaselineEpoch& e) {
    log << "epoch " << e.epoch << " train_loss " << e.train_loss << " val_loss " << e.val_loss << " val_accuracy "
        << e.val_accuracy << '\n';
  };
  Checkpoint ckpt;
  if (c.str("baseline.model") == "mlp") {
    MlpConfig mc;
    mc.input_dim = tfidf.size();
    ckpt = mlp_checkpoint(train_mlp(x, y, xv, yv, mc, opts, on_epoch).best);
  } else {
    CnnConfig cc;
    cc.input_len = tfidf.size();
    cc.same_padding = c.str("baseline.cnn_padding") == "same";
    ckpt = cnn_checkpoint(train_cnn(x, y, xv, yv, cc, opts, on_epoch).best);
  }
  fs::create_directories(inv.out);
  tfidf.save(inv.out / "tfidf.txt");
  ckpt.set("tfidf.hash", hex64(hash_path(inv.out / "tfidf.txt")));
  ckpt.set("config.hash", hex64(c.hash()));
  save_checkpoint(inv.out, ckpt);
  log << "train-baseline: " << c.str("baseline.model") << " saved\n";
}

void cmd_eval(Invocation& inv) {
  const auto& dir = inv.input(0, "<split dir>");
  if (inv.inputs.size() < 2) throw Error("eval needs --in <split dir> --in <checkpoint dir>");
  const auto& ckdir = inv.inputs[1];
  const auto ckpt = load_checkpoint(ckdir);
  const auto test = load_split(dir, "test");
  if (test.empty()) throw Error("test split is empty");
  const auto model = ckpt.setting("model").value_or("encoder");
  const double threshold = inv.config.real("threshold");

  std::vector<double> scores;
  if (model == "encoder") {
    const auto vocab = Vocabulary::load(ckdir / "vocab.txt");
    const auto want = ckpt.setting("vocab.hash");
    if (!want || *want != hex64(vocab.fingerprint()))
      throw Error("vocabulary hash mismatch: checkpoint and vocab.txt disagree");
    const auto max_len = std::stoull(ckpt.setting("tokenizer.max_len").value_or("0"));
    const auto params = encoder_from_checkpoint(ckpt);
    scores = evaluate_encoder(params, encode_all(test, vocab, max_len)).scores;
  } else if (model == "mlp" || model == "cnn") {
    const auto want = ckpt.setting("tfidf.hash");
    if (!want || *want != hex64(hash_path(ckdir / "tfidf.txt")))
      throw Error("tf-idf hash mismatch: checkpoint and tfidf.txt disagree");
    const auto x = TfidfModel::load(ckdir / "tfidf.txt").transform_all(texts_of(test));
    scores = model == "mlp" ? mlp_predict(mlp_from_checkpoint(ckpt), x) : cnn_predict(cnn_from_checkpoint(ckpt), x);
  } else {
    throw Error("unknown model in checkpoint: " + model);
  }

  const auto labels = labels_of(test);
  const auto pred = threshold_scores(scores, threshold);
  const auto report = classification_metrics(confusion_matrix(pred, labels));
  std::ostringstream text;
  text << metrics_text(report, model + " on " + std::to_string(test.size()) + " test sentences");
  text << "detection rate by category (last member):\n";
  std::array<std::size_t, kCategoryCount> n{}, flagged{};
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto k = static_cast<std::size_t>(test[i].category());
    ++n[k];
    flagged[k] += static_cast<std::size_t>(pred[i]);
  }
  text << std::setprecision(6) << std::fixed;
  for (auto cat : all_categories()) {
    const auto k = static_cast<std::size_t>(cat);
    if (!n[k]) continue;
    text << "  " << category_name(cat) << ' ' << flagged[k] << '/' << n[k] << ' '
         << static_cast<double>(flagged[k]) / static_cast<double>(n[k]) << '\n';
  }
  write_text(inv.out / "metrics.txt", text.str());
  write_text(inv.out / "metrics.csv", metrics_csv(report));

  std::ostringstream sc;
  sc << std::setprecision(9) << "score,label,category\n";
  for (std::size_t i = 0; i < test.size(); ++i)
    sc << scores[i] << ',' << labels[i] << ',' << category_name(test[i].category()) << '\n';
  write_text(inv.out / "scores.csv", sc.str());
  *inv.log << text.str();
}

void cmd_roc(Invocation& inv) {
  auto src = inv.input(0, "<eval dir|scores.csv>");
  if (fs::is_directory(src)) src /= "scores.csv";
  std::istringstream in(slurp(src));
  csv::Row row;
  std::vector<double> scores;
  std::vector<int> labels;
  bool header = true;
  while (csv::read_row(in, row)) {
    if (header) {
      header = false;
      continue;
    }
    if (row.size() < 2) throw Error("malformed scores row");
    auto s = parse_finite(row[0]);
    if (!s || (row[1] != "0" && row[1] != "1")) throw Error("malformed scores row: " + row[0] + "," + row[1]);
    scores.push_back(*s);
    labels.push_back(row[1] == "1");
  }
  const auto roc = roc_curve_and_auc(scores, labels);
  write_text(inv.out / "roc.csv", roc_csv(roc));
  *inv.log << "roc: auc " << std::setprecision(9) << roc.auc << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Flow-sentence intrusion detection pipeline", "flowids"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::vector<std::string> inputs;
  std::uint64_t seed = 0;
  int scenario = 1;
  std::vector<std::pair<CLI::App*, void (*)(Invocation&)>> commands;
  std::vector<std::pair<CLI::Option*, CLI::Option*>> overrides;
  const std::pair<const char*, const char*> names[] = {
      {"synth", "generate a synthetic labeled flow CSV"},
      {"ingest", "validate and clean a flow CSV"},
      {"select", "rank features with a random forest"},
      {"encode", "serialize flows to combined sentences"},
      {"split", "build a scenario split"},
      {"train", "fine-tune the encoder classifier"},
      {"train-baseline", "train the TF-IDF MLP or CNN baseline"},
      {"eval", "score a checkpoint on the test split"},
      {"roc", "ROC curve and AUC from eval scores"},
  };
  void (*handlers[])(Invocation&) = {cmd_synth, cmd_ingest, cmd_select, cmd_encode, cmd_split,
                                     cmd_train, cmd_train_baseline, cmd_eval, cmd_roc};
  for (std::size_t i = 0; i < std::size(names); ++i) {
    auto* sub = app.add_subcommand(names[i].first, names[i].second);
    sub->add_option("--config", config_path, "key = value run configuration");
    sub->add_option("--in", inputs, "input artifacts");
    sub->add_option("--out", out_dir, "output directory")->required();
    auto* s = sub->add_option("--seed", seed, "overrides the config seed");
    auto* sc = sub->add_option("--scenario", scenario, "1 = known attacks, 2 = unseen attacks")
                   ->check(CLI::IsMember({1, 2}));
    commands.emplace_back(sub, handlers[i]);
    overrides.emplace_back(s, sc);
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    Invocation inv;
    for (std::size_t i = 0; i < commands.size(); ++i) {
      if (!commands[i].first->parsed()) continue;
      inv.command = commands[i].first->get_name();
      if (!config_path.empty()) inv.config = RunConfig::load(config_path);
      if (overrides[i].first->count()) inv.config.set("seed", std::to_string(seed));
      if (overrides[i].second->count()) inv.config.set("scenario", std::to_string(scenario));
      inv.config.validate();
      for (const auto& p : inputs) inv.inputs.emplace_back(p);
      inv.out = out_dir;
      inv.log = &out;
      fs::create_directories(inv.out);
      commands[i].second(inv);
      record(inv);
    }
    return 0;
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: " << msg << '\n';
    return 1;
  }
}

}  // namespace flowids::cli
