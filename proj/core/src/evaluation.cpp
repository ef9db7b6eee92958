#include "flowids/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "flowids/error.hpp"

namespace flowids {

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  tp += o.tp;
  tn += o.tn;
  fp += o.fp;
  fn += o.fn;
  return *this;
}

ConfusionMatrix confusion_matrix(std::span<const int> predicted, std::span<const int> actual) {
  if (predicted.size() != actual.size())
    throw Error("length mismatch: " + std::to_string(predicted.size()) + " predictions vs " +
                std::to_string(actual.size()) + " labels");
  if (predicted.empty()) throw Error("confusion matrix of an empty set");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if ((predicted[i] | actual[i]) & ~1)
      throw Error("labels must be 0 or 1 (row " + std::to_string(i) + ")");
    const bool p = predicted[i] != 0;
    const bool a = actual[i] != 0;
    if (p && a) ++cm.tp;
    else if (!p && !a) ++cm.tn;
    else if (p) ++cm.fp;
    else ++cm.fn;
  }
  return cm;
}

namespace {

double ratio(double num, double den, bool& flag) {
  if (den == 0.0) {
    flag = true;
    return 0.0;
  }
  return num / den;
}

ClassScores class_scores(double tp, double fp, double fn) {
  ClassScores s;
  s.precision = ratio(tp, tp + fp, s.zero_division);
  s.recall = ratio(tp, tp + fn, s.zero_division);
  s.f1 = ratio(2.0 * s.precision * s.recall, s.precision + s.recall, s.zero_division);
  s.support = static_cast<std::uint64_t>(tp + fn);
  return s;
}

}  // namespace

MetricsReport classification_metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw Error("metrics of an empty confusion matrix");
  const double tp = static_cast<double>(cm.tp), tn = static_cast<double>(cm.tn);
  const double fp = static_cast<double>(cm.fp), fn = static_cast<double>(cm.fn);
  const double total = static_cast<double>(cm.total());

  MetricsReport m;
  m.matrix = cm;
  m.accuracy = (tp + tn) / total;
  m.binary = class_scores(tp, fp, fn);
  m.per_class[1] = m.binary;
  m.per_class[0] = class_scores(tn, fn, fp);

  for (const auto& c : m.per_class) {
    const double w = static_cast<double>(c.support) / total;
    m.weighted.precision += w * c.precision;
    m.weighted.recall += w * c.recall;
    m.weighted.f1 += w * c.f1;
    m.weighted.zero_division = m.weighted.zero_division || c.zero_division;
  }
  m.weighted.support = cm.total();
  return m;
}

RocCurve roc_curve_and_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw Error("length mismatch between scores and labels");
  std::size_t pos = 0;
  for (int y : labels) pos += y ? 1 : 0;
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) throw Error("single-class labels: ROC needs both classes");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return scores[a] > scores[b]; });

  RocCurve roc;
  roc.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double thr = scores[order[i]];
    while (i < order.size() && scores[order[i]] == thr) {
      (labels[order[i]] ? tp : fp) += 1;
      ++i;
    }
    roc.points.push_back({thr, static_cast<double>(fp) / static_cast<double>(neg),
                          static_cast<double>(tp) / static_cast<double>(pos)});
  }
  for (std::size_t i = 1; i < roc.points.size(); ++i) {
    const auto& a = roc.points[i - 1];
    const auto& b = roc.points[i];
    roc.auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  return roc;
}

double auc_by_pairs(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw Error("length mismatch between scores and labels");
  double concordant = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      ++pairs;
      if (scores[i] > scores[j]) concordant += 1.0;
      else if (scores[i] == scores[j]) concordant += 0.5;
    }
  }
  if (pairs == 0) throw Error("single-class labels: AUC needs both classes");
  return concordant / static_cast<double>(pairs);
}

std::string metrics_text(const MetricsReport& m, const std::string& title) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6);
  if (!title.empty()) os << title << '\n';
  os << "confusion matrix (positive = attack)\n";
  os << "  TN=" << m.matrix.tn << " FP=" << m.matrix.fp << '\n';
  os << "  FN=" << m.matrix.fn << " TP=" << m.matrix.tp << '\n';
  os << "accuracy  " << m.accuracy << '\n';
  os << "binary    precision=" << m.binary.precision << " recall=" << m.binary.recall
     << " f1=" << m.binary.f1 << (m.binary.zero_division ? " (zero division)" : "") << '\n';
  os << "weighted  precision=" << m.weighted.precision << " recall=" << m.weighted.recall
     << " f1=" << m.weighted.f1 << (m.weighted.zero_division ? " (zero division)" : "") << '\n';
  return os.str();
}

std::string metrics_csv(const MetricsReport& m) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "tp,tn,fp,fn,accuracy,precision,recall,f1,weighted_precision,weighted_recall,"
        "weighted_f1,zero_division\n";
  os << m.matrix.tp << ',' << m.matrix.tn << ',' << m.matrix.fp << ',' << m.matrix.fn << ','
     << m.accuracy << ',' << m.binary.precision << ',' << m.binary.recall << ',' << m.binary.f1
     << ',' << m.weighted.precision << ',' << m.weighted.recall << ',' << m.weighted.f1 << ','
     << (m.binary.zero_division || m.weighted.zero_division ? 1 : 0) << '\n';
  return os.str();
}

std::string roc_csv(const RocCurve& roc) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "threshold,fpr,tpr\n";
  for (const auto& p : roc.points) {
    if (std::isinf(p.threshold)) os << "inf";
    else os << p.threshold;
    os << ',' << p.fpr << ',' << p.tpr << '\n';
  }
  os << "auc," << roc.auc << '\n';
  return os.str();
}

SplitFractions scenario_fractions(Scenario s) {
  if (s == Scenario::KnownAttacks) return {58461.0 / 85973.0, 10317.0 / 85973.0};
  return {14626.0 / 17106.0, 1625.0 / 17106.0};
}

namespace {

// Places `count` items of each stratum at evenly spaced fractional positions
// (after a seeded shuffle), merges all strata by position and cuts the merged
// order at the global targets. Totals are exact; each stratum lands within
// one item of its proportional share.
void apportion(const std::vector<std::vector<std::size_t>>& strata, std::size_t total,
               const SplitFractions& f, std::mt19937_64& rng, std::vector<std::size_t>& train,
               std::vector<std::size_t>& validation, std::vector<std::size_t>& test) {
  const auto n = static_cast<double>(total);
  const auto n_train = static_cast<std::size_t>(std::llround(n * f.train));
  const auto n_val = std::min(total - n_train, static_cast<std::size_t>(std::llround(n * f.validation)));

  struct Slot {
    double key;
    std::size_t stratum;
    std::size_t item;
  };
  std::vector<Slot> slots;
  slots.reserve(total);
  for (std::size_t s = 0; s < strata.size(); ++s) {
    auto items = strata[s];
    std::shuffle(items.begin(), items.end(), rng);
    const auto m = static_cast<double>(items.size());
    for (std::size_t j = 0; j < items.size(); ++j) {
      slots.push_back({(static_cast<double>(j) + 0.5) / m, s, items[j]});
    }
  }
  std::stable_sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) {
    return a.key < b.key || (a.key == b.key && a.stratum < b.stratum);
  });
  for (std::size_t i = 0; i < slots.size(); ++i) {
    auto& dst = i < n_train ? train : (i < n_train + n_val ? validation : test);
    dst.push_back(slots[i].item);
  }
}

}  // namespace

ScenarioSplit build_scenario_split(std::span<const CombinedSentence> sentences, Scenario scenario,
                                   std::uint64_t seed, const std::vector<AttackCategory>& seen) {
  if (sentences.empty()) throw Error("cannot split an empty corpus");
  std::array<std::vector<std::size_t>, kCategoryCount> by_category;
  std::vector<std::size_t> unseen_items;
  auto is_seen = [&](AttackCategory c) { return std::find(seen.begin(), seen.end(), c) != seen.end(); };

  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const auto& s = sentences[i];
    if (s.group_categories.empty()) throw Error("sentence without category metadata");
    if (scenario == Scenario::UnseenAttacks &&
        !std::all_of(s.group_categories.begin(), s.group_categories.end(), is_seen)) {
      unseen_items.push_back(i);
      continue;
    }
    by_category[static_cast<std::size_t>(s.category())].push_back(i);
  }

  if (scenario == Scenario::KnownAttacks) {
    std::size_t normal = by_category[0].size();
    if (normal == 0) throw Error("required category absent: Normal");
    if (normal == sentences.size()) throw Error("required category absent: no attack category present");
  } else {
    for (auto c : seen) {
      if (by_category[static_cast<std::size_t>(c)].empty())
        throw Error("required category absent: " + std::string(category_name(c)));
    }
    if (unseen_items.empty()) throw Error("required category absent: no held-out attack category present");
  }

  std::vector<std::vector<std::size_t>> strata;
  std::size_t pooled = 0;
  for (const auto& items : by_category) {
    if (items.empty()) continue;
    strata.push_back(items);
    pooled += items.size();
  }

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> tr, va, te;
  apportion(strata, pooled, scenario_fractions(scenario), rng, tr, va, te);
  te.insert(te.end(), unseen_items.begin(), unseen_items.end());
  for (auto* v : {&tr, &va, &te}) std::sort(v->begin(), v->end());

  ScenarioSplit split;
  split.scenario = scenario;
  auto fill = [&](const std::vector<std::size_t>& idx, std::vector<CombinedSentence>& dst,
                  std::size_t which) {
    dst.reserve(idx.size());
    for (auto i : idx) {
      dst.push_back(sentences[i]);
      ++split.composition[which][static_cast<std::size_t>(sentences[i].category())];
    }
  };
  fill(tr, split.train, 0);
  fill(va, split.validation, 1);
  fill(te, split.test, 2);
  return split;
}

std::string ScenarioSplit::composition_report() const {
  static const char* names[3] = {"train", "validation", "test"};
  std::ostringstream os;
  os << "scenario " << static_cast<int>(scenario) << '\n';
  os << "split";
  for (auto c : all_categories()) os << ',' << category_name(c);
  os << ",total\n";
  for (std::size_t s = 0; s < 3; ++s) {
    os << names[s];
    std::size_t total = 0;
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
      os << ',' << composition[s][c];
      total += composition[s][c];
    }
    os << ',' << total << '\n';
  }
  return os.str();
}

}  // namespace flowids
