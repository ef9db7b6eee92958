#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "flowids/error.hpp"
#include "flowids/evaluation.hpp"

using namespace flowids;

namespace {

ConfusionMatrix cm(std::uint64_t tn, std::uint64_t fp, std::uint64_t fn, std::uint64_t tp) {
  ConfusionMatrix m;
  m.tn = tn;
  m.fp = fp;
  m.fn = fn;
  m.tp = tp;
  return m;
}

std::vector<CombinedSentence> blocks(const std::vector<std::pair<AttackCategory, std::size_t>>& spec) {
  std::vector<CombinedSentence> out;
  std::size_t idx = 0;
  for (const auto& [c, n] : spec) {
    for (std::size_t i = 0; i < n; ++i, ++idx) {
      CombinedSentence s;
      s.text = "s" + std::to_string(idx);
      s.label = c == AttackCategory::Normal ? 0 : 1;
      s.member_indices = {idx};
      s.group_categories = {c};
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("confusion matrix counts") {
  const int pred[] = {1, 1, 0, 0, 1};
  const int act[] = {1, 0, 0, 1, 1};
  const auto m = confusion_matrix(pred, act);
  CHECK(m == cm(1, 1, 1, 2));
  const int short_pred[] = {1};
  CHECK_THROWS_AS(confusion_matrix(short_pred, act), Error);
  const int bad[] = {2, 0, 0, 0, 0};
  CHECK_THROWS_AS(confusion_matrix(bad, act), Error);
}

TEST_CASE("reported matrices reproduce the reported figures") {
  const auto a = classification_metrics(cm(3418, 3, 4, 13770));
  CHECK(std::abs(a.accuracy - 0.9996) < 5e-5);
  const auto b = classification_metrics(cm(855, 0, 1364, 25808));
  CHECK(std::abs(b.accuracy - 0.9513) < 5e-5);
  CHECK(std::abs(b.binary.recall - 0.9498) < 5e-5);
  const auto c = classification_metrics(cm(855, 0, 5138, 22034));
  CHECK(std::abs(c.accuracy - 0.8166) < 1e-4);
  CHECK(std::abs(c.binary.recall - 0.8109) < 1e-4);
}

TEST_CASE("metrics match direct formulas") {
  const auto m = cm(50, 10, 5, 35);
  const auto r = classification_metrics(m);
  CHECK(r.accuracy == doctest::Approx(85.0 / 100.0).epsilon(1e-15));
  CHECK(r.binary.precision == doctest::Approx(35.0 / 45.0).epsilon(1e-15));
  CHECK(r.binary.recall == doctest::Approx(35.0 / 40.0).epsilon(1e-15));
  const double p = 35.0 / 45.0, q = 35.0 / 40.0;
  CHECK(r.binary.f1 == doctest::Approx(2 * p * q / (p + q)).epsilon(1e-14));
  CHECK(r.per_class[0].recall == doctest::Approx(50.0 / 60.0).epsilon(1e-15));
  CHECK(r.per_class[0].support == 60);
  CHECK(r.per_class[1].support == 40);
}

TEST_CASE("weighted recall equals accuracy") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    const auto m = cm(rng() % 1000, rng() % 1000, rng() % 1000, rng() % 1000 + 1);
    const auto r = classification_metrics(m);
    CHECK(std::abs(r.weighted.recall - r.accuracy) < 1e-12);
  }
}

TEST_CASE("zero denominators report 0 and flag") {
  const auto r = classification_metrics(cm(10, 0, 0, 0));
  CHECK(r.binary.precision == 0.0);
  CHECK(r.binary.recall == 0.0);
  CHECK(r.binary.zero_division);
  CHECK(r.accuracy == 1.0);
  CHECK_THROWS_AS(classification_metrics(ConfusionMatrix{}), Error);
}

TEST_CASE("roc and auc on small cases") {
  {
    const double s[] = {0.1, 0.4, 0.35, 0.8};
    const int y[] = {0, 0, 1, 1};
    const auto roc = roc_curve_and_auc(s, y);
    CHECK(roc.auc == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(roc.points.front().fpr == 0.0);
    CHECK(roc.points.front().tpr == 0.0);
    CHECK(roc.points.back().fpr == 1.0);
    CHECK(roc.points.back().tpr == 1.0);
  }
  {
    const double s[] = {0.1, 0.2, 0.8, 0.9};
    const int y[] = {0, 0, 1, 1};
    CHECK(roc_curve_and_auc(s, y).auc == 1.0);
  }
  {
    const double s[] = {0.5, 0.5, 0.5, 0.5};
    const int y[] = {0, 1, 0, 1};
    const auto roc = roc_curve_and_auc(s, y);
    CHECK(roc.auc == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(roc.points.size() == 2);
  }
  const double s[] = {0.1, 0.2};
  const int y[] = {1, 1};
  CHECK_THROWS_AS(roc_curve_and_auc(s, y), Error);
}

TEST_CASE("trapezoidal auc equals pairwise probability") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + rng() % 200;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(rng() % 2);
      s[i] = static_cast<double>(rng() % 20) / 20.0;  // many ties
    }
    y[0] = 0;
    y[1] = 1;
    const auto roc = roc_curve_and_auc(s, y);
    CHECK(roc.auc == doctest::Approx(auc_by_pairs(s, y)).epsilon(1e-12));
    for (std::size_t i = 1; i < roc.points.size(); ++i) {
      CHECK(roc.points[i].fpr >= roc.points[i - 1].fpr);
      CHECK(roc.points[i].tpr >= roc.points[i - 1].tpr);
    }
  }
}

TEST_CASE("roc csv ends with the auc") {
  const double s[] = {0.1, 0.9};
  const int y[] = {0, 1};
  const auto text = roc_csv(roc_curve_and_auc(s, y));
  CHECK(text.rfind("threshold,fpr,tpr\n", 0) == 0);
  CHECK(text.find("auc,1") != std::string::npos);
}

TEST_CASE("scenario 1 split fractions") {
  const auto f = scenario_fractions(Scenario::KnownAttacks);
  CHECK(f.train == doctest::Approx(0.68).epsilon(0.01));
  CHECK(f.validation == doctest::Approx(0.12).epsilon(0.01));
  const auto data = blocks({{AttackCategory::Normal, 400}, {AttackCategory::DDoS, 300}, {AttackCategory::Probe, 300}});
  const auto split = build_scenario_split(data, Scenario::KnownAttacks, 3);
  CHECK(split.train.size() + split.validation.size() + split.test.size() == 1000);
  CHECK(std::abs(static_cast<double>(split.train.size()) - 1000 * f.train) <= 1.0);
  CHECK(std::abs(static_cast<double>(split.validation.size()) - 1000 * f.validation) <= 1.0);
  // Stratified: each category within one item of its share.
  for (std::size_t c = 0; c < 3; ++c) {
    const std::size_t k = c == 0 ? 0 : (c == 1 ? 1 : 3);
    const double n = c == 0 ? 400 : 300;
    CHECK(std::abs(static_cast<double>(split.composition[0][k]) - n * f.train) <= 1.0);
  }
  // Every sentence lands in exactly one split.
  std::multiset<std::string> seen;
  for (const auto* part : {&split.train, &split.validation, &split.test})
    for (const auto& s : *part) seen.insert(s.text);
  CHECK(seen.size() == 1000);
  CHECK(std::set<std::string>(seen.begin(), seen.end()).size() == 1000);
  const auto again = build_scenario_split(data, Scenario::KnownAttacks, 3);
  CHECK(again.train == split.train);
}

TEST_CASE("scenario 2 keeps held-out categories out of training") {
  const auto data = blocks({{AttackCategory::Normal, 500},
                            {AttackCategory::DDoS, 200},
                            {AttackCategory::DoS, 200},
                            {AttackCategory::Probe, 100},
                            {AttackCategory::Web, 100}});
  const auto split = build_scenario_split(data, Scenario::UnseenAttacks, 8);
  for (const auto* part : {&split.train, &split.validation}) {
    for (const auto& s : *part) {
      for (auto c : s.group_categories) {
        CHECK((c == AttackCategory::Normal || c == AttackCategory::DDoS || c == AttackCategory::DoS));
      }
    }
  }
  CHECK(split.composition[2][static_cast<std::size_t>(AttackCategory::Probe)] == 100);
  CHECK(split.composition[2][static_cast<std::size_t>(AttackCategory::Web)] == 100);
  CHECK(split.composition_report().find("validation") != std::string::npos);
}
