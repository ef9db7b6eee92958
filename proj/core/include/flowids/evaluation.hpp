#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "flowids/flow_ingest.hpp"
#include "flowids/sentence_codec.hpp"

namespace flowids {

// Positive class = 1 (attack).
struct ConfusionMatrix {
  std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;

  std::uint64_t total() const { return tp + tn + fp + fn; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& o);
  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion_matrix(std::span<const int> predicted, std::span<const int> actual);

struct ClassScores {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  std::uint64_t support = 0;
  // Set when a ratio had a zero denominator and was reported as 0.
  bool zero_division = false;
};

struct MetricsReport {
  ConfusionMatrix matrix;
  double accuracy = 0.0;
  ClassScores binary;                  // attack class
  std::array<ClassScores, 2> per_class;  // index = class label
  ClassScores weighted;                // support-weighted average of per_class
};

// Throws Error on an empty matrix.
MetricsReport classification_metrics(const ConfusionMatrix& cm);

struct RocPoint {
  double threshold;  // score >= threshold predicts attack; +inf for the origin
  double fpr;
  double tpr;
};

struct RocCurve {
  std::vector<RocPoint> points;  // (0,0) ... (1,1)
  double auc = 0.0;              // trapezoidal
};

// One point per distinct score. Throws Error unless both classes occur.
RocCurve roc_curve_and_auc(std::span<const double> scores, std::span<const int> labels);

// Probability that a random positive outscores a random negative, ties 1/2.
double auc_by_pairs(std::span<const double> scores, std::span<const int> labels);

// Human-readable block and one-row CSV.
std::string metrics_text(const MetricsReport& m, const std::string& title = "");
std::string metrics_csv(const MetricsReport& m);
// "threshold,fpr,tpr" rows then an "auc,<value>" footer.
std::string roc_csv(const RocCurve& roc);

enum class Scenario { KnownAttacks = 1, UnseenAttacks = 2 };

struct SplitFractions {
  double train;
  double validation;
  // test = remainder
};

// Ratios from the reference dataset counts: 58,461 / 10,317 / 17,195 of 85,973 for scenario 1;
// 14,626 / 1,625 / 855 of 17,106 (Normal) for the seen part of scenario 2.
SplitFractions scenario_fractions(Scenario s);

struct ScenarioSplit {
  Scenario scenario = Scenario::KnownAttacks;
  std::vector<CombinedSentence> train, validation, test;
  // counts[split][category]; split 0 = train, 1 = validation, 2 = test.
  std::array<std::array<std::size_t, kCategoryCount>, 3> composition{};

  std::string composition_report() const;
};

// Scenario 1: stratified (by category) seeded split of everything.
// Scenario 2: train/validation drawn only from `seen` categories; test holds
// the seen remainder plus every sentence of the other categories.
ScenarioSplit build_scenario_split(std::span<const CombinedSentence> sentences, Scenario scenario,
                                   std::uint64_t seed,
                                   const std::vector<AttackCategory>& seen = {
                                       AttackCategory::Normal, AttackCategory::DDoS,
                                       AttackCategory::DoS});

}  // namespace flowids
