#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowids/flow_ingest.hpp"

namespace flowids {

struct ForestConfig {
  std::size_t n_trees = 100;
  std::optional<std::size_t> max_depth;  // nullopt = grow until pure
  std::size_t min_samples_split = 2;
  std::optional<std::size_t> features_per_split;  // nullopt = ceil(sqrt(d))
  bool bootstrap = true;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

// Row-major sample matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  static FeatureMatrix from_dataset(const FlowDataset& ds);
};

// 1 - sum p_i^2. Throws Error when the counts total zero.
double gini_impurity(std::span<const double> class_counts);

struct TreeNode {
  // Internal nodes: samples with x[feature] <= threshold go left.
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double class_counts[2] = {0.0, 0.0};
  // (n_node / n_root) * (gini(node) - weighted gini(children)); 0 at leaves.
  double impurity_decrease = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict_proba(std::span<const double> x) const;
};

struct RandomForest {
  std::size_t n_features = 0;
  std::vector<DecisionTree> trees;

  // Mean over trees of the positive-class leaf fraction.
  double predict_proba(std::span<const double> x) const;
};

// Grows `n_trees` CART trees on seeded bootstrap resamples. Tree t draws from
// a generator seeded by (seed, t), so results do not depend on `threads`.
RandomForest fit_random_forest(const FeatureMatrix& X, std::span<const int> y,
                               const ForestConfig& config);

struct ImportanceReport {
  std::vector<std::string> features;  // column order
  std::vector<double> importance;     // aligned with `features`
  std::vector<std::size_t> ranking;   // descending importance, ties by column order

  double of(const std::string& feature) const;
};

// Mean decrease in Gini impurity, normalized per tree, averaged over trees
// and renormalized to sum to 1.
ImportanceReport feature_importances(const RandomForest& forest,
                                     const std::vector<std::string>& feature_names);

// The k most important features, returned in column order.
std::vector<std::string> select_top_k(const ImportanceReport& report, std::size_t k = 10);

// "Feature,Importance" sorted descending.
void write_importance_csv(const std::filesystem::path& path, const ImportanceReport& report);
ImportanceReport read_importance_csv(const std::filesystem::path& path);

}  // namespace flowids
