#include "flowids/feature_select.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <thread>

#include "flowids/csv.hpp"
#include "flowids/error.hpp"

namespace flowids {

FeatureMatrix FeatureMatrix::from_dataset(const FlowDataset& ds) {
  FeatureMatrix m;
  m.rows = ds.records.size();
  m.cols = ds.schema.features.size();
  m.data.reserve(m.rows * m.cols);
  for (const auto& r : ds.records) {
    for (const auto& v : r.values) m.data.push_back(v.value);
  }
  return m;
}

double gini_impurity(std::span<const double> class_counts) {
  double total = 0.0;
  for (double c : class_counts) {
    if (c < 0) throw Error("negative class count");
    total += c;
  }
  if (total <= 0) throw Error("gini impurity of an empty node");
  double sum_sq = 0.0;
  for (double c : class_counts) sum_sq += (c / total) * (c / total);
  return 1.0 - sum_sq;
}

double DecisionTree::predict_proba(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                                        : n.right);
  }
  const auto& leaf = nodes[i];
  return leaf.class_counts[1] / (leaf.class_counts[0] + leaf.class_counts[1]);
}

double RandomForest::predict_proba(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& t : trees) sum += t.predict_proba(x);
  return sum / static_cast<double>(trees.size());
}

namespace {

double gini2(double n0, double n1) {
  const double n = n0 + n1;
  if (n <= 0) return 0.0;
  const double p0 = n0 / n, p1 = n1 / n;
  return 1.0 - p0 * p0 - p1 * p1;
}

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& X, std::span<const int> y, const ForestConfig& cfg,
              std::size_t mtry, std::uint64_t seed)
      : X_(X), y_(y), cfg_(cfg), mtry_(mtry), rng_(seed) {}

  DecisionTree build() {
    const std::size_t n = X_.rows;
    std::vector<std::size_t> samples(n);
    if (cfg_.bootstrap) {
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (auto& s : samples) s = pick(rng_);
    } else {
      std::iota(samples.begin(), samples.end(), std::size_t{0});
    }
    root_count_ = static_cast<double>(n);
    features_.resize(X_.cols);
    std::iota(features_.begin(), features_.end(), std::size_t{0});
    grow(samples, 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    double child_impurity = 0.0;  // weighted sum of children gini
    bool found = false;
  };

  std::int32_t grow(std::vector<std::size_t>& samples, std::size_t depth) {
    const auto id = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    double counts[2] = {0.0, 0.0};
    for (auto s : samples) counts[y_[s] ? 1 : 0] += 1.0;
    tree_.nodes[id].class_counts[0] = counts[0];
    tree_.nodes[id].class_counts[1] = counts[1];

    const double n = static_cast<double>(samples.size());
    const double impurity = gini2(counts[0], counts[1]);
    const bool depth_ok = !cfg_.max_depth || depth < *cfg_.max_depth;
    if (impurity <= 0.0 || samples.size() < cfg_.min_samples_split || !depth_ok) return id;

    Split best = find_split(samples, counts);
    if (!best.found) return id;

    const double decrease = impurity - best.child_impurity / n;
    if (decrease <= 0.0) return id;

    std::vector<std::size_t> left, right;
    left.reserve(samples.size());
    right.reserve(samples.size());
    for (auto s : samples) {
      (X_(s, best.feature) <= best.threshold ? left : right).push_back(s);
    }
    std::vector<std::size_t>().swap(samples);

    tree_.nodes[id].feature = static_cast<std::int32_t>(best.feature);
    tree_.nodes[id].threshold = best.threshold;
    tree_.nodes[id].impurity_decrease = (n / root_count_) * decrease;
    const auto l = grow(left, depth + 1);
    const auto r = grow(right, depth + 1);
    tree_.nodes[id].left = l;
    tree_.nodes[id].right = r;
    return id;
  }

  // Partial Fisher-Yates over the feature list picks `mtry` candidates.
  // Constant candidates are skipped without being replaced.
  Split find_split(const std::vector<std::size_t>& samples, const double counts[2]) {
    Split best;
    const std::size_t d = features_.size();
    std::vector<std::pair<double, int>> column(samples.size());
    for (std::size_t k = 0; k < mtry_; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, d - 1);
      std::swap(features_[k], features_[pick(rng_)]);
      const std::size_t f = features_[k];

      for (std::size_t i = 0; i < samples.size(); ++i) {
        column[i] = {X_(samples[i], f), y_[samples[i]] ? 1 : 0};
      }
      std::sort(column.begin(), column.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      if (column.front().first == column.back().first) continue;

      double left[2] = {0.0, 0.0};
      const double n = static_cast<double>(column.size());
      for (std::size_t i = 0; i + 1 < column.size(); ++i) {
        left[column[i].second] += 1.0;
        if (column[i].first == column[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = n - nl;
        const double weighted = nl * gini2(left[0], left[1]) +
                                nr * gini2(counts[0] - left[0], counts[1] - left[1]);
        if (!best.found || weighted < best.child_impurity) {
          best.found = true;
          best.feature = f;
          best.child_impurity = weighted;
          best.threshold = column[i].first + (column[i + 1].first - column[i].first) / 2.0;
          // Midpoint can round up to the right value; keep the split strict.
          if (best.threshold >= column[i + 1].first) best.threshold = column[i].first;
        }
      }
    }
    return best;
  }

  const FeatureMatrix& X_;
  std::span<const int> y_;
  const ForestConfig& cfg_;
  std::size_t mtry_;
  std::mt19937_64 rng_;
  std::vector<std::size_t> features_;
  double root_count_ = 0.0;
  DecisionTree tree_;
};

std::uint64_t tree_seed(std::uint64_t seed, std::size_t tree) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tree)};
  std::uint32_t parts[2];
  seq.generate(parts, parts + 2);
  return (static_cast<std::uint64_t>(parts[0]) << 32) | parts[1];
}

}  // namespace

RandomForest fit_random_forest(const FeatureMatrix& X, std::span<const int> y,
                               const ForestConfig& config) {
  if (config.n_trees < 1) throw Error("forest needs at least one tree");
  if (X.rows != y.size()) throw Error("feature matrix and labels differ in length");
  if (X.rows < 2) throw Error("random forest needs at least 2 samples");
  if (X.cols == 0) throw Error("random forest needs at least one feature");
  bool has0 = false, has1 = false;
  for (int v : y) {
    if (v != 0 && v != 1) throw Error("labels must be binary");
    (v ? has1 : has0) = true;
  }
  if (!(has0 && has1)) throw Error("single-class input: both classes are required");

  const std::size_t mtry = config.features_per_split.value_or(
      static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(X.cols)))));
  if (mtry < 1 || mtry > X.cols) throw Error("features_per_split must lie in [1, d]");

  RandomForest forest;
  forest.n_features = X.cols;
  forest.trees.resize(config.n_trees);

  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t t = begin; t < config.n_trees; t += step) {
      TreeBuilder b(X, y, config, mtry, tree_seed(config.seed, t));
      forest.trees[t] = b.build();
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(config.threads, config.n_trees));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(work, i, threads);
  }
  return forest;
}

double ImportanceReport::of(const std::string& feature) const {
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i] == feature) return importance[i];
  }
  throw Error("feature not in importance report: " + feature);
}

ImportanceReport feature_importances(const RandomForest& forest,
                                     const std::vector<std::string>& feature_names) {
  if (feature_names.size() != forest.n_features)
    throw Error("feature name count does not match the forest");
  const std::size_t d = forest.n_features;
  std::vector<double> total(d, 0.0);
  std::vector<double> per_tree(d);
  for (const auto& tree : forest.trees) {
    std::fill(per_tree.begin(), per_tree.end(), 0.0);
    for (const auto& node : tree.nodes) {
      if (!node.is_leaf()) per_tree[static_cast<std::size_t>(node.feature)] += node.impurity_decrease;
    }
    const double s = std::accumulate(per_tree.begin(), per_tree.end(), 0.0);
    if (s <= 0.0) continue;  // single-node tree (pure bootstrap sample)
    for (std::size_t f = 0; f < d; ++f) total[f] += per_tree[f] / s;
  }
  const double s = std::accumulate(total.begin(), total.end(), 0.0);
  ImportanceReport report;
  report.features = feature_names;
  report.importance.assign(d, 0.0);
  if (s > 0.0) {
    for (std::size_t f = 0; f < d; ++f) report.importance[f] = total[f] / s;
  }
  report.ranking.resize(d);
  std::iota(report.ranking.begin(), report.ranking.end(), std::size_t{0});
  std::stable_sort(report.ranking.begin(), report.ranking.end(), [&](auto a, auto b) {
    return report.importance[a] > report.importance[b];
  });
  return report;
}

std::vector<std::string> select_top_k(const ImportanceReport& report, std::size_t k) {
  if (k > report.features.size())
    throw Error("k = " + std::to_string(k) + " exceeds the feature count " +
                std::to_string(report.features.size()));
  std::vector<std::size_t> chosen(report.ranking.begin(),
                                  report.ranking.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(chosen.begin(), chosen.end());
  std::vector<std::string> out;
  out.reserve(k);
  for (auto i : chosen) out.push_back(report.features[i]);
  return out;
}

void write_importance_csv(const std::filesystem::path& path, const ImportanceReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "Feature,Importance\n";
  out << std::setprecision(17);
  for (auto i : report.ranking) out << csv::escape(report.features[i]) << ',' << report.importance[i] << '\n';
}

ImportanceReport read_importance_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("missing file: " + path.string());
  csv::Row row;
  if (!csv::read_row(in, row) || row.size() != 2 || row[0] != "Feature")
    throw Error("not an importance report: " + path.string());
  ImportanceReport report;
  while (csv::read_row(in, row)) {
    if (row.size() != 2) throw Error("malformed importance row in " + path.string());
    auto v = parse_finite(row[1]);
    if (!v) throw Error("malformed importance value in " + path.string());
    report.features.push_back(row[0]);
    report.importance.push_back(*v);
    report.ranking.push_back(report.ranking.size());
  }
  return report;
}

}  // namespace flowids
