#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "flowids/encoder.hpp"

namespace flowids {

// Document-frequency-capped TF-IDF over the tokenizer's pre-tokens.
class TfidfModel {
 public:
  TfidfModel() = default;
  TfidfModel(std::vector<std::string> vocabulary, std::vector<double> idf);

  std::size_t size() const { return vocabulary_.size(); }
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  const std::vector<double>& idf() const { return idf_; }

  // Raw counts times idf, L2-normalized. A text without in-vocabulary tokens
  // maps to the zero vector and sets *empty.
  std::vector<double> transform(const std::string& text, bool* empty = nullptr) const;
  // Rows = texts, columns = size().
  Matrix<float> transform_all(std::span<const std::string> texts) const;

  // "token<TAB>idf" per line, in column order.
  void save(const std::filesystem::path& path) const;
  static TfidfModel load(const std::filesystem::path& path);

 private:
  std::vector<std::string> vocabulary_;  // lexicographic column order
  std::vector<double> idf_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Keeps the `max_features` tokens of highest document frequency (ties
// lexicographic); idf = ln((1 + N) / (1 + df)) + 1.
TfidfModel fit_tfidf(std::span<const std::string> corpus, std::size_t max_features = 512);

}  // namespace flowids
