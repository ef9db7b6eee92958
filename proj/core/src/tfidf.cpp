#include "flowids/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>

#include "flowids/error.hpp"
#include "flowids/flow_ingest.hpp"
#include "flowids/tokenizer.hpp"

namespace flowids {

TfidfModel::TfidfModel(std::vector<std::string> vocabulary, std::vector<double> idf)
    : vocabulary_(std::move(vocabulary)), idf_(std::move(idf)) {
  if (vocabulary_.size() != idf_.size()) throw Error("tf-idf vocabulary and idf differ in length");
  for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
    if (!index_.emplace(vocabulary_[i], i).second) throw Error("duplicate tf-idf token " + vocabulary_[i]);
  }
}

std::vector<double> TfidfModel::transform(const std::string& text, bool* empty) const {
  std::vector<double> v(vocabulary_.size(), 0.0);
  for (const auto& tok : pre_tokenize(text)) {
    auto it = index_.find(tok);
    if (it != index_.end()) v[it->second] += 1.0;
  }
  double norm = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] *= idf_[i];
    norm += v[i] * v[i];
  }
  if (empty) *empty = norm == 0.0;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;
  }
  return v;
}

Matrix<float> TfidfModel::transform_all(std::span<const std::string> texts) const {
  Matrix<float> m(static_cast<Eigen::Index>(texts.size()), static_cast<Eigen::Index>(size()));
  for (std::size_t r = 0; r < texts.size(); ++r) {
    const auto v = transform(texts[r]);
    for (std::size_t c = 0; c < v.size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = static_cast<float>(v[c]);
  }
  return m;
}

void TfidfModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << std::setprecision(17);
  for (std::size_t i = 0; i < vocabulary_.size(); ++i) out << vocabulary_[i] << '\t' << idf_[i] << '\n';
}

TfidfModel TfidfModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("missing file: " + path.string());
  std::vector<std::string> vocab;
  std::vector<double> idf;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw Error("malformed tf-idf line: " + line);
    auto v = parse_finite(line.substr(tab + 1));
    if (!v) throw Error("malformed tf-idf weight: " + line);
    vocab.push_back(line.substr(0, tab));
    idf.push_back(*v);
  }
  return TfidfModel(std::move(vocab), std::move(idf));
}

TfidfModel fit_tfidf(std::span<const std::string> corpus, std::size_t max_features) {
  if (corpus.empty()) throw Error("cannot fit tf-idf on an empty corpus");
  std::map<std::string, std::size_t> df;
  for (const auto& doc : corpus) {
    auto toks = pre_tokenize(doc);
    std::set<std::string> uniq(toks.begin(), toks.end());
    for (const auto& t : uniq) ++df[t];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(df.begin(), df.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > max_features) ranked.resize(max_features);
  std::sort(ranked.begin(), ranked.end());

  const double n = static_cast<double>(corpus.size());
  std::vector<std::string> vocab;
  std::vector<double> idf;
  for (const auto& [tok, d] : ranked) {
    vocab.push_back(tok);
    idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(d))) + 1.0);
  }
  return TfidfModel(std::move(vocab), std::move(idf));
}

}  // namespace flowids
