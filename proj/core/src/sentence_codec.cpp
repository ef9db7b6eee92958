#include "flowids/sentence_codec.hpp"

#include <fstream>
#include <sstream>

#include "flowids/csv.hpp"
#include "flowids/error.hpp"

namespace flowids {

FlowSentence flow_to_sentence(const FlowRecord& record, const FeatureSchema& schema,
                              std::span<const std::string> features, std::size_t source_index) {
  FlowSentence s;
  s.label = record.binary_label;
  s.category = record.category;
  s.source_index = source_index;
  for (std::size_t i = 0; i < features.size(); ++i) {
    auto idx = schema.index_of(features[i]);
    if (!idx || *idx >= record.values.size()) throw Error("missing feature: " + features[i]);
    if (i) s.text += ", ";
    s.text += features[i];
    s.text += '=';
    s.text += record.values[*idx].raw;
  }
  return s;
}

std::vector<FlowSentence> dataset_to_sentences(const FlowDataset& dataset,
                                               std::span<const std::string> features) {
  std::vector<FlowSentence> out;
  out.reserve(dataset.records.size());
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    out.push_back(flow_to_sentence(dataset.records[i], dataset.schema, features, i));
  }
  return out;
}

namespace {

void combine_range(std::span<const FlowSentence> s, std::size_t g,
                   std::vector<CombinedSentence>& out) {
  const std::size_t groups = s.size() / g;
  for (std::size_t k = 0; k < groups; ++k) {
    CombinedSentence c;
    std::size_t len = g - 1;
    for (std::size_t j = 0; j < g; ++j) len += s[k * g + j].text.size();
    c.text.reserve(len);
    for (std::size_t j = 0; j < g; ++j) {
      const auto& m = s[k * g + j];
      if (j) c.text += ' ';
      c.text += m.text;
      c.member_indices.push_back(m.source_index);
      c.group_categories.push_back(m.category);
    }
    c.label = s[k * g + g - 1].label;
    out.push_back(std::move(c));
  }
}

}  // namespace

std::vector<CombinedSentence> combine_flows(std::span<const FlowSentence> sentences,
                                            const CombineOptions& options) {
  if (options.group_size < 1) throw Error("group_size must be at least 1");
  std::vector<CombinedSentence> out;
  out.reserve(sentences.size() / options.group_size);
  if (!options.per_category_grouping) {
    combine_range(sentences, options.group_size, out);
    return out;
  }
  std::size_t begin = 0;
  while (begin < sentences.size()) {
    std::size_t end = begin + 1;
    while (end < sentences.size() && sentences[end].category == sentences[begin].category) ++end;
    combine_range(sentences.subspan(begin, end - begin), options.group_size, out);
    begin = end;
  }
  return out;
}

namespace {

template <typename S>
void write_sentences(std::ostream& out, std::span<const S> sentences) {
  out << "Sentence,label\n";
  for (const auto& s : sentences) out << csv::quote(s.text) << ',' << s.label << '\n';
}

}  // namespace

void write_sentence_csv(std::ostream& out, std::span<const FlowSentence> sentences) {
  write_sentences(out, sentences);
}

void write_sentence_csv(std::ostream& out, std::span<const CombinedSentence> sentences) {
  write_sentences(out, sentences);
}

void write_sentence_csv(const std::filesystem::path& path,
                        std::span<const CombinedSentence> sentences) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_sentences(out, sentences);
}

std::vector<LabeledText> read_sentence_csv(std::istream& in) {
  csv::Row row;
  if (!csv::read_row(in, row) || row.size() < 2 || csv::trim(row[0]) != "Sentence" ||
      csv::trim(row[1]) != "label")
    throw Error("sentence CSV must start with header \"Sentence,label\"");
  std::vector<LabeledText> out;
  std::size_t line = 1;
  while (csv::read_row(in, row)) {
    ++line;
    if (row.size() < 2) throw Error("malformed sentence row " + std::to_string(line));
    const auto lbl = csv::trim(row[1]);
    if (lbl != "0" && lbl != "1") throw Error("label must be 0 or 1 on row " + std::to_string(line));
    out.push_back({std::move(row[0]), lbl == "1" ? 1 : 0});
  }
  return out;
}

std::vector<LabeledText> read_sentence_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("missing file: " + path.string());
  return read_sentence_csv(in);
}

void write_group_sidecar(const std::filesystem::path& path,
                         std::span<const CombinedSentence> sentences) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "first_index,last_index,categories\n";
  for (const auto& s : sentences) {
    out << s.member_indices.front() << ',' << s.member_indices.back() << ',';
    for (std::size_t i = 0; i < s.group_categories.size(); ++i) {
      if (i) out << ';';
      out << category_name(s.group_categories[i]);
    }
    out << '\n';
  }
}

std::vector<CombinedSentence> read_combined(const std::filesystem::path& sentence_csv,
                                            const std::filesystem::path& sidecar) {
  auto texts = read_sentence_csv(sentence_csv);
  std::ifstream in(sidecar, std::ios::binary);
  if (!in) throw Error("missing file: " + sidecar.string());
  csv::Row row;
  if (!csv::read_row(in, row) || row.size() != 3 || row[0] != "first_index")
    throw Error("malformed group sidecar: " + sidecar.string());
  std::vector<CombinedSentence> out;
  out.reserve(texts.size());
  for (auto& t : texts) {
    if (!csv::read_row(in, row) || row.size() != 3)
      throw Error("group sidecar shorter than " + sentence_csv.string());
    CombinedSentence c;
    c.text = std::move(t.text);
    c.label = t.label;
    const auto first = std::stoull(row[0]);
    const auto last = std::stoull(row[1]);
    std::stringstream cats(row[2]);
    std::string item;
    while (std::getline(cats, item, ';')) {
      auto cat = parse_category(item);
      if (!cat) throw Error("unknown category in sidecar: " + item);
      c.group_categories.push_back(*cat);
    }
    if (c.group_categories.empty() || last < first ||
        last - first + 1 != c.group_categories.size())
      throw Error("inconsistent group sidecar row in " + sidecar.string());
    for (auto i = first; i <= last; ++i) c.member_indices.push_back(i);
    out.push_back(std::move(c));
  }
  if (csv::read_row(in, row)) throw Error("group sidecar longer than " + sentence_csv.string());
  return out;
}

}  // namespace flowids
