#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "flowids/flow_ingest.hpp"

namespace flowids {

struct FlowSentence {
  std::string text;
  int label = 0;
  std::size_t source_index = 0;
  AttackCategory category = AttackCategory::Normal;

  bool operator==(const FlowSentence&) const = default;
};

struct CombinedSentence {
  std::string text;
  int label = 0;  // label of the last member
  std::vector<std::size_t> member_indices;
  std::vector<AttackCategory> group_categories;

  // Category of the last member; drives scenario splits.
  AttackCategory category() const { return group_categories.back(); }
  bool operator==(const CombinedSentence&) const = default;
};

// "Name=raw, Name=raw, ..." over `features` in the given order, using the
// verbatim CSV text of each value.
FlowSentence flow_to_sentence(const FlowRecord& record, const FeatureSchema& schema,
                              std::span<const std::string> features, std::size_t source_index = 0);

std::vector<FlowSentence> dataset_to_sentences(const FlowDataset& dataset,
                                               std::span<const std::string> features);

struct CombineOptions {
  std::size_t group_size = 4;
  // Group within each run of equal categories instead of over raw order.
  bool per_category_grouping = false;
};

// Joins each complete group of consecutive sentences with a single space and
// labels it by its last member; an incomplete trailing group is dropped.
std::vector<CombinedSentence> combine_flows(std::span<const FlowSentence> sentences,
                                            const CombineOptions& options = {});

// Sentence CSV: header "Sentence,label", sentence always double-quoted.
void write_sentence_csv(std::ostream& out, std::span<const FlowSentence> sentences);
void write_sentence_csv(std::ostream& out, std::span<const CombinedSentence> sentences);
void write_sentence_csv(const std::filesystem::path& path, std::span<const CombinedSentence> sentences);

struct LabeledText {
  std::string text;
  int label = 0;
};
std::vector<LabeledText> read_sentence_csv(std::istream& in);
std::vector<LabeledText> read_sentence_csv(const std::filesystem::path& path);

// Sidecar carrying member indices and categories, one row per combined
// sentence: "first_index,last_index,categories" (categories ';'-joined).
void write_group_sidecar(const std::filesystem::path& path, std::span<const CombinedSentence> sentences);

// Reads the sentence CSV and its sidecar back into combined sentences.
std::vector<CombinedSentence> read_combined(const std::filesystem::path& sentence_csv,
                                            const std::filesystem::path& sidecar);

}  // namespace flowids
