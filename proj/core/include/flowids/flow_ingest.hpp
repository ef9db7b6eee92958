#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flowids {

enum class AttackCategory : std::uint8_t { Normal, DDoS, DoS, Probe, BFA, Web, BOTNET, U2R };

inline constexpr std::size_t kCategoryCount = 8;

std::string_view category_name(AttackCategory c);
// Case-insensitive after trimming; accepts the InSDN spellings
// ("Web-Attack", "BFA", ...). Returns nullopt for unknown text.
std::optional<AttackCategory> parse_category(std::string_view text);
const std::vector<AttackCategory>& all_categories();

struct FeatureSchema {
  std::vector<std::string> features;  // retained features, column order
  std::vector<std::string> socket_features = default_socket_features();
  std::string label_column = "Label";

  static std::vector<std::string> default_socket_features();
  // The 84-column CICFlowMeter header used by InSDN (socket columns,
  // 76 flow statistics, label).
  static const std::vector<std::string>& insdn_columns();
  // Schema retaining the 76 InSDN flow features.
  static FeatureSchema insdn();
  // The ten flow features emitted by the synthetic generator, in column order.
  static FeatureSchema synthetic();

  std::optional<std::size_t> index_of(std::string_view name) const;
  // Throws Error on duplicate names or socket/retained overlap.
  void validate() const;

  bool operator==(const FeatureSchema&) const = default;
};

struct FeatureValue {
  std::string raw;  // verbatim CSV text
  double value = 0.0;

  bool operator==(const FeatureValue&) const = default;
};

struct FlowRecord {
  std::vector<FeatureValue> values;  // aligned with FeatureSchema::features
  std::string label_text;            // verbatim label column text
  AttackCategory category = AttackCategory::Normal;
  int binary_label = 0;

  bool operator==(const FlowRecord&) const = default;
};

struct Rejection {
  std::size_t row = 0;  // 1-based data row number (header excluded)
  std::string reason;
};

struct FlowDataset {
  FeatureSchema schema;
  std::vector<FlowRecord> records;
  std::string provenance;
  std::vector<Rejection> rejections;

  std::size_t size() const { return records.size(); }
  // Column of parsed values for one feature.
  std::vector<double> column(std::size_t feature) const;
  std::vector<int> labels() const;
};

// Parses a finite real; nullopt for empty, partial, or non-finite text.
std::optional<double> parse_finite(std::string_view text);

// Loads an InSDN-style CSV. Socket columns are dropped, rows with unparsable
// or non-finite values (or unknown labels) are rejected and reported, and the
// remaining rows keep file order. When `schema.features` is empty the
// retained features are taken from the header.
FlowDataset load_flow_csv(const std::filesystem::path& path, const FeatureSchema& schema);
FlowDataset load_flow_csv(std::istream& in, const FeatureSchema& schema, std::string provenance);

void write_flow_csv(const std::filesystem::path& path, const FlowDataset& dataset);
void write_flow_csv(std::ostream& out, const FlowDataset& dataset);

// "row <n>: <reason>" lines.
std::string rejection_report(const FlowDataset& dataset);

// Recomputes category and binary label from each record's label text.
// Throws Error on unknown category text.
FlowDataset binarize_labels(FlowDataset dataset);

// Keeps only the named features (in the given order) plus the label.
FlowDataset project_features(const FlowDataset& dataset, const std::vector<std::string>& features);

struct SyntheticSpec {
  std::size_t n_normal = 0;
  std::map<AttackCategory, std::size_t> n_attack;  // per family
  std::uint64_t seed = 0;
  double separation = 1.0;  // (0, 1]; 1 = fully separated class centres
};

// Desk-scale stand-in for the InSDN corpus over the ten synthetic() features.
// Records are emitted in category blocks (Normal first, then families in
// enum order); the output is a pure function of the spec.
FlowDataset generate_synthetic_flows(const SyntheticSpec& spec);

}  // namespace flowids
