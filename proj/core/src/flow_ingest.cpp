#include "flowids/flow_ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "flowids/csv.hpp"
#include "flowids/error.hpp"

namespace flowids {

namespace {

constexpr std::array<std::string_view, kCategoryCount> kCategoryNames = {
    "Normal", "DDoS", "DoS", "Probe", "BFA", "Web", "BOTNET", "U2R"};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string_view category_name(AttackCategory c) {
  return kCategoryNames[static_cast<std::size_t>(c)];
}

std::optional<AttackCategory> parse_category(std::string_view text) {
  const std::string key = lower(csv::trim(text));
  for (std::size_t i = 0; i < kCategoryCount; ++i) {
    if (key == lower(kCategoryNames[i])) return static_cast<AttackCategory>(i);
  }
  // InSDN spellings
  if (key == "web-attack" || key == "web attack" || key == "webattack")
    return AttackCategory::Web;
  if (key == "botnet" || key == "bot") return AttackCategory::BOTNET;
  if (key == "benign") return AttackCategory::Normal;
  return std::nullopt;
}

const std::vector<AttackCategory>& all_categories() {
  static const std::vector<AttackCategory> all = {
      AttackCategory::Normal, AttackCategory::DDoS, AttackCategory::DoS,
      AttackCategory::Probe,  AttackCategory::BFA,  AttackCategory::Web,
      AttackCategory::BOTNET, AttackCategory::U2R};
  return all;
}

std::vector<std::string> FeatureSchema::default_socket_features() {
  return {"Flow ID", "Src IP", "Src Port", "Dst IP", "Dst Port", "Protocol", "Timestamp"};
}

const std::vector<std::string>& FeatureSchema::insdn_columns() {
  static const std::vector<std::string> columns = {
      "Flow ID", "Src IP", "Src Port", "Dst IP", "Dst Port", "Protocol", "Timestamp",
      "Flow Duration", "Tot Fwd Pkts", "Tot Bwd Pkts", "TotLen Fwd Pkts", "TotLen Bwd Pkts",
      "Fwd Pkt Len Max", "Fwd Pkt Len Min", "Fwd Pkt Len Mean", "Fwd Pkt Len Std",
      "Bwd Pkt Len Max", "Bwd Pkt Len Min", "Bwd Pkt Len Mean", "Bwd Pkt Len Std",
      "Flow Byts/s", "Flow Pkts/s", "Flow IAT Mean", "Flow IAT Std", "Flow IAT Max",
      "Flow IAT Min", "Fwd IAT Tot", "Fwd IAT Mean", "Fwd IAT Std", "Fwd IAT Max",
      "Fwd IAT Min", "Bwd IAT Tot", "Bwd IAT Mean", "Bwd IAT Std", "Bwd IAT Max",
      "Bwd IAT Min", "Fwd PSH Flags", "Bwd PSH Flags", "Fwd URG Flags", "Bwd URG Flags",
      "Fwd Header Len", "Bwd Header Len", "Fwd Pkts/s", "Bwd Pkts/s", "Pkt Len Min",
      "Pkt Len Max", "Pkt Len Mean", "Pkt Len Std", "Pkt Len Var", "FIN Flag Cnt",
      "SYN Flag Cnt", "RST Flag Cnt", "PSH Flag Cnt", "ACK Flag Cnt", "URG Flag Cnt",
      "CWE Flag Count", "ECE Flag Cnt", "Down/Up Ratio", "Pkt Size Avg", "Fwd Seg Size Avg",
      "Bwd Seg Size Avg", "Fwd Byts/b Avg", "Fwd Pkts/b Avg", "Fwd Blk Rate Avg",
      "Bwd Byts/b Avg", "Bwd Pkts/b Avg", "Bwd Blk Rate Avg", "Subflow Fwd Pkts",
      "Subflow Fwd Byts", "Subflow Bwd Pkts", "Subflow Bwd Byts", "Init Fwd Win Byts",
      "Init Bwd Win Byts", "Fwd Act Data Pkts", "Fwd Seg Size Min", "Active Mean",
      "Active Std", "Active Max", "Active Min", "Idle Mean", "Idle Std", "Idle Max",
      "Idle Min", "Label"};
  return columns;
}

FeatureSchema FeatureSchema::insdn() {
  FeatureSchema schema;
  const auto sockets = default_socket_features();
  for (const auto& c : insdn_columns()) {
    if (c == schema.label_column) continue;
    if (std::find(sockets.begin(), sockets.end(), c) != sockets.end()) continue;
    schema.features.push_back(c);
  }
  return schema;
}

FeatureSchema FeatureSchema::synthetic() {
  FeatureSchema schema;
  schema.features = {"Flow Duration", "Flow Pkts/s",    "Flow IAT Mean", "Flow IAT Max",
                     "Bwd IAT Tot",   "Bwd IAT Mean",   "Bwd Header Len", "Bwd Pkts/s",
                     "Pkt Len Max",   "Init Bwd Win Byts"};
  return schema;
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i] == name) return i;
  }
  return std::nullopt;
}

void FeatureSchema::validate() const {
  std::set<std::string> seen;
  for (const auto& f : features) {
    if (!seen.insert(f).second) throw Error("duplicate feature name: " + f);
    if (f == label_column) throw Error("label column listed as a feature: " + f);
  }
  for (const auto& s : socket_features) {
    if (seen.count(s)) throw Error("socket feature retained as a flow feature: " + s);
  }
}

std::vector<double> FlowDataset::column(std::size_t feature) const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.values.at(feature).value);
  return out;
}

std::vector<int> FlowDataset::labels() const {
  std::vector<int> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.binary_label);
  return out;
}

std::optional<double> parse_finite(std::string_view text) {
  std::string_view t = text;
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.remove_suffix(1);
  if (!t.empty() && t.front() == '+') t.remove_prefix(1);
  if (t.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

FlowDataset load_flow_csv(std::istream& in, const FeatureSchema& schema, std::string provenance) {
  csv::Row header;
  if (!csv::read_row(in, header)) throw Error("missing header row in " + provenance);
  for (auto& h : header) h = csv::trim(h);

  std::optional<std::size_t> label_col;
  std::vector<std::string> retained;
  std::vector<std::size_t> retained_cols;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto& name = header[i];
    if (name == schema.label_column) {
      label_col = i;
      continue;
    }
    if (std::find(schema.socket_features.begin(), schema.socket_features.end(), name) !=
        schema.socket_features.end())
      continue;
    retained.push_back(name);
    retained_cols.push_back(i);
  }
  if (!label_col) throw Error("missing label column '" + schema.label_column + "' in " + provenance);

  FlowDataset ds;
  ds.schema = schema;
  ds.provenance = std::move(provenance);
  if (schema.features.empty()) {
    ds.schema.features = retained;
  } else if (retained != schema.features) {
    throw Error("header mismatch with schema in " + ds.provenance + " (expected " +
                std::to_string(schema.features.size()) + " retained features, found " +
                std::to_string(retained.size()) + ")");
  }
  ds.schema.validate();

  csv::Row row;
  std::size_t row_no = 0;
  while (csv::read_row(in, row)) {
    if (row.size() == 1 && csv::trim(row[0]).empty()) continue;  // blank line
    ++row_no;
    if (row.size() != header.size()) {
      ds.rejections.push_back({row_no, "expected " + std::to_string(header.size()) +
                                           " fields, found " + std::to_string(row.size())});
      continue;
    }
    FlowRecord rec;
    rec.values.reserve(retained_cols.size());
    std::string reason;
    for (std::size_t k = 0; k < retained_cols.size(); ++k) {
      const std::string& raw = row[retained_cols[k]];
      auto v = parse_finite(raw);
      if (!v) {
        reason = "non-numeric or non-finite value '" + raw + "' in '" + retained[k] + "'";
        break;
      }
      rec.values.push_back({raw, *v});
    }
    if (reason.empty()) {
      rec.label_text = row[*label_col];
      auto cat = parse_category(rec.label_text);
      if (!cat) {
        reason = "unknown category '" + rec.label_text + "'";
      } else {
        rec.category = *cat;
        rec.binary_label = *cat == AttackCategory::Normal ? 0 : 1;
      }
    }
    if (!reason.empty()) {
      ds.rejections.push_back({row_no, std::move(reason)});
      continue;
    }
    ds.records.push_back(std::move(rec));
  }
  if (ds.records.empty()) throw Error("zero surviving rows in " + ds.provenance);
  return ds;
}

FlowDataset load_flow_csv(const std::filesystem::path& path, const FeatureSchema& schema) {
  if (!std::filesystem::exists(path)) throw Error("missing file: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return load_flow_csv(in, schema, path.string());
}

void write_flow_csv(std::ostream& out, const FlowDataset& dataset) {
  csv::Row header = dataset.schema.features;
  header.push_back(dataset.schema.label_column);
  csv::write_row(out, header);
  csv::Row row;
  for (const auto& r : dataset.records) {
    row.clear();
    for (const auto& v : r.values) row.push_back(v.raw);
    row.push_back(r.label_text);
    csv::write_row(out, row);
  }
}

void write_flow_csv(const std::filesystem::path& path, const FlowDataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_flow_csv(out, dataset);
}

std::string rejection_report(const FlowDataset& dataset) {
  std::ostringstream os;
  for (const auto& r : dataset.rejections) os << "row " << r.row << ": " << r.reason << '\n';
  return os.str();
}

FlowDataset binarize_labels(FlowDataset dataset) {
  for (auto& r : dataset.records) {
    auto cat = parse_category(r.label_text);
    if (!cat) throw Error("unknown category text '" + r.label_text + "'");
    r.category = *cat;
    r.binary_label = *cat == AttackCategory::Normal ? 0 : 1;
  }
  return dataset;
}

FlowDataset project_features(const FlowDataset& dataset, const std::vector<std::string>& features) {
  std::vector<std::size_t> idx;
  for (const auto& f : features) {
    auto i = dataset.schema.index_of(f);
    if (!i) throw Error("unknown feature: " + f);
    idx.push_back(*i);
  }
  FlowDataset out;
  out.schema = dataset.schema;
  out.schema.features = features;
  out.provenance = dataset.provenance;
  out.records.reserve(dataset.records.size());
  for (const auto& r : dataset.records) {
    FlowRecord p;
    p.label_text = r.label_text;
    p.category = r.category;
    p.binary_label = r.binary_label;
    for (auto i : idx) p.values.push_back(r.values[i]);
    out.records.push_back(std::move(p));
  }
  return out;
}

}  // namespace flowids
