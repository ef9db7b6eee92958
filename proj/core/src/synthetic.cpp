#include <array>
#include <cmath>
#include <cstdio>
#include <random>

#include "flowids/error.hpp"
#include "flowids/flow_ingest.hpp"

namespace flowids {

namespace {

constexpr std::size_t kSynthFeatures = 10;

// value = shift + median * exp(sigma * z), z ~ N(0, 1). median == 0 gives the
// constant `shift`.
struct LogNormal {
  double median;
  double sigma;
  double shift = 0.0;
};

using Profile = std::array<LogNormal, kSynthFeatures>;

// Columns: Flow Duration, Flow Pkts/s, Flow IAT Mean, Flow IAT Max,
// Bwd IAT Tot, Bwd IAT Mean, Bwd Header Len, Bwd Pkts/s, Pkt Len Max,
// Init Bwd Win Byts.
constexpr std::array<bool, kSynthFeatures> kIntegral = {true, false, false, true, true,
                                                        false, true, false, true, true};

// Normal traffic: durations in milliseconds (1e3+ us), rates below 1e3 pkt/s.
// Attacks: durations of tens of microseconds, rates of 1e4+ pkt/s.
const Profile& profile(AttackCategory c) {
  static const std::array<Profile, kCategoryCount> profiles = {{
      // Normal
      {{{8000, 0.8}, {400, 0.6}, {2000, 0.7}, {5000, 0.8}, {3000, 1.0},
        {1500, 0.8}, {60, 0.6}, {200, 0.6}, {300, 1.0}, {0, 0, 64240}}},
      // DDoS
      {{{25, 0.4}, {80000, 0.4}, {25, 0.4}, {25, 0.4}, {20, 0.5},
        {20, 0.5}, {0, 0, 0}, {60000, 0.4}, {0, 0, 0}, {0, 0, -1}}},
      // DoS
      {{{60, 0.5}, {35000, 0.4}, {40, 0.5}, {55, 0.5}, {0, 0, 0},
        {0, 0, 0}, {20, 0.3}, {15000, 0.4}, {0, 0, 0}, {0, 0, 229}}},
      // Probe
      {{{40, 0.5}, {50000, 0.4}, {40, 0.5}, {40, 0.5}, {0, 0, 0},
        {0, 0, 0}, {20, 0.3}, {25000, 0.4}, {0, 0, 0}, {0, 0, 1024}}},
      // BFA
      {{{80, 0.4}, {30000, 0.4}, {60, 0.4}, {75, 0.4}, {30, 0.5},
        {30, 0.5}, {32, 0.3}, {12000, 0.4}, {40, 0.4}, {0, 0, 29200}}},
      // Web
      {{{50, 0.5}, {40000, 0.4}, {45, 0.5}, {50, 0.5}, {20, 0.5},
        {20, 0.5}, {40, 0.3}, {20000, 0.4}, {600, 0.5}, {0, 0, 64240}}},
      // BOTNET
      {{{35, 0.4}, {57000, 0.4}, {30, 0.4}, {35, 0.4}, {15, 0.5},
        {15, 0.5}, {20, 0.3}, {28000, 0.4}, {150, 0.5}, {0, 0, 8192}}},
      // U2R
      {{{70, 0.4}, {28000, 0.4}, {50, 0.4}, {65, 0.4}, {25, 0.5},
        {25, 0.5}, {32, 0.3}, {14000, 0.4}, {1200, 0.5}, {0, 0, 64240}}},
  }};
  return profiles[static_cast<std::size_t>(c)];
}

LogNormal lerp(const LogNormal& centre, const LogNormal& p, double s) {
  LogNormal out = p;
  out.shift = centre.shift + s * (p.shift - centre.shift);
  if (p.median > 0 && centre.median > 0) {
    const double lc = std::log(centre.median);
    out.median = std::exp(lc + s * (std::log(p.median) - lc));
  } else {
    out.median = centre.median + s * (p.median - centre.median);
  }
  return out;
}

LogNormal midpoint(const LogNormal& a, const LogNormal& b) {
  return lerp(a, b, 0.5);
}

// Moves every profile toward the midpoint between the normal profile and the
// attack centroid (geometric mean of attack medians).
std::array<Profile, kCategoryCount> interpolated_profiles(const SyntheticSpec& spec) {
  std::array<Profile, kCategoryCount> out;
  for (auto c : all_categories()) out[static_cast<std::size_t>(c)] = profile(c);
  if (spec.separation == 1.0) return out;

  std::array<double, kSynthFeatures> log_median_sum{};
  std::array<double, kSynthFeatures> shift_sum{};
  std::array<bool, kSynthFeatures> all_positive;
  all_positive.fill(true);
  std::size_t families = 0;
  for (const auto& [c, n] : spec.n_attack) {
    ++families;
    const auto& p = profile(c);
    for (std::size_t f = 0; f < kSynthFeatures; ++f) {
      if (p[f].median > 0) log_median_sum[f] += std::log(p[f].median);
      else all_positive[f] = false;
      shift_sum[f] += p[f].shift;
    }
  }
  if (families == 0) return out;
  const auto k = static_cast<double>(families);
  Profile centroid{};
  for (std::size_t f = 0; f < kSynthFeatures; ++f) {
    centroid[f].median = all_positive[f] ? std::exp(log_median_sum[f] / k) : 0.0;
    centroid[f].shift = shift_sum[f] / k;
  }
  const auto& normal = profile(AttackCategory::Normal);
  for (auto c : all_categories()) {
    auto& p = out[static_cast<std::size_t>(c)];
    for (std::size_t f = 0; f < kSynthFeatures; ++f) {
      p[f] = lerp(midpoint(normal[f], centroid[f]), p[f], spec.separation);
    }
  }
  return out;
}

std::string format_value(double v, bool integral) {
  char buf[64];
  if (integral) {
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(std::llround(v)));
  } else {
    std::snprintf(buf, sizeof buf, "%.10g", v);
  }
  return buf;
}

}  // namespace

FlowDataset generate_synthetic_flows(const SyntheticSpec& spec) {
  if (!(spec.separation > 0.0 && spec.separation <= 1.0))
    throw Error("separation must lie in (0, 1]");
  std::size_t total = spec.n_normal;
  for (const auto& [c, n] : spec.n_attack) {
    if (c == AttackCategory::Normal) throw Error("Normal is not an attack family");
    total += n;
  }
  if (total == 0) throw Error("synthetic dataset needs at least one record");

  const auto profiles = interpolated_profiles(spec);

  FlowDataset ds;
  ds.schema = FeatureSchema::synthetic();
  ds.provenance = "synthetic(seed=" + std::to_string(spec.seed) + ")";
  ds.records.reserve(total);

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  auto emit = [&](AttackCategory c, std::size_t n) {
    const auto& p = profiles[static_cast<std::size_t>(c)];
    for (std::size_t i = 0; i < n; ++i) {
      FlowRecord r;
      r.category = c;
      r.binary_label = c == AttackCategory::Normal ? 0 : 1;
      r.label_text = std::string(category_name(c));
      r.values.reserve(kSynthFeatures);
      for (std::size_t f = 0; f < kSynthFeatures; ++f) {
        const double z = normal(rng);
        const double x = p[f].shift + p[f].median * std::exp(p[f].sigma * z);
        std::string raw = format_value(x, kIntegral[f]);
        const double parsed = parse_finite(raw).value();
        r.values.push_back({std::move(raw), parsed});
      }
      ds.records.push_back(std::move(r));
    }
  };

  emit(AttackCategory::Normal, spec.n_normal);
  for (auto c : all_categories()) {
    auto it = spec.n_attack.find(c);
    if (it != spec.n_attack.end()) emit(c, it->second);
  }
  return ds;
}

}  // namespace flowids
