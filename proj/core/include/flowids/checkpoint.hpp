#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flowids/encoder.hpp"

namespace flowids {

struct TensorEntry {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> data;  // row-major

  bool operator==(const TensorEntry&) const = default;
};

// On disk: config.txt ("key = value" lines), tensors.bin (little-endian
// IEEE-754 binary32, tensors back to back) and manifest.txt
// ("name rows cols byte_offset" lines).
struct Checkpoint {
  std::vector<std::pair<std::string, std::string>> settings;
  std::vector<TensorEntry> tensors;

  std::optional<std::string> setting(const std::string& key) const;
  void set(const std::string& key, std::string value);
  const TensorEntry& tensor(const std::string& name) const;

  bool operator==(const Checkpoint&) const = default;
};

void save_checkpoint(const std::filesystem::path& dir, const Checkpoint& ckpt);
// Throws Error("missing checkpoint: ...") when the directory is incomplete.
Checkpoint load_checkpoint(const std::filesystem::path& dir);

// "key = value" text; '#' starts a comment line.
std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text);

Checkpoint encoder_checkpoint(const EncoderParams<float>& params);
EncoderParams<float> encoder_from_checkpoint(const Checkpoint& ckpt);

void write_encoder_config(Checkpoint& ckpt, const EncoderConfig& config);
EncoderConfig read_encoder_config(const Checkpoint& ckpt);

}  // namespace flowids
