#include "flowids/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "flowids/csv.hpp"
#include "flowids/error.hpp"

namespace flowids {

namespace fs = std::filesystem;

std::optional<std::string> Checkpoint::setting(const std::string& key) const {
  for (const auto& [k, v] : settings) {
    if (k == key) return v;
  }
  return std::nullopt;
}

void Checkpoint::set(const std::string& key, std::string value) {
  for (auto& [k, v] : settings) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  settings.emplace_back(key, std::move(value));
}

const TensorEntry& Checkpoint::tensor(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return t;
  }
  throw Error("checkpoint has no tensor " + name);
}

std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    const auto t = csv::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw Error("line " + std::to_string(no) + ": expected key = value");
    auto key = csv::trim(t.substr(0, eq));
    if (key.empty()) throw Error("line " + std::to_string(no) + ": empty key");
    out.emplace_back(std::move(key), csv::trim(t.substr(eq + 1)));
  }
  return out;
}

namespace {

void put_le32(std::ostream& out, float f) {
  const auto u = std::bit_cast<std::uint32_t>(f);
  const char bytes[4] = {static_cast<char>(u & 0xff), static_cast<char>((u >> 8) & 0xff),
                         static_cast<char>((u >> 16) & 0xff), static_cast<char>((u >> 24) & 0xff)};
  out.write(bytes, 4);
}

float get_le32(const unsigned char* p) {
  const std::uint32_t u = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                          (static_cast<std::uint32_t>(p[2]) << 16) |
                          (static_cast<std::uint32_t>(p[3]) << 24);
  return std::bit_cast<float>(u);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("missing checkpoint: cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

void save_checkpoint(const fs::path& dir, const Checkpoint& ckpt) {
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "config.txt", std::ios::binary);
    if (!cfg) throw Error("cannot write " + (dir / "config.txt").string());
    for (const auto& [k, v] : ckpt.settings) cfg << k << " = " << v << '\n';
  }
  std::ofstream bin(dir / "tensors.bin", std::ios::binary);
  std::ofstream manifest(dir / "manifest.txt", std::ios::binary);
  if (!bin || !manifest) throw Error("cannot write checkpoint tensors in " + dir.string());
  std::size_t offset = 0;
  for (const auto& t : ckpt.tensors) {
    if (t.data.size() != t.rows * t.cols) throw Error("tensor " + t.name + " has inconsistent shape");
    if (t.name.find_first_of(" \t\n") != std::string::npos)
      throw Error("tensor name contains whitespace: " + t.name);
    manifest << t.name << ' ' << t.rows << ' ' << t.cols << ' ' << offset << '\n';
    for (float f : t.data) put_le32(bin, f);
    offset += t.data.size() * 4;
  }
}

Checkpoint load_checkpoint(const fs::path& dir) {
  for (const char* f : {"config.txt", "tensors.bin", "manifest.txt"}) {
    if (!fs::exists(dir / f)) throw Error("missing checkpoint: " + (dir / f).string());
  }
  Checkpoint ckpt;
  ckpt.settings = parse_key_values(read_file(dir / "config.txt"));
  const std::string bin = read_file(dir / "tensors.bin");
  const auto* bytes = reinterpret_cast<const unsigned char*>(bin.data());

  std::istringstream manifest(read_file(dir / "manifest.txt"));
  std::string line;
  while (std::getline(manifest, line)) {
    if (csv::trim(line).empty()) continue;
    std::istringstream ls(line);
    TensorEntry t;
    std::size_t offset = 0;
    if (!(ls >> t.name >> t.rows >> t.cols >> offset))
      throw Error("malformed manifest line: " + line);
    const std::size_t count = t.rows * t.cols;
    if (offset + count * 4 > bin.size()) throw Error("tensor " + t.name + " overruns tensors.bin");
    t.data.resize(count);
    for (std::size_t i = 0; i < count; ++i) t.data[i] = get_le32(bytes + offset + 4 * i);
    ckpt.tensors.push_back(std::move(t));
  }
  return ckpt;
}

void write_encoder_config(Checkpoint& ckpt, const EncoderConfig& c) {
  ckpt.set("encoder.n_layers", std::to_string(c.n_layers));
  ckpt.set("encoder.hidden_dim", std::to_string(c.hidden_dim));
  ckpt.set("encoder.n_heads", std::to_string(c.n_heads));
  ckpt.set("encoder.ffn_dim", std::to_string(c.ffn_dim));
  ckpt.set("encoder.max_positions", std::to_string(c.max_positions));
  ckpt.set("encoder.vocab_size", std::to_string(c.vocab_size));
  ckpt.set("encoder.n_classes", std::to_string(c.n_classes));
  std::ostringstream os;
  os.precision(17);
  os << c.dropout_rate;
  ckpt.set("encoder.dropout", os.str());
  ckpt.set("encoder.activation", c.activation == Activation::Relu ? "relu" : "gelu");
  os.str("");
  os << c.init_std;
  ckpt.set("encoder.init_std", os.str());
  os.str("");
  os << c.layer_norm_eps;
  ckpt.set("encoder.layer_norm_eps", os.str());
}

EncoderConfig read_encoder_config(const Checkpoint& ckpt) {
  auto get = [&](const std::string& k) {
    auto v = ckpt.setting(k);
    if (!v) throw Error("checkpoint config lacks " + k);
    return *v;
  };
  EncoderConfig c;
  c.n_layers = std::stoull(get("encoder.n_layers"));
  c.hidden_dim = std::stoull(get("encoder.hidden_dim"));
  c.n_heads = std::stoull(get("encoder.n_heads"));
  c.ffn_dim = std::stoull(get("encoder.ffn_dim"));
  c.max_positions = std::stoull(get("encoder.max_positions"));
  c.vocab_size = std::stoull(get("encoder.vocab_size"));
  c.n_classes = std::stoull(get("encoder.n_classes"));
  c.dropout_rate = std::stod(get("encoder.dropout"));
  const auto act = get("encoder.activation");
  if (act != "relu" && act != "gelu") throw Error("unknown activation " + act);
  c.activation = act == "relu" ? Activation::Relu : Activation::Gelu;
  c.init_std = std::stod(get("encoder.init_std"));
  c.layer_norm_eps = std::stod(get("encoder.layer_norm_eps"));
  c.validate();
  return c;
}

Checkpoint encoder_checkpoint(const EncoderParams<float>& params) {
  Checkpoint ckpt;
  write_encoder_config(ckpt, params.config);
  params.visit([&](const std::string& name, const Matrix<float>& m) {
    TensorEntry t;
    t.name = name;
    t.rows = static_cast<std::size_t>(m.rows());
    t.cols = static_cast<std::size_t>(m.cols());
    t.data.assign(m.data(), m.data() + m.size());
    ckpt.tensors.push_back(std::move(t));
  });
  return ckpt;
}

EncoderParams<float> encoder_from_checkpoint(const Checkpoint& ckpt) {
  const auto config = read_encoder_config(ckpt);
  EncoderParams<float> p = init_params<float>(config, 0);
  p.visit([&](const std::string& name, Matrix<float>& m) {
    const auto& t = ckpt.tensor(name);
    if (t.rows != static_cast<std::size_t>(m.rows()) || t.cols != static_cast<std::size_t>(m.cols()))
      throw Error("tensor " + name + " has the wrong shape for the encoder config");
    std::memcpy(m.data(), t.data.data(), t.data.size() * sizeof(float));
  });
  return p;
}

}  // namespace flowids
