#include "flowids/tokenizer.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <tuple>

#include "flowids/error.hpp"

namespace flowids {

namespace {

constexpr std::size_t kMaxWordChars = 100;
constexpr std::string_view kContinuation = "##";

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;  // stray continuation or invalid byte: treat as one unit
}

std::vector<std::string_view> codepoints(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t n = std::min(utf8_length(static_cast<unsigned char>(s[i])), s.size() - i);
    out.push_back(s.substr(i, n));
    i += n;
  }
  return out;
}

bool is_space(std::string_view cp) {
  return cp.size() == 1 && (cp[0] == ' ' || cp[0] == '\t' || cp[0] == '\n' || cp[0] == '\r' ||
                            cp[0] == '\v' || cp[0] == '\f');
}

bool is_punct(std::string_view cp) {
  if (cp.size() != 1) return false;
  const auto c = static_cast<unsigned char>(cp[0]);
  return (c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) ||
         (c >= 123 && c <= 126);
}

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<TokenId>(i)).second)
      throw Error("duplicate vocabulary token: " + tokens_[i]);
  }
  auto special = [&](std::string_view t) {
    auto it = index_.find(std::string(t));
    if (it == index_.end()) throw Error("vocabulary lacks special token " + std::string(t));
    return it->second;
  };
  pad_ = special(kPadToken);
  unk_ = special(kUnkToken);
  cls_ = special(kClsToken);
  sep_ = special(kSepToken);
  mask_ = special(kMaskToken);
}

bool Vocabulary::contains(std::string_view token) const {
  return index_.find(std::string(token)) != index_.end();
}

TokenId Vocabulary::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) throw Error("token not in vocabulary: " + std::string(token));
  return it->second;
}

TokenId Vocabulary::find_or(std::string_view token, TokenId fallback) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? fallback : it->second;
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size())
    throw Error("token id out of range: " + std::to_string(id));
  return tokens_[static_cast<std::size_t>(id)];
}

bool Vocabulary::is_special(TokenId id) const {
  return id == pad_ || id == unk_ || id == cls_ || id == sep_ || id == mask_;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& t : tokens_) out << t << '\n';
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("missing file: " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  return Vocabulary(std::move(tokens));
}

std::uint64_t Vocabulary::fingerprint() const {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& t : tokens_) {
    h = fnv1a(t, h);
    h = fnv1a("\n", h);
  }
  return h;
}

std::vector<std::string> pre_tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) out.push_back(std::move(word));
    word.clear();
  };
  for (auto cp : codepoints(text)) {
    if (is_space(cp)) {
      flush();
    } else if (is_punct(cp)) {
      flush();
      out.emplace_back(cp);
    } else if (cp.size() == 1) {
      char c = cp[0];
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      word.push_back(c);
    } else {
      word.append(cp);
    }
  }
  flush();
  return out;
}

std::vector<std::string> initial_alphabet(std::span<const std::string> corpus) {
  std::set<std::string> alphabet;
  for (const auto& text : corpus) {
    for (const auto& w : pre_tokenize(text)) {
      auto cps = codepoints(w);
      for (std::size_t i = 0; i < cps.size(); ++i) {
        alphabet.insert(i == 0 ? std::string(cps[i]) : std::string(kContinuation) + std::string(cps[i]));
      }
    }
  }
  return {alphabet.begin(), alphabet.end()};
}

namespace {

std::vector<std::string> special_tokens() {
  return {std::string(kPadToken), std::string(kUnkToken), std::string(kClsToken),
          std::string(kSepToken), std::string(kMaskToken)};
}

std::string_view strip_continuation(std::string_view s) {
  return s.starts_with(kContinuation) ? s.substr(kContinuation.size()) : s;
}

}  // namespace

Vocabulary build_vocab(std::span<const std::string> corpus, std::size_t target_size) {
  if (corpus.empty()) throw Error("cannot build a vocabulary from an empty corpus");

  std::map<std::string, std::int64_t> word_counts;
  for (const auto& text : corpus) {
    for (auto& w : pre_tokenize(text)) ++word_counts[std::move(w)];
  }

  auto tokens = special_tokens();
  const auto alphabet = initial_alphabet(corpus);
  if (target_size < tokens.size() + alphabet.size())
    throw Error("target_size " + std::to_string(target_size) + " is below the " +
                std::to_string(tokens.size() + alphabet.size()) + " specials and characters");

  // Symbol table shared by all words; ids index `symbols`.
  std::vector<std::string> symbols(alphabet.begin(), alphabet.end());
  std::unordered_map<std::string, std::int32_t> symbol_id;
  for (std::size_t i = 0; i < symbols.size(); ++i) symbol_id[symbols[i]] = static_cast<std::int32_t>(i);
  std::set<std::string> in_vocab(tokens.begin(), tokens.end());
  in_vocab.insert(alphabet.begin(), alphabet.end());
  tokens.insert(tokens.end(), alphabet.begin(), alphabet.end());

  struct Word {
    std::vector<std::int32_t> syms;
    std::int64_t count;
  };
  std::vector<Word> words;
  words.reserve(word_counts.size());
  for (const auto& [w, n] : word_counts) {
    Word word{{}, n};
    auto cps = codepoints(w);
    if (cps.size() > kMaxWordChars) continue;  // always [UNK]; contributes no merges
    for (std::size_t i = 0; i < cps.size(); ++i) {
      const std::string s = i == 0 ? std::string(cps[i]) : std::string(kContinuation) + std::string(cps[i]);
      word.syms.push_back(symbol_id.at(s));
    }
    if (word.syms.size() > 1) words.push_back(std::move(word));
  }

  auto key = [](std::int32_t a, std::int32_t b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  };

  std::unordered_map<std::uint64_t, std::int64_t> pair_counts;
  while (tokens.size() < target_size) {
    pair_counts.clear();
    for (const auto& w : words) {
      for (std::size_t i = 0; i + 1 < w.syms.size(); ++i) pair_counts[key(w.syms[i], w.syms[i + 1])] += w.count;
    }
    if (pair_counts.empty()) break;

    std::uint64_t best = 0;
    std::int64_t best_count = -1;
    for (const auto& [k, n] : pair_counts) {
      if (n < best_count) continue;
      if (n == best_count) {
        const auto& a = symbols[k >> 32];
        const auto& b = symbols[k & 0xffffffffu];
        const auto& ba = symbols[best >> 32];
        const auto& bb = symbols[best & 0xffffffffu];
        if (std::tie(a, b) >= std::tie(ba, bb)) continue;
      }
      best = k;
      best_count = n;
    }
    const auto a = static_cast<std::int32_t>(best >> 32);
    const auto b = static_cast<std::int32_t>(best & 0xffffffffu);
    const std::string merged = symbols[a] + std::string(strip_continuation(symbols[b]));

    std::int32_t merged_id;
    if (auto it = symbol_id.find(merged); it != symbol_id.end()) {
      merged_id = it->second;
    } else {
      merged_id = static_cast<std::int32_t>(symbols.size());
      symbols.push_back(merged);
      symbol_id.emplace(merged, merged_id);
    }
    if (in_vocab.insert(merged).second) tokens.push_back(merged);

    for (auto& w : words) {
      auto& s = w.syms;
      std::size_t out = 0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (i + 1 < s.size() && s[i] == a && s[i + 1] == b) {
          s[out++] = merged_id;
          ++i;
        } else {
          s[out++] = s[i];
        }
      }
      s.resize(out);
    }
    std::erase_if(words, [](const Word& w) { return w.syms.size() < 2; });
  }
  return Vocabulary(std::move(tokens));
}

std::vector<TokenId> wordpiece(std::string_view word, const Vocabulary& vocab) {
  const auto cps = codepoints(word);
  if (cps.empty()) return {};
  if (cps.size() > kMaxWordChars) return {vocab.unk()};
  // Byte offset of each code point, plus the end.
  std::vector<std::size_t> off;
  off.reserve(cps.size() + 1);
  for (auto cp : cps) off.push_back(static_cast<std::size_t>(cp.data() - word.data()));
  off.push_back(word.size());

  std::vector<TokenId> pieces;
  std::string candidate;
  std::size_t start = 0;
  while (start < cps.size()) {
    std::size_t end = cps.size();
    TokenId found = -1;
    while (end > start) {
      candidate.clear();
      if (start > 0) candidate = kContinuation;
      candidate.append(word.substr(off[start], off[end] - off[start]));
      found = vocab.find_or(candidate, -1);
      if (found >= 0) break;
      --end;
    }
    if (found < 0) return {vocab.unk()};
    pieces.push_back(found);
    start = end;
  }
  return pieces;
}

std::size_t TokenSequence::length() const {
  std::size_t n = 0;
  for (auto m : attention_mask) n += m;
  return n;
}

TokenSequence encode(std::string_view text, const Vocabulary& vocab, std::size_t max_len, int label) {
  if (max_len < 2) throw Error("max_len must be at least 2");
  std::vector<TokenId> body;
  for (const auto& w : pre_tokenize(text)) {
    auto pieces = wordpiece(w, vocab);
    body.insert(body.end(), pieces.begin(), pieces.end());
    if (body.size() >= max_len - 2) break;
  }
  if (body.size() > max_len - 2) body.resize(max_len - 2);

  TokenSequence seq;
  seq.label = label;
  seq.ids.reserve(max_len);
  seq.ids.push_back(vocab.cls());
  seq.ids.insert(seq.ids.end(), body.begin(), body.end());
  seq.ids.push_back(vocab.sep());
  seq.attention_mask.assign(seq.ids.size(), 1);
  seq.ids.resize(max_len, vocab.pad());
  seq.attention_mask.resize(max_len, 0);
  seq.segment_ids.assign(max_len, 0);
  return seq;
}

std::string decode(std::span<const TokenId> ids, const Vocabulary& vocab) {
  std::string out;
  for (auto id : ids) {
    const auto& t = vocab.token(id);
    if (t.starts_with(kContinuation)) {
      out += t.substr(kContinuation.size());
    } else {
      if (!out.empty()) out += ' ';
      out += t;
    }
  }
  return out;
}

MlmCorruption mlm_mask(const TokenSequence& seq, const Vocabulary& vocab, double mask_rate,
                       std::uint64_t seed) {
  if (mask_rate < 0.0 || mask_rate > 1.0) throw Error("mask_rate must lie in [0, 1]");
  MlmCorruption out;
  out.ids = seq.ids;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<TokenId> ordinary;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (!vocab.is_special(static_cast<TokenId>(i))) ordinary.push_back(static_cast<TokenId>(i));
  }
  for (std::size_t p = 0; p < seq.ids.size(); ++p) {
    if (!seq.attention_mask[p] || vocab.is_special(seq.ids[p])) continue;
    if (!(unit(rng) < mask_rate)) continue;
    out.targets.emplace(p, seq.ids[p]);
    const double r = unit(rng);
    if (r < 0.8) {
      out.ids[p] = vocab.mask();
    } else if (r < 0.9 && !ordinary.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, ordinary.size() - 1);
      out.ids[p] = ordinary[pick(rng)];
    }
  }
  return out;
}

}  // namespace flowids
