#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace flowids {

using TokenId = std::int32_t;

inline constexpr std::string_view kPadToken = "[PAD]";
inline constexpr std::string_view kUnkToken = "[UNK]";
inline constexpr std::string_view kClsToken = "[CLS]";
inline constexpr std::string_view kSepToken = "[SEP]";
inline constexpr std::string_view kMaskToken = "[MASK]";

// Uncased WordPiece vocabulary. Built vocabularies place the specials at ids
// 0..4 ([PAD] = 0); loaded vocabularies keep whatever line order the file has.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  bool contains(std::string_view token) const;
  // Throws Error for unknown tokens.
  TokenId id(std::string_view token) const;
  TokenId find_or(std::string_view token, TokenId fallback) const;
  const std::string& token(TokenId id) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

  TokenId pad() const { return pad_; }
  TokenId unk() const { return unk_; }
  TokenId cls() const { return cls_; }
  TokenId sep() const { return sep_; }
  TokenId mask() const { return mask_; }
  bool is_special(TokenId id) const;

  // One token per line, id = zero-based line index.
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  // FNV-1a over the token list; used to detect mismatched encodings.
  std::uint64_t fingerprint() const;

  bool operator==(const Vocabulary& o) const { return tokens_ == o.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  TokenId pad_ = 0, unk_ = 0, cls_ = 0, sep_ = 0, mask_ = 0;
};

// Lowercases and splits on whitespace and punctuation; every punctuation
// character becomes its own pre-token. Operates on UTF-8 code points.
std::vector<std::string> pre_tokenize(std::string_view text);

// Word-initial and "##"-continuation forms of every character in the
// corpus, sorted. build_vocab always contains these plus the five specials.
std::vector<std::string> initial_alphabet(std::span<const std::string> corpus);

// Learns merges by repeatedly fusing the most frequent adjacent symbol pair
// (ties broken lexicographically) until the vocabulary reaches target_size
// or no pair remains.
Vocabulary build_vocab(std::span<const std::string> corpus, std::size_t target_size);

// Greedy longest-match WordPiece of one pre-token. Words longer than 100
// characters, or with an unmatchable remainder, become [UNK].
std::vector<TokenId> wordpiece(std::string_view word, const Vocabulary& vocab);

struct TokenSequence {
  std::vector<TokenId> ids;
  std::vector<std::uint8_t> attention_mask;
  std::vector<std::uint8_t> segment_ids;
  int label = 0;

  std::size_t length() const;  // number of unmasked positions
  bool operator==(const TokenSequence&) const = default;
};

// [CLS] body [SEP] [PAD]...; the body is truncated so [SEP] always fits.
TokenSequence encode(std::string_view text, const Vocabulary& vocab, std::size_t max_len,
                     int label = 0);

// Inverse of the body of encode() on in-vocabulary text: pieces are joined,
// "##" continuations glued to their word, words separated by one space.
std::string decode(std::span<const TokenId> ids, const Vocabulary& vocab);

struct MlmCorruption {
  std::vector<TokenId> ids;
  std::map<std::size_t, TokenId> targets;  // position -> original id
};

// Selects each non-special unmasked position with probability `mask_rate`;
// selected positions become [MASK] (80%), a random id (10%) or stay (10%).
MlmCorruption mlm_mask(const TokenSequence& seq, const Vocabulary& vocab, double mask_rate,
                       std::uint64_t seed);

}  // namespace flowids
