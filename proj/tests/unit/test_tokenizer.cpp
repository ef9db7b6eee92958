#include <algorithm>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "flowids/error.hpp"
#include "flowids/tokenizer.hpp"

using namespace flowids;

namespace {

const std::string kSentence =
    "Flow Duration=1605449, Flow Pkts/s=159.4569494, Flow IAT Mean=6295.878431, Flow IAT Max=859760, "
    "Bwd IAT Tot=1603130, Bwd IAT Mean=10831.95946, Bwd Header Len=3004, Bwd Pkts/s=92.8089276, "
    "Pkt Len Max=27300, Init Bwd Win Byts=64240";

std::string joined(const std::vector<std::string>& words) {
  std::string s;
  for (const auto& w : words) s += (s.empty() ? "" : " ") + w;
  return s;
}

std::vector<TokenId> body(const TokenSequence& seq) {
  const auto n = seq.length();
  return {seq.ids.begin() + 1, seq.ids.begin() + static_cast<std::ptrdiff_t>(n) - 1};
}

}  // namespace

TEST_CASE("pre-tokenization lowercases and isolates punctuation") {
  CHECK(pre_tokenize("Flow Pkts/s=159.45, X") ==
        std::vector<std::string>{"flow", "pkts", "/", "s", "=", "159", ".", "45", ",", "x"});
  CHECK(pre_tokenize("  ").empty());
}

TEST_CASE("merging a repeated word learns the whole word") {
  const std::vector<std::string> corpus(12, "flow");
  const auto v = build_vocab(corpus, 20);
  CHECK(v.contains("flow"));
  CHECK(v.id("[PAD]") == 0);
  CHECK(v.id("[UNK]") == 1);
  const auto seq = encode("flow", v, 8);
  CHECK(seq.length() == 3);
  CHECK(seq.ids[1] == v.id("flow"));
}

TEST_CASE("target equal to specials plus alphabet gives characters only") {
  const std::vector<std::string> corpus{kSentence};
  const auto alphabet = initial_alphabet(corpus);
  const auto v = build_vocab(corpus, 5 + alphabet.size());
  CHECK(v.size() == 5 + alphabet.size());
  for (const auto& t : v.tokens()) {
    const auto core = t.rfind("##", 0) == 0 ? t.substr(2) : t;
    CHECK((core.size() == 1 || t.front() == '['));
  }
  CHECK_THROWS_AS(build_vocab(corpus, 4 + alphabet.size()), Error);
  CHECK_THROWS_AS(build_vocab(std::vector<std::string>{}, 100), Error);
}

TEST_CASE("vocabulary building is deterministic") {
  const std::vector<std::string> corpus{kSentence, "flow duration=12, flow pkts/s=7.5"};
  CHECK(build_vocab(corpus, 80) == build_vocab(corpus, 80));
  CHECK(build_vocab(corpus, 80).fingerprint() == build_vocab(corpus, 80).fingerprint());
}

TEST_CASE("empty text encodes to CLS SEP then padding") {
  const auto v = build_vocab(std::vector<std::string>{"abc"}, 12);
  const auto seq = encode("", v, 8);
  CHECK(seq.ids == std::vector<TokenId>{v.cls(), v.sep(), 0, 0, 0, 0, 0, 0});
  CHECK(seq.attention_mask == std::vector<std::uint8_t>{1, 1, 0, 0, 0, 0, 0, 0});
  CHECK_THROWS_AS(encode("", v, 1), Error);
}

TEST_CASE("casing does not change ids") {
  const auto v = build_vocab(std::vector<std::string>{kSentence}, 120);
  CHECK(encode("Flow", v, 6).ids == encode("flow", v, 6).ids);
}

TEST_CASE("truncation keeps max_len - 2 body pieces and SEP last") {
  // Character vocabulary: f ##l ##o ##w d ##u ##r ##a ##t ##i is 10 body pieces.
  const std::vector<std::string> corpus{kSentence};
  const auto v = build_vocab(corpus, 5 + initial_alphabet(corpus).size());
  const auto full = encode("Flow Durati", v, 32);
  REQUIRE(full.length() == 12);
  const auto seq = encode("Flow Durati", v, 8);
  CHECK(seq.length() == 8);
  CHECK(seq.ids[7] == v.sep());
  const std::vector<TokenId> expected{v.cls(), v.id("f"), v.id("##l"), v.id("##o"), v.id("##w"), v.id("d"),
                                      v.id("##u"), v.sep()};
  CHECK(seq.ids == expected);
}

TEST_CASE("encoding invariants over random texts") {
  const auto v = build_vocab(std::vector<std::string>{kSentence}, 150);
  std::mt19937_64 rng(3);
  const std::string alphabet = "flow duration=0123456789., /XYZ";
  for (int t = 0; t < 200; ++t) {
    std::string text;
    const auto len = rng() % 120;
    for (std::size_t i = 0; i < len; ++i) text += alphabet[rng() % alphabet.size()];
    const std::size_t max_len = 2 + rng() % 40;
    const auto seq = encode(text, v, max_len);
    REQUIRE(seq.ids.size() == max_len);
    const auto n = seq.length();
    CHECK(std::count(seq.ids.begin(), seq.ids.begin() + n, v.cls()) == 1);
    CHECK(std::count(seq.ids.begin(), seq.ids.begin() + n, v.sep()) == 1);
    CHECK(seq.ids[n - 1] == v.sep());
    CHECK(std::is_sorted(seq.attention_mask.rbegin(), seq.attention_mask.rend()));
    CHECK(encode(text, v, max_len) == seq);
  }
}

TEST_CASE("decode inverts in-vocabulary text on its normalized form") {
  const auto v = build_vocab(std::vector<std::string>{kSentence}, 150);
  const auto seq = encode(kSentence, v, 512);
  CHECK(decode(body(seq), v) == joined(pre_tokenize(kSentence)));
}

TEST_CASE("overlong and unknown words become UNK") {
  const auto v = build_vocab(std::vector<std::string>{"abc"}, 12);
  CHECK(wordpiece(std::string(101, 'a'), v) == std::vector<TokenId>{v.unk()});
  CHECK(wordpiece("q", v) == std::vector<TokenId>{v.unk()});
  const auto aa = build_vocab(std::vector<std::string>{"aa"}, 7);
  CHECK(wordpiece(std::string(100, 'a'), aa).front() != aa.unk());
  CHECK(wordpiece(std::string(101, 'a'), aa) == std::vector<TokenId>{aa.unk()});
}

TEST_CASE("mlm masking") {
  const auto v = build_vocab(std::vector<std::string>{kSentence}, 150);
  const auto seq = encode(kSentence, v, 512);
  CHECK(mlm_mask(seq, v, 0.0, 1).targets.empty());
  const auto all = mlm_mask(seq, v, 1.0, 1);
  CHECK(all.targets.size() == seq.length() - 2);
  for (const auto& [pos, orig] : all.targets) {
    CHECK(!v.is_special(orig));
    CHECK(pos > 0);
    CHECK(pos < seq.length() - 1);
  }
  CHECK(all.ids[0] == v.cls());
  CHECK(all.ids[seq.length() - 1] == v.sep());
  CHECK(all.ids.back() == v.pad());
  const auto a = mlm_mask(seq, v, 0.15, 9), b = mlm_mask(seq, v, 0.15, 9);
  CHECK(a.ids == b.ids);
  CHECK(a.targets == b.targets);
}

TEST_CASE("mlm replacement split is roughly 80/10/10") {
  const auto v = build_vocab(std::vector<std::string>{kSentence}, 150);
  const auto seq = encode(kSentence, v, 256);
  std::size_t masked = 0, kept = 0, total = 0;
  for (std::uint64_t s = 0; s < 300; ++s) {
    const auto c = mlm_mask(seq, v, 1.0, s);
    for (const auto& [pos, orig] : c.targets) {
      ++total;
      masked += c.ids[pos] == v.mask();
      kept += c.ids[pos] == orig;
    }
  }
  CHECK(static_cast<double>(masked) / total == doctest::Approx(0.8).epsilon(0.03));
  CHECK(static_cast<double>(kept) / total == doctest::Approx(0.1).epsilon(0.2));
}

TEST_CASE("vocabulary file round trip") {
  const auto v = build_vocab(std::vector<std::string>{kSentence}, 90);
  const auto path = std::filesystem::temp_directory_path() / "flowids_vocab_test.txt";
  v.save(path);
  CHECK(Vocabulary::load(path) == v);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(Vocabulary(std::vector<std::string>{"a", "b"}), Error);
}
