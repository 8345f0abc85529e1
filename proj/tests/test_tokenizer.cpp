// Copyright 2026 The coldrec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "coldrec/errors.hpp"
#include "coldrec/tokenizer.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace coldrec;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("normalize_text basic rules") {
  CHECK(normalize_text("Hello, World!") == "hello world");
  CHECK(normalize_text("") == "");
  CHECK(normalize_text("Wireless\xe2\x80\x94Gaming   HEADSET.") ==
        "wireless gaming headset");
  CHECK(normalize_text("rock&roll") == "rock roll");
  CHECK(normalize_text("  leading and trailing\t ") == "leading and trailing");
  CHECK(normalize_text("...") == "");
}

TEST_CASE("normalize_text is idempotent on random unicode") {
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    std::string s = testutil::random_unicode_string(rng);
    std::string once = normalize_text(s);
    CHECK(normalize_text(once) == once);
  }
}

TEST_CASE("train_bpe matches the recount oracle on the low corpus") {
  std::vector<std::string> corpus = {"low low low lower lowest"};
  BpeVocab vocab = train_bpe(corpus, 260);
  auto expected = oracle::brute_force_bpe(corpus, 260);
  REQUIRE(vocab.merges().size() >= 3);
  REQUIRE(expected.size() >= 3);
  for (std::size_t r = 0; r < 3; ++r) {
    CHECK(vocab.merges()[r].left == expected[r].left);
    CHECK(vocab.merges()[r].right == expected[r].right);
  }
}

TEST_CASE("train_bpe single repeated pair") {
  BpeVocab vocab = train_bpe({"aaaa"}, 258);
  REQUIRE(vocab.merges().size() == 1);
  CHECK(vocab.merges()[0].left == "a");
  CHECK(vocab.merges()[0].right == "a");
  CHECK(vocab.size() == 257);
  auto expected = oracle::brute_force_bpe({"aaaa"}, 258);
  REQUIRE(expected.size() == 1);
  CHECK(expected[0].left == "a");
}

TEST_CASE("train_bpe stops when no pair repeats") {
  BpeVocab vocab = train_bpe({"a b c"}, 300);
  CHECK(vocab.merges().empty());
  CHECK(vocab.size() == 256);
}

TEST_CASE("train_bpe rejects target size below 257") {
  CHECK_THROWS_AS(train_bpe({"abc"}, 256), Error);
  try {
    train_bpe({"abc"}, 100);
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::kConfig);
  }
}

TEST_CASE("train_bpe is deterministic") {
  std::vector<std::string> corpus = {"alpha beta gamma alpha beta",
                                     "beta gamma delta", "alpha alpha"};
  BpeVocab a = train_bpe(corpus, 280);
  BpeVocab b = train_bpe(corpus, 280);
  CHECK(a.content_hash() == b.content_hash());
  REQUIRE(a.merges().size() == b.merges().size());
}

TEST_CASE("train_bpe equals oracle on random corpora") {
  Rng rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    auto corpus = testutil::random_small_corpus(rng);
    std::uint32_t target = 257 + static_cast<std::uint32_t>(rng.below(44));
    BpeVocab vocab = train_bpe(corpus, target);
    auto expected = oracle::brute_force_bpe(corpus, target);
    REQUIRE(vocab.merges().size() == expected.size());
    for (std::size_t r = 0; r < expected.size(); ++r) {
      CHECK(vocab.merges()[r].left == expected[r].left);
      CHECK(vocab.merges()[r].right == expected[r].right);
    }
  }
}

TEST_CASE("encode covers bytes and roundtrips") {
  BpeVocab vocab = train_bpe({"low low low lower lowest"}, 260);
  TokenSequence seq = encode(vocab, "low");
  CHECK(decode(vocab, seq) == "low");

  CHECK(encode(vocab, "").ids.empty());

  BpeVocab no_merges = train_bpe({"a b c"}, 300);
  TokenSequence two = encode(no_merges, "ab");
  CHECK(two.ids.size() == 2);
  CHECK(decode(no_merges, two) == "ab");
}

TEST_CASE("decode rejects out-of-range ids") {
  BpeVocab vocab = train_bpe({"aaaa"}, 258);
  TokenSequence seq;
  seq.ids = {static_cast<TokenId>(vocab.size())};
  try {
    decode(vocab, seq);
    FAIL("expected integrity error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::kIntegrity);
    CHECK(std::string(e.what()).find(std::to_string(vocab.size())) !=
          std::string::npos);
  }
}

TEST_CASE("roundtrip on random unicode strings") {
  BpeVocab vocab =
      train_bpe({"the quick brown fox jumps over the lazy dog again and again",
                 "wireless gaming headset bluetooth audio gear"},
                320);
  Rng rng(23);
  for (int i = 0; i < 300; ++i) {
    std::string norm = normalize_text(testutil::random_unicode_string(rng));
    CHECK(decode(vocab, encode(vocab, norm)) == norm);
  }
}

TEST_CASE("token count is non-increasing as merges are added") {
  std::vector<std::string> corpus = {
      "banana bandana banana bandana cabana banana"};
  std::string probe = normalize_text("banana cabana bandana");
  std::size_t prev = SIZE_MAX;
  for (std::uint32_t target = 257; target <= 275; ++target) {
    BpeVocab vocab = train_bpe(corpus, target);
    std::size_t count = encode(vocab, probe).ids.size();
    CHECK(count <= prev);
    prev = count;
    CHECK(vocab.size() <= target);
  }
}

TEST_CASE("vocab save/load roundtrip preserves content hash") {
  BpeVocab vocab = train_bpe({"low low low lower lowest"}, 260);
  std::string path = temp_path("coldrec_vocab_roundtrip.txt");
  save_vocab(vocab, path);
  BpeVocab loaded = load_vocab(path);
  CHECK(loaded.content_hash() == vocab.content_hash());
  CHECK(loaded.target_size() == vocab.target_size());
  CHECK(loaded.merges().size() == vocab.merges().size());
  std::remove(path.c_str());
}

TEST_CASE("vocab load rejects truncated and inconsistent files") {
  BpeVocab vocab = train_bpe({"low low low lower lowest"}, 260);
  std::string path = temp_path("coldrec_vocab_bad.txt");
  save_vocab(vocab, path);

  std::ifstream in(path, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  in.close();

  SUBCASE("mid-line truncation is a parse error") {
    std::ofstream out(path, std::ios::binary);
    out << content.substr(0, content.size() - 4);
    out.close();
    try {
      load_vocab(path);
      FAIL("expected parse error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::kParse);
    }
  }

  SUBCASE("whole-line truncation is an integrity error") {
    std::size_t cut = content.rfind('\n', content.size() - 2);
    std::ofstream out(path, std::ios::binary);
    out << content.substr(0, cut + 1);
    out.close();
    try {
      load_vocab(path);
      FAIL("expected integrity error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::kIntegrity);
    }
  }

  SUBCASE("duplicate rank is an integrity error") {
    std::size_t first_merge = content.find('\n') + 1;
    std::size_t second = content.find('\n', first_merge) + 1;
    std::string dup = content.substr(0, second) +
                      content.substr(first_merge, second - first_merge) +
                      content.substr(second);
    std::ofstream out(path, std::ios::binary);
    out << dup;
    out.close();
    try {
      load_vocab(path);
      FAIL("expected integrity error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::kIntegrity);
    }
  }

  std::remove(path.c_str());
}
