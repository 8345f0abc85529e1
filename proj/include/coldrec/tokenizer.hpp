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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace coldrec {

using TokenId = std::uint32_t;

// One learned merge. Rank 0 is the first merge picked during training.
struct MergeRule {
  std::string left;
  std::string right;
  std::uint32_t rank = 0;
};

// Byte-level BPE vocabulary: the 256 single-byte tokens plus learned
// merges, id of merge r being 256 + r. Immutable after construction and
// safe to share across concurrent encode calls.
//
// The space byte keeps its single-byte token and acts as the word
// separator: training never counts pairs across it and encode never
// merges into it, so decoding a sequence reproduces the normalized
// input bytes exactly, separators included.
class BpeVocab {
 public:
  static constexpr std::size_t kBaseAlphabet = 256;
  static constexpr TokenId kSpaceToken = static_cast<TokenId>(' ');

  BpeVocab();
  BpeVocab(std::vector<MergeRule> merges, std::uint32_t target_size);

  std::size_t size() const { return kBaseAlphabet + merges_.size(); }
  std::uint32_t target_size() const { return target_size_; }
  const std::vector<MergeRule>& merges() const { return merges_; }
  std::uint64_t content_hash() const { return content_hash_; }

  // Token byte string for an id; integrity error for out-of-range ids.
  const std::string& token(TokenId id) const;

  // Id of an exact token byte string, if present.
  std::optional<TokenId> find(std::string_view token_bytes) const;

  // (rank, merged id) for an adjacent id pair, if it is a learned merge.
  std::optional<std::pair<std::uint32_t, TokenId>> merge_of(TokenId left,
                                                            TokenId right) const;

 private:
  std::vector<MergeRule> merges_;
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, TokenId> token_to_id_;
  std::unordered_map<std::uint64_t, std::pair<std::uint32_t, TokenId>> merge_map_;
  std::uint32_t target_size_ = kBaseAlphabet;
  std::uint64_t content_hash_ = 0;
};

struct TokenSequence {
  std::vector<TokenId> ids;
  std::size_t source_len_bytes = 0;
};

// Lowercases, maps punctuation to a space, collapses whitespace runs and
// trims. Idempotent; empty input yields empty output.
std::string normalize_text(std::string_view raw);

// Greedy byte-level BPE: repeatedly merge the adjacent pair with the
// highest corpus frequency until the vocabulary reaches target_size or no
// pair occurs at least twice. Ties break lexicographically on the
// (left, right) byte strings. Pairs never span word boundaries.
BpeVocab train_bpe(const std::vector<std::string>& corpus,
                   std::uint32_t target_size);

// Applies merges in rank order within each word. Every input byte is
// covered exactly once; unseen byte patterns stay single-byte tokens.
// The input is expected to be normalized (caller contract).
TokenSequence encode(const BpeVocab& vocab, std::string_view text);

// Exact byte-level inverse of encode. Unknown ids raise an integrity
// error naming the id.
std::string decode(const BpeVocab& vocab, const TokenSequence& seq);

// Line-oriented text format: header "bpevocab 1 <target_size> <hash-hex>",
// then one merge per line "<rank> <left-hex> <right-hex>".
void save_vocab(const BpeVocab& vocab, const std::string& path);
BpeVocab load_vocab(const std::string& path);

}  // namespace coldrec
