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
#include <string>
#include <string_view>

#include "coldrec/pooling.hpp"
#include "coldrec/tokenizer.hpp"

namespace coldrec {

// Per-token dense vectors, the stand-in for a frozen text encoder. One row
// per vocabulary token; immutable once built.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(MatrixX<float> rows, std::uint64_t vocab_hash);

  Eigen::Index rows() const { return rows_.rows(); }
  Eigen::Index dim() const { return rows_.cols(); }
  std::uint64_t vocab_hash() const { return vocab_hash_; }
  const MatrixX<float>& matrix() const { return rows_; }
  auto row(TokenId id) const { return rows_.row(id); }

 private:
  MatrixX<float> rows_;
  std::uint64_t vocab_hash_ = 0;
};

// Content-addressed token vector: the L2-normalized sum of one seeded
// standard-normal vector per byte trigram of the token (whole token when
// shorter than three bytes). Tokens sharing trigrams therefore have
// positive expected cosine similarity.
VectorX<float> synth_token_vector(std::string_view token, int dim,
                                  std::uint64_t seed);

// Deterministic synthetic table for the whole vocabulary.
EmbeddingTable synth_table(const BpeVocab& vocab, int dim, std::uint64_t seed);

// Binary format: magic "BPEV", version byte 1, u32 row count, u32 dim,
// u64 vocab hash, then row-major little-endian f32 values.
void save_table(const EmbeddingTable& table, const std::string& path);
EmbeddingTable load_table(const std::string& path, const BpeVocab& vocab);

enum class PoolKind { kMean, kAttention };

struct PoolingConfig {
  PoolKind kind = PoolKind::kMean;
  AttentionPooler pooler;  // used when kind is kAttention
};

// Token-embedding rows for a normalized text, word separators dropped.
MatrixX<float> gather_rows(const BpeVocab& vocab, const EmbeddingTable& table,
                           std::string_view normalized_text);

// normalize -> encode -> row lookup -> pool -> optional L2 normalization.
// Pure function of its inputs; text normalizing to empty is an error.
EntityVector embed_entity(const BpeVocab& vocab, const EmbeddingTable& table,
                          std::string_view raw_text,
                          const PoolingConfig& pooling, bool normalize);

}  // namespace coldrec
