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

#include "coldrec/embedding.hpp"

#include <cstring>
#include <fstream>

#include "coldrec/errors.hpp"
#include "coldrec/rng.hpp"

namespace coldrec {

namespace {

void write_bytes(std::ofstream& f, const void* p, std::size_t n) {
  f.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

template <typename T>
void write_pod(std::ofstream& f, T v) {
  write_bytes(f, &v, sizeof(v));
}

template <typename T>
bool read_pod(std::ifstream& f, T& v) {
  f.read(reinterpret_cast<char*>(&v), sizeof(v));
  return f.gcount() == sizeof(v);
}

}  // namespace

EmbeddingTable::EmbeddingTable(MatrixX<float> rows, std::uint64_t vocab_hash)
    : rows_(std::move(rows)), vocab_hash_(vocab_hash) {
  if (!rows_.allFinite()) {
    fail(ErrorCategory::kIntegrity, "embedding table holds non-finite values");
  }
}

VectorX<float> synth_token_vector(std::string_view token, int dim,
                                  std::uint64_t seed) {
  VectorX<double> acc = VectorX<double>::Zero(dim);
  auto add_gram = [&](std::string_view gram) {
    Rng rng(mix_seed(fnv1a64(gram), seed));
    for (int d = 0; d < dim; ++d) acc[d] += rng.normal();
  };
  if (token.size() < 3) {
    add_gram(token);
  } else {
    for (std::size_t i = 0; i + 3 <= token.size(); ++i) {
      add_gram(token.substr(i, 3));
    }
  }
  double norm = acc.norm();
  if (norm < 1e-12) acc[0] = 1.0;  // unreachable in practice
  else acc /= norm;
  return acc.cast<float>();
}

EmbeddingTable synth_table(const BpeVocab& vocab, int dim,
                           std::uint64_t seed) {
  if (dim < 2) {
    fail(ErrorCategory::kConfig, "embedding dimension must be at least 2");
  }
  MatrixX<float> rows(static_cast<Eigen::Index>(vocab.size()), dim);
  for (TokenId id = 0; id < vocab.size(); ++id) {
    rows.row(id) = synth_token_vector(vocab.token(id), dim, seed).transpose();
  }
  return EmbeddingTable(std::move(rows), vocab.content_hash());
}

void save_table(const EmbeddingTable& table, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCategory::kConfig, "cannot open for writing: " + path);
  f.write("BPEV", 4);
  write_pod<std::uint8_t>(f, 1);
  write_pod<std::uint32_t>(f, static_cast<std::uint32_t>(table.rows()));
  write_pod<std::uint32_t>(f, static_cast<std::uint32_t>(table.dim()));
  write_pod<std::uint64_t>(f, table.vocab_hash());
  write_bytes(f, table.matrix().data(),
              sizeof(float) * static_cast<std::size_t>(table.rows()) *
                  static_cast<std::size_t>(table.dim()));
  if (!f) fail(ErrorCategory::kConfig, "write failed: " + path);
}

EmbeddingTable load_table(const std::string& path, const BpeVocab& vocab) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCategory::kConfig, "cannot open embeddings: " + path);

  char magic[4] = {};
  f.read(magic, 4);
  if (f.gcount() != 4 || std::memcmp(magic, "BPEV", 4) != 0) {
    fail(ErrorCategory::kParse, path + ": bad magic, expected BPEV");
  }
  std::uint8_t version = 0;
  if (!read_pod(f, version) || version != 1) {
    fail(ErrorCategory::kParse, path + ": unsupported version");
  }
  std::uint32_t n_rows = 0, dim = 0;
  std::uint64_t vocab_hash = 0;
  if (!read_pod(f, n_rows) || !read_pod(f, dim) || !read_pod(f, vocab_hash)) {
    fail(ErrorCategory::kParse, path + ": truncated header");
  }
  if (n_rows != vocab.size()) {
    fail(ErrorCategory::kIntegrity,
         path + ": row count " + std::to_string(n_rows) +
             " does not match vocabulary size " + std::to_string(vocab.size()));
  }
  if (vocab_hash != vocab.content_hash()) {
    fail(ErrorCategory::kIntegrity,
         path + ": vocabulary hash mismatch (table built for another vocab)");
  }
  MatrixX<float> rows(n_rows, dim);
  std::size_t want = sizeof(float) * static_cast<std::size_t>(n_rows) * dim;
  f.read(reinterpret_cast<char*>(rows.data()),
         static_cast<std::streamsize>(want));
  if (static_cast<std::size_t>(f.gcount()) != want) {
    fail(ErrorCategory::kParse,
         path + ": truncated, expected " + std::to_string(n_rows) + " rows");
  }
  char extra = 0;
  if (f.read(&extra, 1); f.gcount() != 0) {
    fail(ErrorCategory::kParse, path + ": trailing bytes after rows");
  }
  if (!rows.allFinite()) {
    fail(ErrorCategory::kIntegrity, path + ": non-finite embedding value");
  }
  return EmbeddingTable(std::move(rows), vocab_hash);
}

MatrixX<float> gather_rows(const BpeVocab& vocab, const EmbeddingTable& table,
                           std::string_view normalized_text) {
  if (table.vocab_hash() != vocab.content_hash()) {
    fail(ErrorCategory::kIntegrity,
         "embedding table does not match vocabulary");
  }
  TokenSequence seq = encode(vocab, normalized_text);
  std::vector<TokenId> kept;
  kept.reserve(seq.ids.size());
  for (TokenId id : seq.ids) {
    if (id != BpeVocab::kSpaceToken) kept.push_back(id);
  }
  MatrixX<float> rows(static_cast<Eigen::Index>(kept.size()), table.dim());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    rows.row(static_cast<Eigen::Index>(i)) = table.row(kept[i]);
  }
  return rows;
}

EntityVector embed_entity(const BpeVocab& vocab, const EmbeddingTable& table,
                          std::string_view raw_text,
                          const PoolingConfig& pooling, bool normalize) {
  std::string norm = normalize_text(raw_text);
  if (norm.empty()) {
    fail(ErrorCategory::kDegenerate, "empty metadata: text normalizes to nothing");
  }
  MatrixX<float> rows = gather_rows(vocab, table, norm);
  EntityVector pooled = pooling.kind == PoolKind::kMean
                            ? mean_pool(rows)
                            : attention_pool(pooling.pooler, rows);
  if (normalize) return l2_normalize(pooled.values);
  return pooled;
}

}  // namespace coldrec
