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

#include "coldrec/model.hpp"

#include <cstring>
#include <fstream>

namespace coldrec {

namespace {

template <typename T>
void write_pod(std::ofstream& f, T v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
bool read_pod(std::ifstream& f, T& v) {
  f.read(reinterpret_cast<char*>(&v), sizeof(v));
  return f.gcount() == sizeof(v);
}

void write_matrix(std::ofstream& f, const MatrixX<float>& m) {
  f.write(reinterpret_cast<const char*>(m.data()),
          static_cast<std::streamsize>(sizeof(float) * m.size()));
}

bool read_matrix(std::ifstream& f, MatrixX<float>& m) {
  std::streamsize want = static_cast<std::streamsize>(sizeof(float) * m.size());
  f.read(reinterpret_cast<char*>(m.data()), want);
  return f.gcount() == want;
}

}  // namespace

void save_model(const ModelState& state, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCategory::kConfig, "cannot open for writing: " + path);
  f.write("CRMS", 4);
  write_pod<std::uint8_t>(f, 1);
  write_pod<std::uint32_t>(f, state.n_users());
  write_pod<std::uint32_t>(f, state.n_items());
  write_pod<std::uint32_t>(f, static_cast<std::uint32_t>(state.dim()));
  write_pod<std::uint8_t>(f, static_cast<std::uint8_t>(state.options.init_mode));
  write_pod<std::uint8_t>(f,
                          static_cast<std::uint8_t>(state.options.content_mode));
  write_pod<std::uint8_t>(f, static_cast<std::uint8_t>(state.options.score_mode));
  write_pod<std::uint8_t>(f, static_cast<std::uint8_t>(state.options.pooling));
  write_pod<std::uint8_t>(f, state.pooler.has_value() ? 1 : 0);
  write_pod<std::uint64_t>(f, state.rng_seed);
  write_pod<std::uint64_t>(f, state.vocab_hash);
  write_matrix(f, state.user_vectors);
  write_matrix(f, state.item_vectors);
  if (state.pooler) {
    f.write(reinterpret_cast<const char*>(state.pooler->query.data()),
            static_cast<std::streamsize>(sizeof(float) *
                                         state.pooler->query.size()));
    write_pod<float>(f, state.pooler->temperature);
  }
  if (!f) fail(ErrorCategory::kConfig, "write failed: " + path);
}

ModelState load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCategory::kConfig, "cannot open model: " + path);

  char magic[4] = {};
  f.read(magic, 4);
  if (f.gcount() != 4 || std::memcmp(magic, "CRMS", 4) != 0) {
    fail(ErrorCategory::kParse, path + ": bad magic, expected CRMS");
  }
  std::uint8_t version = 0;
  if (!read_pod(f, version) || version != 1) {
    fail(ErrorCategory::kParse, path + ": unsupported version");
  }
  std::uint32_t n_users = 0, n_items = 0, dim = 0;
  std::uint8_t init_mode = 0, content_mode = 0, score_mode = 0, pooling = 0,
               has_pooler = 0;
  ModelState state;
  if (!read_pod(f, n_users) || !read_pod(f, n_items) || !read_pod(f, dim) ||
      !read_pod(f, init_mode) || !read_pod(f, content_mode) ||
      !read_pod(f, score_mode) || !read_pod(f, pooling) ||
      !read_pod(f, has_pooler) || !read_pod(f, state.rng_seed) ||
      !read_pod(f, state.vocab_hash)) {
    fail(ErrorCategory::kParse, path + ": truncated header");
  }
  if (init_mode > 2 || content_mode > 1 || score_mode > 1 || pooling > 1) {
    fail(ErrorCategory::kParse, path + ": bad mode byte");
  }
  state.options.init_mode = static_cast<InitMode>(init_mode);
  state.options.content_mode = static_cast<ContentMode>(content_mode);
  state.options.score_mode = static_cast<ScoreMode>(score_mode);
  state.options.pooling = static_cast<PoolKind>(pooling);

  state.user_vectors.resize(n_users, dim);
  state.item_vectors.resize(n_items, dim);
  if (!read_matrix(f, state.user_vectors) ||
      !read_matrix(f, state.item_vectors)) {
    fail(ErrorCategory::kParse, path + ": truncated matrices");
  }
  if (has_pooler) {
    AttentionPooler pooler;
    pooler.query.resize(dim);
    f.read(reinterpret_cast<char*>(pooler.query.data()),
           static_cast<std::streamsize>(sizeof(float) * dim));
    if (f.gcount() != static_cast<std::streamsize>(sizeof(float) * dim) ||
        !read_pod(f, pooler.temperature)) {
      fail(ErrorCategory::kParse, path + ": truncated pooler");
    }
    state.pooler = std::move(pooler);
  }
  if (!state.user_vectors.allFinite() || !state.item_vectors.allFinite()) {
    fail(ErrorCategory::kIntegrity, path + ": non-finite parameter");
  }

  state.adam.m_users = MatrixX<float>::Zero(n_users, dim);
  state.adam.v_users = MatrixX<float>::Zero(n_users, dim);
  state.adam.m_items = MatrixX<float>::Zero(n_items, dim);
  state.adam.v_items = MatrixX<float>::Zero(n_items, dim);
  state.adam.m_query = VectorX<float>::Zero(dim);
  state.adam.v_query = VectorX<float>::Zero(dim);
  return state;
}

}  // namespace coldrec
