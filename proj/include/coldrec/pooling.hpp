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

#include <Eigen/Core>

#include "coldrec/errors.hpp"

namespace coldrec {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic,
                              Eigen::RowMajor>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Single-query attention pooler over token embeddings: weights are
// softmax(q . e_i / temperature). Parameter count is h + 1.
template <typename Scalar>
struct AttentionPoolerT {
  VectorX<Scalar> query;
  Scalar temperature = Scalar(1);
};
using AttentionPooler = AttentionPoolerT<float>;

template <typename Scalar>
struct EntityVectorT {
  VectorX<Scalar> values;
  bool normalized = false;
};
using EntityVector = EntityVectorT<float>;

// Arithmetic mean of the rows. Rows are token embeddings.
template <typename Derived>
EntityVectorT<typename Derived::Scalar> mean_pool(
    const Eigen::MatrixBase<Derived>& embeddings) {
  if (embeddings.rows() == 0) {
    fail(ErrorCategory::kDegenerate, "empty metadata: nothing to pool");
  }
  EntityVectorT<typename Derived::Scalar> out;
  out.values = embeddings.colwise().mean().transpose();
  return out;
}

// Softmax weights the pooler assigns to each row.
template <typename Scalar, typename Derived>
VectorX<Scalar> attention_weights(const AttentionPoolerT<Scalar>& pooler,
                                  const Eigen::MatrixBase<Derived>& embeddings) {
  if (embeddings.rows() == 0) {
    fail(ErrorCategory::kDegenerate, "empty metadata: nothing to pool");
  }
  if (pooler.temperature <= Scalar(0)) {
    fail(ErrorCategory::kConfig, "attention temperature must be positive");
  }
  VectorX<Scalar> logits =
      (embeddings * pooler.query) / pooler.temperature;
  VectorX<Scalar> w = (logits.array() - logits.maxCoeff()).exp();
  return w / w.sum();
}

// Convex combination of the rows under the pooler's softmax weights.
template <typename Scalar, typename Derived>
EntityVectorT<Scalar> attention_pool(
    const AttentionPoolerT<Scalar>& pooler,
    const Eigen::MatrixBase<Derived>& embeddings) {
  VectorX<Scalar> w = attention_weights(pooler, embeddings);
  EntityVectorT<Scalar> out;
  out.values = embeddings.transpose() * w;
  return out;
}

template <typename Derived>
EntityVectorT<typename Derived::Scalar> l2_normalize(
    const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  Scalar n = v.norm();
  if (n < Scalar(1e-12)) {
    fail(ErrorCategory::kDegenerate, "degenerate vector: norm below 1e-12");
  }
  EntityVectorT<Scalar> out;
  out.values = v / n;
  out.normalized = true;
  return out;
}

}  // namespace coldrec
