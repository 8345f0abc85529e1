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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "coldrec/errors.hpp"

namespace coldrec {

using ItemSet = std::unordered_set<std::uint32_t>;

namespace detail {

inline void check_metric_args(const ItemSet& relevant, int k) {
  if (k < 1) fail(ErrorCategory::kConfig, "k must be at least 1");
  if (relevant.empty()) {
    fail(ErrorCategory::kDegenerate,
         "undefined metric: empty relevant set (user should be skipped)");
  }
}

}  // namespace detail

// |top-k intersect relevant| / min(|relevant|, k).
inline double recall_at_k(const std::vector<std::uint32_t>& ranked,
                          const ItemSet& relevant, int k) {
  detail::check_metric_args(relevant, k);
  int hits = 0;
  int limit = std::min<int>(k, static_cast<int>(ranked.size()));
  for (int p = 0; p < limit; ++p) hits += relevant.count(ranked[p]) > 0;
  return static_cast<double>(hits) /
         std::min<int>(static_cast<int>(relevant.size()), k);
}

// Binary-relevance DCG@k over log2(p+1) discounts, normalized by the
// ideal ranking of min(|relevant|, k) hits.
inline double ndcg_at_k(const std::vector<std::uint32_t>& ranked,
                        const ItemSet& relevant, int k) {
  detail::check_metric_args(relevant, k);
  double dcg = 0.0;
  int limit = std::min<int>(k, static_cast<int>(ranked.size()));
  for (int p = 1; p <= limit; ++p) {
    if (relevant.count(ranked[p - 1])) {
      dcg += 1.0 / std::log2(static_cast<double>(p) + 1.0);
    }
  }
  double idcg = 0.0;
  int ideal = std::min<int>(static_cast<int>(relevant.size()), k);
  for (int p = 1; p <= ideal; ++p) {
    idcg += 1.0 / std::log2(static_cast<double>(p) + 1.0);
  }
  return dcg / idcg;
}

inline double hit_rate_at_k(const std::vector<std::uint32_t>& ranked,
                            const ItemSet& relevant, int k) {
  detail::check_metric_args(relevant, k);
  int limit = std::min<int>(k, static_cast<int>(ranked.size()));
  for (int p = 0; p < limit; ++p) {
    if (relevant.count(ranked[p])) return 1.0;
  }
  return 0.0;
}

// Gini coefficient of per-item exposure counts over the catalog; items
// never recommended count as zero. 0 means perfectly equal exposure.
inline double exposure_gini(
    const std::vector<std::vector<std::uint32_t>>& recommendation_lists,
    std::uint32_t catalog_size) {
  if (catalog_size == 0) {
    fail(ErrorCategory::kConfig, "catalog size must be positive");
  }
  std::vector<std::int64_t> counts(catalog_size, 0);
  for (const auto& list : recommendation_lists) {
    for (std::uint32_t item : list) {
      if (item >= catalog_size) {
        fail(ErrorCategory::kIntegrity, "recommended item outside catalog");
      }
      counts[item] += 1;
    }
  }
  std::sort(counts.begin(), counts.end());
  double total = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    total += static_cast<double>(counts[i]);
    weighted += static_cast<double>(i + 1) * static_cast<double>(counts[i]);
  }
  if (total <= 0.0) return 0.0;
  const double n = static_cast<double>(counts.size());
  return 2.0 * weighted / (n * total) - (n + 1.0) / n;
}

}  // namespace coldrec
