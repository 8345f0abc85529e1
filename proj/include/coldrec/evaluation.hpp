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
#include <thread>
#include <vector>

#include "coldrec/data.hpp"
#include "coldrec/metrics.hpp"
#include "coldrec/model.hpp"

namespace coldrec {

// Disjoint warm/cold partition: the selected cold items take all of their
// interactions with them into the test set.
struct ColdStartSplit {
  std::vector<Interaction> train;
  std::vector<Interaction> test;
  std::vector<std::uint32_t> cold_items;  // sorted
  std::vector<std::uint32_t> cold_users;  // sorted; users with no train rows
  std::uint64_t seed = 0;
  double ratio = 0.1;
};

ColdStartSplit make_cold_split(const Dataset& dataset, double ratio,
                               std::uint64_t seed);
std::uint64_t split_hash(const ColdStartSplit& split);
void validate_split(const Dataset& dataset, const ColdStartSplit& split);

struct TrialMetrics {
  double recall = 0.0;
  double ndcg = 0.0;
  double hit_rate = 0.0;
  double exposure_gini = 0.0;
  int users_evaluated = 0;
  int users_skipped = 0;
};

struct EvalOptions {
  int k = 10;
  // Candidate pool is the cold items by default, which isolates the
  // cold-start question; true widens it to the whole catalog.
  bool full_catalog_pool = false;
  int threads = 1;
};

// Ranks every test user's candidate pool with cold_vector-derived item
// vectors and averages the metrics. Deterministic for a fixed thread
// count: workers own contiguous user ranges and partials merge in order.
template <typename Scalar>
TrialMetrics evaluate(const ModelStateT<Scalar>& state,
                      const ContentContextT<Scalar>& ctx,
                      const Dataset& dataset, const ColdStartSplit& split,
                      const EvalOptions& options);

struct EvalReport {
  InitMode mode = InitMode::kRandom;
  std::vector<TrialMetrics> per_trial;
  TrialMetrics mean;
  TrialMetrics stddev;  // sample standard deviation over trials
};

struct TrialsConfig {
  TrainConfig train;
  ModelOptions options;  // init_mode is overridden per compared mode
  double ratio = 0.1;
  int k = 10;
  int trials = 5;
  std::uint64_t base_seed = 42;
  bool full_catalog_pool = false;
  int threads = 1;
};

struct ComparisonReport {
  std::vector<EvalReport> modes;
  std::vector<std::uint64_t> trial_seeds;
  std::vector<std::uint64_t> split_hashes;
  TrialsConfig config;
};

// Paired design: trial t derives every seed from base_seed + t, so each
// init mode sees the identical split, init draws and sampling stream.
ComparisonReport run_trials(const Dataset& dataset, const BpeVocab& vocab,
                            const EmbeddingTable& table,
                            const std::vector<InitMode>& modes,
                            const TrialsConfig& config);

// Table-shaped summary of a comparison, one mode per row.
std::string format_comparison(const ComparisonReport& report);

// Full machine-readable report; embeds config and seeds so any trial can
// be reproduced.
std::string comparison_to_json(const ComparisonReport& report);
std::string trial_to_json(const TrialMetrics& metrics, const EvalOptions& opts,
                          std::uint64_t seed);

struct ProjectedPoint {
  double x = 0.0;
  double y = 0.0;
  std::string label;
};

// PCA onto the top two principal components with a deterministic sign
// convention (largest-magnitude loading positive).
std::vector<ProjectedPoint> project_2d(const MatrixX<double>& points,
                                       const std::vector<std::string>& labels);
std::vector<ProjectedPoint> project_2d(const MatrixX<float>& points,
                                       const std::vector<std::string>& labels);

void save_projection(const std::vector<ProjectedPoint>& points,
                     const std::string& path);

// --- evaluate implementation ------------------------------------------------

template <typename Scalar>
TrialMetrics evaluate(const ModelStateT<Scalar>& state,
                      const ContentContextT<Scalar>& ctx,
                      const Dataset& dataset, const ColdStartSplit& split,
                      const EvalOptions& options) {
  if (options.k < 1) fail(ErrorCategory::kConfig, "k must be at least 1");

  std::vector<std::uint32_t> pool;
  if (options.full_catalog_pool) {
    pool.resize(dataset.n_items);
    for (std::uint32_t i = 0; i < dataset.n_items; ++i) pool[i] = i;
  } else {
    pool = split.cold_items;
  }
  const std::uint32_t pool_size = static_cast<std::uint32_t>(pool.size());
  if (pool_size == 0) {
    fail(ErrorCategory::kDegenerate, "empty evaluation: no candidate items");
  }

  // Candidate vectors come from the cold-start serving path; for warm
  // items in a widened pool the trained rows are used directly.
  ItemSet cold_set(split.cold_items.begin(), split.cold_items.end());
  MatrixX<Scalar> cand(pool_size, ctx.dim);
  for (std::uint32_t c = 0; c < pool_size; ++c) {
    std::uint32_t item = pool[c];
    if (cold_set.count(item)) {
      cand.row(c) =
          cold_vector(state, ctx, dataset.item_text[item],
                      detail::entity_fallback_seed(state.rng_seed, true, item))
              .values.transpose();
    } else {
      cand.row(c) = state.item_vectors.row(item);
    }
  }
  const bool cosine = state.options.score_mode == ScoreMode::kCosine;
  VectorX<Scalar> cand_norms;
  if (cosine) {
    cand_norms = cand.rowwise().norm();
    for (std::uint32_t c = 0; c < pool_size; ++c) {
      if (cand_norms[c] < Scalar(1e-12)) cand_norms[c] = Scalar(1);
    }
  }

  // Per-user relevant sets, restricted to the pool.
  ItemSet pool_set(pool.begin(), pool.end());
  std::vector<std::vector<std::uint32_t>> relevant(dataset.n_users);
  for (const Interaction& row : split.test) {
    if (pool_set.count(row.item)) relevant[row.user].push_back(row.item);
  }
  std::vector<std::uint32_t> test_users;
  for (const Interaction& row : split.test) test_users.push_back(row.user);
  std::sort(test_users.begin(), test_users.end());
  test_users.erase(std::unique(test_users.begin(), test_users.end()),
                   test_users.end());

  ItemSet cold_users(split.cold_users.begin(), split.cold_users.end());

  struct Partial {
    double recall = 0.0, ndcg = 0.0, hit = 0.0;
    int evaluated = 0, skipped = 0;
    std::vector<std::vector<std::uint32_t>> lists;
  };

  auto run_range = [&](std::size_t begin, std::size_t end, Partial& out) {
    for (std::size_t ui = begin; ui < end; ++ui) {
      std::uint32_t user = test_users[ui];
      if (relevant[user].empty()) {
        ++out.skipped;
        continue;
      }
      VectorX<Scalar> uvec;
      if (cold_users.count(user)) {
        std::string text = dataset.user_text[user].value_or("");
        uvec = cold_vector(state, ctx, text,
                           detail::entity_fallback_seed(state.rng_seed, false,
                                                        user))
                   .values;
      } else {
        uvec = state.user_vectors.row(user).transpose();
      }
      if (cosine) {
        Scalar nu = uvec.norm();
        if (nu > Scalar(1e-12)) uvec /= nu;
      }
      VectorX<Scalar> scores = cand * uvec;
      if (cosine) scores.array() /= cand_norms.array();

      // k-bounded selection over (score desc, pool index asc).
      using Entry = std::pair<Scalar, std::uint32_t>;
      auto better = [](const Entry& a, const Entry& b) {
        return a.first > b.first ||
               (a.first == b.first && a.second < b.second);
      };
      std::vector<Entry> heap;
      heap.reserve(options.k);
      auto worse_on_top = [&](const Entry& a, const Entry& b) {
        return better(a, b);
      };
      for (std::uint32_t c = 0; c < pool_size; ++c) {
        Entry e{scores[c], c};
        if (heap.size() < static_cast<std::size_t>(options.k)) {
          heap.push_back(e);
          std::push_heap(heap.begin(), heap.end(), worse_on_top);
        } else if (better(e, heap.front())) {
          std::pop_heap(heap.begin(), heap.end(), worse_on_top);
          heap.back() = e;
          std::push_heap(heap.begin(), heap.end(), worse_on_top);
        }
      }
      std::sort(heap.begin(), heap.end(), better);
      std::vector<std::uint32_t> ranked(heap.size());
      for (std::size_t i = 0; i < heap.size(); ++i) {
        ranked[i] = pool[heap[i].second];
      }

      ItemSet rel(relevant[user].begin(), relevant[user].end());
      out.recall += recall_at_k(ranked, rel, options.k);
      out.ndcg += ndcg_at_k(ranked, rel, options.k);
      out.hit += hit_rate_at_k(ranked, rel, options.k);
      ++out.evaluated;

      // exposure over pool indices
      std::vector<std::uint32_t> pool_ranked(heap.size());
      for (std::size_t i = 0; i < heap.size(); ++i) {
        pool_ranked[i] = heap[i].second;
      }
      out.lists.push_back(std::move(pool_ranked));
    }
  };

  int threads = std::max(1, options.threads);
  threads = std::min<int>(threads, std::max<std::size_t>(test_users.size(), 1));
  std::vector<Partial> partials(threads);
  if (threads == 1) {
    run_range(0, test_users.size(), partials[0]);
  } else {
    std::vector<std::thread> workers;
    std::size_t chunk = (test_users.size() + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      std::size_t begin = std::min(test_users.size(), t * chunk);
      std::size_t end = std::min(test_users.size(), begin + chunk);
      workers.emplace_back(run_range, begin, end, std::ref(partials[t]));
    }
    for (auto& w : workers) w.join();
  }

  TrialMetrics out;
  std::vector<std::vector<std::uint32_t>> all_lists;
  for (const Partial& p : partials) {
    out.recall += p.recall;
    out.ndcg += p.ndcg;
    out.hit_rate += p.hit;
    out.users_evaluated += p.evaluated;
    out.users_skipped += p.skipped;
    for (const auto& l : p.lists) all_lists.push_back(l);
  }
  if (out.users_evaluated == 0) {
    fail(ErrorCategory::kDegenerate, "empty evaluation: no evaluable users");
  }
  out.recall /= out.users_evaluated;
  out.ndcg /= out.users_evaluated;
  out.hit_rate /= out.users_evaluated;
  out.exposure_gini = exposure_gini(all_lists, pool_size);
  return out;
}

}  // namespace coldrec
