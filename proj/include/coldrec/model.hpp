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
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "coldrec/data.hpp"
#include "coldrec/embedding.hpp"
#include "coldrec/errors.hpp"
#include "coldrec/pooling.hpp"
#include "coldrec/rng.hpp"
#include "coldrec/tokenizer.hpp"

namespace coldrec {

enum class InitMode { kRandom, kWordAvg, kBpe };
enum class ContentMode { kInit, kTied };
enum class ScoreMode { kDot, kCosine };

const char* to_string(InitMode mode);

struct TrainConfig {
  int epochs = 50;
  double learning_rate = 0.01;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int negatives_per_positive = 1;
  int batch_size = 1;
  double l2_weight = 1e-5;
  std::uint64_t seed = 0;
};

struct ModelOptions {
  InitMode init_mode = InitMode::kBpe;
  ContentMode content_mode = ContentMode::kInit;
  ScoreMode score_mode = ScoreMode::kDot;
  PoolKind pooling = PoolKind::kMean;
};

// Pre-resolved metadata: token rows and whole words per entity, plus the
// token-embedding matrix cast to the working scalar. Built once per
// (dataset, vocab, table) and shared read-only.
template <typename Scalar>
struct ContentContextT {
  std::uint32_t n_users = 0;
  std::uint32_t n_items = 0;
  Eigen::Index dim = 0;
  std::uint64_t vocab_hash = 0;
  const BpeVocab* vocab = nullptr;
  MatrixX<Scalar> table;
  std::vector<std::vector<TokenId>> item_tokens;
  std::vector<std::vector<TokenId>> user_tokens;
  std::vector<std::vector<std::string>> item_words;
  std::vector<std::vector<std::string>> user_words;
};
using ContentContext = ContentContextT<float>;

template <typename Scalar>
struct AdamStateT {
  MatrixX<Scalar> m_users, v_users, m_items, v_items;
  VectorX<Scalar> m_query, v_query;
  Scalar m_log_temp = Scalar(0);
  Scalar v_log_temp = Scalar(0);
  std::int64_t step = 0;
};

template <typename Scalar>
struct ModelStateT {
  MatrixX<Scalar> user_vectors;  // |U| x h
  MatrixX<Scalar> item_vectors;  // |I| x h
  std::optional<AttentionPoolerT<Scalar>> pooler;
  AdamStateT<Scalar> adam;
  ModelOptions options;
  std::uint64_t rng_seed = 0;
  std::uint64_t vocab_hash = 0;

  Eigen::Index dim() const { return user_vectors.cols(); }
  std::uint32_t n_users() const {
    return static_cast<std::uint32_t>(user_vectors.rows());
  }
  std::uint32_t n_items() const {
    return static_cast<std::uint32_t>(item_vectors.rows());
  }
};
using ModelState = ModelStateT<float>;

// --- content context -------------------------------------------------------

template <typename Scalar>
ContentContextT<Scalar> build_content_context(const Dataset& dataset,
                                              const BpeVocab& vocab,
                                              const EmbeddingTable& table) {
  if (table.vocab_hash() != vocab.content_hash()) {
    fail(ErrorCategory::kIntegrity,
         "embedding table does not match vocabulary");
  }
  ContentContextT<Scalar> ctx;
  ctx.n_users = dataset.n_users;
  ctx.n_items = dataset.n_items;
  ctx.dim = table.dim();
  ctx.vocab_hash = vocab.content_hash();
  ctx.vocab = &vocab;
  ctx.table = table.matrix().template cast<Scalar>();

  auto resolve = [&](const std::string& raw, std::vector<TokenId>& tokens,
                     std::vector<std::string>& words) {
    std::string norm = normalize_text(raw);
    if (norm.empty()) return;
    for (TokenId id : encode(vocab, norm).ids) {
      if (id != BpeVocab::kSpaceToken) tokens.push_back(id);
    }
    std::size_t start = 0;
    while (start <= norm.size()) {
      std::size_t end = norm.find(' ', start);
      if (end == std::string::npos) end = norm.size();
      if (end > start) words.push_back(norm.substr(start, end - start));
      start = end + 1;
    }
  };

  ctx.item_tokens.resize(dataset.n_items);
  ctx.item_words.resize(dataset.n_items);
  for (std::uint32_t i = 0; i < dataset.n_items; ++i) {
    resolve(dataset.item_text[i], ctx.item_tokens[i], ctx.item_words[i]);
  }
  ctx.user_tokens.resize(dataset.n_users);
  ctx.user_words.resize(dataset.n_users);
  for (std::uint32_t u = 0; u < dataset.n_users; ++u) {
    if (dataset.user_text[u]) {
      resolve(*dataset.user_text[u], ctx.user_tokens[u], ctx.user_words[u]);
    }
  }
  return ctx;
}

// --- initialization -----------------------------------------------------------

namespace detail {

template <typename Scalar>
VectorX<Scalar> seeded_gaussian(std::uint64_t seed, Eigen::Index dim,
                                double scale) {
  Rng rng(seed);
  VectorX<Scalar> v(dim);
  for (Eigen::Index d = 0; d < dim; ++d) {
    v[d] = static_cast<Scalar>(rng.normal() * scale);
  }
  return v;
}

inline std::uint64_t entity_fallback_seed(std::uint64_t model_seed, bool item,
                                          std::uint32_t id) {
  return mix_seed(model_seed, (item ? 0x100000000ULL : 0x200000000ULL) | id);
}

template <typename Scalar>
VectorX<Scalar> pooled_tokens(const ContentContextT<Scalar>& ctx,
                              const std::vector<TokenId>& tokens,
                              PoolKind pooling,
                              const AttentionPoolerT<Scalar>* pooler) {
  MatrixX<Scalar> rows(static_cast<Eigen::Index>(tokens.size()), ctx.dim);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    rows.row(static_cast<Eigen::Index>(i)) = ctx.table.row(tokens[i]);
  }
  if (pooling == PoolKind::kAttention && pooler != nullptr) {
    return attention_pool(*pooler, rows).values;
  }
  return mean_pool(rows).values;
}

// Mean of whole-word rows; words that are not a single vocabulary token
// contribute a zero vector.
template <typename Scalar>
VectorX<Scalar> word_average(const ContentContextT<Scalar>& ctx,
                             const std::vector<std::string>& words) {
  VectorX<Scalar> acc = VectorX<Scalar>::Zero(ctx.dim);
  for (const std::string& word : words) {
    if (auto id = ctx.vocab->find(word)) {
      acc += ctx.table.row(*id).transpose();
    }
  }
  return acc / static_cast<Scalar>(words.size());
}

// Semantic prior (or seeded random fallback) for one entity under the
// model's init mode. init_model and cold_vector share this path so a cold
// entity's recomputed vector is bit-identical to its initialized row.
template <typename Scalar>
VectorX<Scalar> entity_prior(const ContentContextT<Scalar>& ctx,
                             const ModelOptions& options,
                             const AttentionPoolerT<Scalar>* pooler,
                             const std::vector<TokenId>& tokens,
                             const std::vector<std::string>& words,
                             std::uint64_t fallback_seed) {
  const double scale = 0.1 / std::sqrt(static_cast<double>(ctx.dim));
  switch (options.init_mode) {
    case InitMode::kRandom:
      return seeded_gaussian<Scalar>(fallback_seed, ctx.dim, scale);
    case InitMode::kWordAvg:
      if (words.empty()) {
        return seeded_gaussian<Scalar>(fallback_seed, ctx.dim, scale);
      }
      return word_average(ctx, words);
    case InitMode::kBpe:
      if (tokens.empty()) {
        return seeded_gaussian<Scalar>(fallback_seed, ctx.dim, scale);
      }
      return pooled_tokens(ctx, tokens, options.pooling, pooler);
  }
  fail(ErrorCategory::kConfig, "unknown init mode");
}

}  // namespace detail

template <typename Scalar>
ModelStateT<Scalar> init_model(const ContentContextT<Scalar>& ctx,
                               const ModelOptions& options,
                               std::uint64_t seed) {
  ModelStateT<Scalar> state;
  state.options = options;
  state.rng_seed = seed;
  state.vocab_hash = ctx.vocab_hash;
  state.user_vectors.resize(ctx.n_users, ctx.dim);
  state.item_vectors.resize(ctx.n_items, ctx.dim);

  if (options.pooling == PoolKind::kAttention ||
      options.content_mode == ContentMode::kTied) {
    AttentionPoolerT<Scalar> pooler;
    pooler.query = detail::seeded_gaussian<Scalar>(mix_seed(seed, 0x9001),
                                                   ctx.dim, 0.1);
    pooler.temperature = Scalar(1);
    state.pooler = std::move(pooler);
  }
  const AttentionPoolerT<Scalar>* pooler =
      state.pooler ? &*state.pooler : nullptr;

  for (std::uint32_t u = 0; u < ctx.n_users; ++u) {
    state.user_vectors.row(u) =
        detail::entity_prior(ctx, options, pooler, ctx.user_tokens[u],
                             ctx.user_words[u],
                             detail::entity_fallback_seed(seed, false, u))
            .transpose();
  }
  for (std::uint32_t i = 0; i < ctx.n_items; ++i) {
    state.item_vectors.row(i) =
        detail::entity_prior(ctx, options, pooler, ctx.item_tokens[i],
                             ctx.item_words[i],
                             detail::entity_fallback_seed(seed, true, i))
            .transpose();
  }

  state.adam.m_users = MatrixX<Scalar>::Zero(ctx.n_users, ctx.dim);
  state.adam.v_users = MatrixX<Scalar>::Zero(ctx.n_users, ctx.dim);
  state.adam.m_items = MatrixX<Scalar>::Zero(ctx.n_items, ctx.dim);
  state.adam.v_items = MatrixX<Scalar>::Zero(ctx.n_items, ctx.dim);
  state.adam.m_query = VectorX<Scalar>::Zero(ctx.dim);
  state.adam.v_query = VectorX<Scalar>::Zero(ctx.dim);
  return state;
}

// --- scoring ------------------------------------------------------------------

template <typename Scalar>
Scalar score(const ModelStateT<Scalar>& state, std::uint32_t user,
             std::uint32_t item) {
  if (user >= state.n_users() || item >= state.n_items()) {
    fail(ErrorCategory::kIntegrity, "score: entity id out of range");
  }
  auto u = state.user_vectors.row(user);
  auto v = state.item_vectors.row(item);
  if (state.options.score_mode == ScoreMode::kDot) return u.dot(v);
  Scalar nu = u.norm();
  Scalar nv = v.norm();
  if (nu < Scalar(1e-12) || nv < Scalar(1e-12)) {
    fail(ErrorCategory::kDegenerate,
         "cosine score over a degenerate zero vector");
  }
  return u.dot(v) / (nu * nv);
}

// Numerically stable -log sigmoid(r_pos - r_neg).
inline double bpr_loss(double r_pos, double r_neg) {
  double x = -(r_pos - r_neg);  // softplus argument
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

// Uniform over items absent from `positives` (sorted ascending).
// Deterministic in (state.rng_seed, step).
template <typename Scalar>
std::uint32_t sample_negative(const ModelStateT<Scalar>& state,
                              const std::vector<std::uint32_t>& positives,
                              std::uint64_t step) {
  const std::uint32_t n_items = state.n_items();
  if (positives.size() >= n_items) {
    fail(ErrorCategory::kDegenerate,
         "negative sampling exhausted: user interacted with every item");
  }
  Rng rng(mix_seed(state.rng_seed, step));
  auto is_positive = [&](std::uint32_t item) {
    return std::binary_search(positives.begin(), positives.end(), item);
  };
  std::uint32_t cand = 0;
  for (int attempt = 0; attempt < 64; ++attempt) {
    cand = static_cast<std::uint32_t>(rng.below(n_items));
    if (!is_positive(cand)) return cand;
  }
  for (std::uint32_t offset = 0; offset < n_items; ++offset) {
    std::uint32_t c = (cand + offset) % n_items;
    if (!is_positive(c)) return c;
  }
  fail(ErrorCategory::kDegenerate, "negative sampling exhausted");
}

// --- BPR triple forward/backward -----------------------------------------------

// Whether an item's vector is computed from metadata rather than stored
// as a free row.
template <typename Scalar>
bool item_is_computed(const ModelStateT<Scalar>& state,
                      const ContentContextT<Scalar>& ctx, std::uint32_t item) {
  return state.options.content_mode == ContentMode::kTied &&
         !ctx.item_tokens[item].empty();
}

template <typename Scalar>
VectorX<Scalar> item_vector(const ModelStateT<Scalar>& state,
                            const ContentContextT<Scalar>& ctx,
                            std::uint32_t item) {
  if (item_is_computed(state, ctx, item)) {
    const AttentionPoolerT<Scalar>* pooler =
        state.pooler ? &*state.pooler : nullptr;
    return detail::pooled_tokens(ctx, ctx.item_tokens[item],
                                 state.options.pooling, pooler);
  }
  return state.item_vectors.row(item).transpose();
}

template <typename Scalar>
struct TripleGrad {
  double loss = 0.0;
  VectorX<Scalar> d_user;
  VectorX<Scalar> d_pos;    // free-row gradient; empty when pos is computed
  VectorX<Scalar> d_neg;    // free-row gradient; empty when neg is computed
  VectorX<Scalar> d_query;  // empty unless a computed item uses attention
  Scalar d_temperature = Scalar(0);
};

// One (user, positive, negative) BPR term with the margin taken as a dot
// product, plus L2 weight decay on the free parameters it touches.
template <typename Scalar>
double triple_objective(const ModelStateT<Scalar>& state,
                        const ContentContextT<Scalar>& ctx, std::uint32_t user,
                        std::uint32_t pos, std::uint32_t neg, double l2) {
  VectorX<Scalar> u = state.user_vectors.row(user).transpose();
  VectorX<Scalar> vp = item_vector(state, ctx, pos);
  VectorX<Scalar> vn = item_vector(state, ctx, neg);
  double loss = bpr_loss(static_cast<double>(u.dot(vp)),
                         static_cast<double>(u.dot(vn)));
  loss += 0.5 * l2 * static_cast<double>(u.squaredNorm());
  if (!item_is_computed(state, ctx, pos)) {
    loss += 0.5 * l2 * static_cast<double>(vp.squaredNorm());
  }
  if (!item_is_computed(state, ctx, neg)) {
    loss += 0.5 * l2 * static_cast<double>(vn.squaredNorm());
  }
  if (state.options.content_mode == ContentMode::kTied && state.pooler &&
      state.options.pooling == PoolKind::kAttention) {
    loss += 0.5 * l2 * static_cast<double>(state.pooler->query.squaredNorm());
  }
  return loss;
}

namespace detail {

// Backpropagates an upstream gradient on a pooled item vector into the
// attention query and temperature.
template <typename Scalar>
void attention_backward(const ContentContextT<Scalar>& ctx,
                        const AttentionPoolerT<Scalar>& pooler,
                        const std::vector<TokenId>& tokens,
                        const VectorX<Scalar>& upstream,
                        VectorX<Scalar>& d_query, Scalar& d_temperature) {
  const Eigen::Index n = static_cast<Eigen::Index>(tokens.size());
  MatrixX<Scalar> rows(n, ctx.dim);
  for (Eigen::Index i = 0; i < n; ++i) rows.row(i) = ctx.table.row(tokens[i]);

  VectorX<Scalar> logits = (rows * pooler.query) / pooler.temperature;
  VectorX<Scalar> w = (logits.array() - logits.maxCoeff()).exp();
  w /= w.sum();
  VectorX<Scalar> pooled = rows.transpose() * w;

  // d loss / d logit_k = w_k * (e_k - pooled) . upstream
  VectorX<Scalar> token_gain = rows * upstream;  // e_k . upstream
  Scalar pooled_gain = pooled.dot(upstream);
  VectorX<Scalar> d_logits =
      w.array() * (token_gain.array() - pooled_gain);

  d_query.noalias() += rows.transpose() * d_logits / pooler.temperature;
  d_temperature += -(d_logits.dot(logits)) / pooler.temperature;
}

}  // namespace detail

template <typename Scalar>
TripleGrad<Scalar> triple_backward(const ModelStateT<Scalar>& state,
                                   const ContentContextT<Scalar>& ctx,
                                   std::uint32_t user, std::uint32_t pos,
                                   std::uint32_t neg, double l2) {
  TripleGrad<Scalar> g;
  VectorX<Scalar> u = state.user_vectors.row(user).transpose();
  VectorX<Scalar> vp = item_vector(state, ctx, pos);
  VectorX<Scalar> vn = item_vector(state, ctx, neg);

  double margin = static_cast<double>(u.dot(vp)) - static_cast<double>(u.dot(vn));
  g.loss = bpr_loss(static_cast<double>(u.dot(vp)),
                    static_cast<double>(u.dot(vn)));
  // d bpr / d margin = -sigmoid(-margin)
  Scalar slope = static_cast<Scalar>(-1.0 / (1.0 + std::exp(margin)));

  g.d_user = slope * (vp - vn) + static_cast<Scalar>(l2) * u;
  g.loss += 0.5 * l2 * static_cast<double>(u.squaredNorm());

  const bool pos_computed = item_is_computed(state, ctx, pos);
  const bool neg_computed = item_is_computed(state, ctx, neg);
  const bool train_pooler = state.pooler.has_value() &&
                            state.options.content_mode == ContentMode::kTied &&
                            state.options.pooling == PoolKind::kAttention;
  if (train_pooler) {
    g.d_query = VectorX<Scalar>::Zero(ctx.dim);
  }

  VectorX<Scalar> d_vp = slope * u;
  VectorX<Scalar> d_vn = -slope * u;
  if (pos_computed) {
    if (train_pooler) {
      detail::attention_backward(ctx, *state.pooler, ctx.item_tokens[pos],
                                 d_vp, g.d_query, g.d_temperature);
    }
  } else {
    g.d_pos = d_vp + static_cast<Scalar>(l2) * vp;
    g.loss += 0.5 * l2 * static_cast<double>(vp.squaredNorm());
  }
  if (neg_computed) {
    if (train_pooler) {
      detail::attention_backward(ctx, *state.pooler, ctx.item_tokens[neg],
                                 d_vn, g.d_query, g.d_temperature);
    }
  } else {
    g.d_neg = d_vn + static_cast<Scalar>(l2) * vn;
    g.loss += 0.5 * l2 * static_cast<double>(vn.squaredNorm());
  }
  if (train_pooler) {
    g.d_query += static_cast<Scalar>(l2) * state.pooler->query;
    g.loss += 0.5 * l2 * static_cast<double>(state.pooler->query.squaredNorm());
  }
  return g;
}

// --- training -------------------------------------------------------------------

namespace detail {

template <typename Scalar>
struct AdamParams {
  Scalar lr, beta1, beta2, eps;
  Scalar bias1, bias2;  // 1 - beta^t for the current step
};

template <typename Scalar, typename Vec, typename MomVec>
void adam_update(const AdamParams<Scalar>& p, const Vec& grad, MomVec&& m,
                 MomVec&& v, Vec& param) {
  m = p.beta1 * m + (Scalar(1) - p.beta1) * grad;
  v = p.beta2 * v.array().matrix() +
      (Scalar(1) - p.beta2) * grad.array().square().matrix();
  auto m_hat = m / p.bias1;
  auto v_hat = v / p.bias2;
  param -= p.lr * (m_hat.array() / (v_hat.array().sqrt() + p.eps)).matrix();
}

}  // namespace detail

// Runs seeded BPR epochs over the training interactions and returns the
// per-epoch mean loss trace. Cold entities never appear in the positives,
// so their rows are untouched and keep the init-mode prior.
template <typename Scalar>
std::vector<double> train(ModelStateT<Scalar>& state,
                          const ContentContextT<Scalar>& ctx,
                          const std::vector<Interaction>& train_interactions,
                          const TrainConfig& config) {
  if (config.epochs < 1) {
    fail(ErrorCategory::kConfig, "epochs must be at least 1");
  }
  if (config.learning_rate < 0.0 || config.adam_beta1 < 0.0 ||
      config.adam_beta1 >= 1.0 || config.adam_beta2 < 0.0 ||
      config.adam_beta2 >= 1.0 || config.batch_size < 1 ||
      config.negatives_per_positive < 1 || config.l2_weight < 0.0) {
    fail(ErrorCategory::kConfig, "invalid training configuration");
  }
  if (train_interactions.empty()) {
    fail(ErrorCategory::kDegenerate, "no training interactions");
  }

  std::vector<std::vector<std::uint32_t>> positives(state.n_users());
  // Items with a training interaction. Rows of the rest stay frozen: cold
  // entities used as sampled negatives contribute to the forward pass but
  // receive no updates and keep their prior.
  std::vector<std::uint8_t> item_warm(state.n_items(), 0);
  for (const Interaction& row : train_interactions) {
    if (row.user >= state.n_users() || row.item >= state.n_items()) {
      fail(ErrorCategory::kIntegrity, "training interaction id out of range");
    }
    positives[row.user].push_back(row.item);
    item_warm[row.item] = 1;
  }
  for (auto& p : positives) {
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
  }

  const Scalar l2 = static_cast<Scalar>(config.l2_weight);
  const bool train_pooler = state.pooler.has_value() &&
                            state.options.content_mode == ContentMode::kTied &&
                            state.options.pooling == PoolKind::kAttention;

  std::vector<std::uint32_t> order(train_interactions.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<double> trace;
  trace.reserve(config.epochs);
  std::uint64_t neg_step = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng shuffle_rng(mix_seed(config.seed, 0xE70C00ULL + epoch));
    shuffle_rng.shuffle(order);

    double epoch_loss = 0.0;
    std::size_t epoch_triples = 0;

    std::unordered_map<std::uint32_t, VectorX<Scalar>> user_grads, item_grads;
    VectorX<Scalar> query_grad;
    Scalar temp_grad = Scalar(0);
    if (train_pooler) query_grad = VectorX<Scalar>::Zero(ctx.dim);
    std::size_t batch_triples = 0;

    auto flush_batch = [&]() {
      if (batch_triples == 0) return;
      const Scalar inv = Scalar(1) / static_cast<Scalar>(batch_triples);
      state.adam.step += 1;
      detail::AdamParams<Scalar> p;
      p.lr = static_cast<Scalar>(config.learning_rate);
      p.beta1 = static_cast<Scalar>(config.adam_beta1);
      p.beta2 = static_cast<Scalar>(config.adam_beta2);
      p.eps = static_cast<Scalar>(config.adam_epsilon);
      p.bias1 = Scalar(1) - static_cast<Scalar>(std::pow(
                                config.adam_beta1, state.adam.step));
      p.bias2 = Scalar(1) - static_cast<Scalar>(std::pow(
                                config.adam_beta2, state.adam.step));
      for (auto& [uid, grad] : user_grads) {
        VectorX<Scalar> g = grad * inv;
        VectorX<Scalar> row = state.user_vectors.row(uid).transpose();
        detail::adam_update(p, g,
                            state.adam.m_users.row(uid).transpose(),
                            state.adam.v_users.row(uid).transpose(), row);
        state.user_vectors.row(uid) = row.transpose();
      }
      for (auto& [iid, grad] : item_grads) {
        VectorX<Scalar> g = grad * inv;
        VectorX<Scalar> row = state.item_vectors.row(iid).transpose();
        detail::adam_update(p, g,
                            state.adam.m_items.row(iid).transpose(),
                            state.adam.v_items.row(iid).transpose(), row);
        state.item_vectors.row(iid) = row.transpose();
      }
      if (train_pooler) {
        VectorX<Scalar> gq = query_grad * inv;
        detail::adam_update(p, gq, state.adam.m_query, state.adam.v_query,
                            state.pooler->query);
        // Temperature trains in log space so it stays positive.
        Scalar g_log = temp_grad * inv * state.pooler->temperature;
        state.adam.m_log_temp =
            p.beta1 * state.adam.m_log_temp + (Scalar(1) - p.beta1) * g_log;
        state.adam.v_log_temp = p.beta2 * state.adam.v_log_temp +
                                (Scalar(1) - p.beta2) * g_log * g_log;
        Scalar m_hat = state.adam.m_log_temp / p.bias1;
        Scalar v_hat = state.adam.v_log_temp / p.bias2;
        Scalar log_t = std::log(state.pooler->temperature) -
                       p.lr * m_hat / (std::sqrt(v_hat) + p.eps);
        state.pooler->temperature = std::exp(log_t);
        query_grad.setZero();
        temp_grad = Scalar(0);
      }
      user_grads.clear();
      item_grads.clear();
      batch_triples = 0;
    };

    for (std::uint32_t idx : order) {
      const Interaction& row = train_interactions[idx];
      for (int k = 0; k < config.negatives_per_positive; ++k) {
        std::uint32_t neg =
            sample_negative(state, positives[row.user], neg_step++);
        TripleGrad<Scalar> g =
            triple_backward(state, ctx, row.user, row.item, neg,
                            config.l2_weight);
        epoch_loss += g.loss;
        ++epoch_triples;
        ++batch_triples;

        auto [uit, unew] = user_grads.try_emplace(row.user, g.d_user);
        if (!unew) uit->second += g.d_user;
        if (g.d_pos.size() > 0) {
          auto [pit, pnew] = item_grads.try_emplace(row.item, g.d_pos);
          if (!pnew) pit->second += g.d_pos;
        }
        if (g.d_neg.size() > 0 && item_warm[neg]) {
          auto [nit, nnew] = item_grads.try_emplace(neg, g.d_neg);
          if (!nnew) nit->second += g.d_neg;
        }
        if (train_pooler && g.d_query.size() > 0) {
          query_grad += g.d_query;
          temp_grad += g.d_temperature;
        }
      }
      if (batch_triples >= static_cast<std::size_t>(config.batch_size)) {
        flush_batch();
      }
    }
    flush_batch();

    double mean_loss = epoch_loss / static_cast<double>(epoch_triples);
    if (!std::isfinite(mean_loss) || !state.user_vectors.allFinite() ||
        !state.item_vectors.allFinite()) {
      fail(ErrorCategory::kNumeric,
           "training diverged at epoch " + std::to_string(epoch) +
               " with learning rate " + std::to_string(config.learning_rate));
    }
    trace.push_back(mean_loss);
    (void)l2;
  }

  // Materialize computed item rows so scoring sees current parameters.
  if (state.options.content_mode == ContentMode::kTied) {
    for (std::uint32_t i = 0; i < ctx.n_items; ++i) {
      if (!ctx.item_tokens[i].empty()) {
        state.item_vectors.row(i) = item_vector(state, ctx, i).transpose();
      }
    }
  }
  return trace;
}

// --- cold-start serving -----------------------------------------------------------

// Vector for an entity with no training history: pooled metadata under the
// model's content configuration, or a seeded random fallback when the text
// is empty. L2-normalized when the model scores by cosine.
template <typename Scalar>
EntityVectorT<Scalar> cold_vector(const ModelStateT<Scalar>& state,
                                  const ContentContextT<Scalar>& ctx,
                                  const std::string& entity_text,
                                  std::uint64_t fallback_seed) {
  const AttentionPoolerT<Scalar>* pooler =
      state.pooler ? &*state.pooler : nullptr;

  std::string norm = normalize_text(entity_text);
  std::vector<TokenId> tokens;
  std::vector<std::string> words;
  if (!norm.empty()) {
    for (TokenId id : encode(*ctx.vocab, norm).ids) {
      if (id != BpeVocab::kSpaceToken) tokens.push_back(id);
    }
    std::size_t start = 0;
    while (start <= norm.size()) {
      std::size_t end = norm.find(' ', start);
      if (end == std::string::npos) end = norm.size();
      if (end > start) words.push_back(norm.substr(start, end - start));
      start = end + 1;
    }
  }

  EntityVectorT<Scalar> out;
  if (state.options.content_mode == ContentMode::kTied && !tokens.empty()) {
    out.values =
        detail::pooled_tokens(ctx, tokens, state.options.pooling, pooler);
  } else {
    out.values = detail::entity_prior(ctx, state.options, pooler, tokens,
                                      words, fallback_seed);
  }
  if (state.options.score_mode == ScoreMode::kCosine &&
      out.values.norm() > Scalar(1e-12)) {
    out.values /= out.values.norm();
    out.normalized = true;
  }
  return out;
}

// --- top-K ------------------------------------------------------------------------

// Candidates ranked by score descending, ties broken by ascending id.
// Selection uses a k-bounded heap, not a full sort.
template <typename Scalar>
std::vector<std::pair<std::uint32_t, Scalar>> top_k_among(
    const ModelStateT<Scalar>& state, const VectorX<Scalar>& user_vector,
    const std::vector<std::uint32_t>& candidates, int k) {
  if (k < 1) fail(ErrorCategory::kConfig, "k must be at least 1");

  VectorX<Scalar> u = user_vector;
  const bool cosine = state.options.score_mode == ScoreMode::kCosine;
  if (cosine) {
    Scalar nu = u.norm();
    if (nu > Scalar(1e-12)) u /= nu;
  }

  using Entry = std::pair<Scalar, std::uint32_t>;
  auto better = [](const Entry& a, const Entry& b) {
    return a.first > b.first || (a.first == b.first && a.second < b.second);
  };
  // Worst kept entry on top.
  std::priority_queue<Entry, std::vector<Entry>, decltype(better)> heap(better);

  for (std::uint32_t item : candidates) {
    Scalar s = state.item_vectors.row(item).dot(u);
    if (cosine) {
      Scalar ni = state.item_vectors.row(item).norm();
      s = ni > Scalar(1e-12) ? s / ni : Scalar(0);
    }
    Entry e{s, item};
    if (heap.size() < static_cast<std::size_t>(k)) {
      heap.push(e);
    } else if (better(e, heap.top())) {
      heap.pop();
      heap.push(e);
    }
  }

  std::vector<std::pair<std::uint32_t, Scalar>> out(heap.size());
  for (std::size_t i = heap.size(); i-- > 0;) {
    out[i] = {heap.top().second, heap.top().first};
    heap.pop();
  }
  return out;
}

template <typename Scalar>
std::vector<std::pair<std::uint32_t, Scalar>> recommend_top_k(
    const ModelStateT<Scalar>& state, const VectorX<Scalar>& user_vector,
    int k, const std::unordered_set<std::uint32_t>& exclude = {}) {
  std::vector<std::uint32_t> candidates;
  candidates.reserve(state.n_items());
  for (std::uint32_t i = 0; i < state.n_items(); ++i) {
    if (!exclude.count(i)) candidates.push_back(i);
  }
  return top_k_among(state, user_vector, candidates, k);
}

// --- checkpoint ----------------------------------------------------------------------

// Binary format: magic "CRMS", version byte 1, dims, mode bytes, seed,
// vocab hash, both matrices row-major f32, then optional pooler params.
void save_model(const ModelState& state, const std::string& path);
ModelState load_model(const std::string& path);

}  // namespace coldrec
