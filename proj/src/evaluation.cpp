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

#include "coldrec/evaluation.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace coldrec {

ColdStartSplit make_cold_split(const Dataset& dataset, double ratio,
                               std::uint64_t seed) {
  if (ratio <= 0.0 || ratio >= 1.0) {
    fail(ErrorCategory::kConfig, "cold ratio must lie in (0, 1)");
  }
  if (dataset.n_items < 2) {
    fail(ErrorCategory::kDegenerate, "degenerate split: too few items");
  }
  std::uint32_t n_cold = static_cast<std::uint32_t>(
      std::ceil(ratio * static_cast<double>(dataset.n_items)));
  if (n_cold >= dataset.n_items) {
    fail(ErrorCategory::kDegenerate, "degenerate split: every item cold");
  }

  ColdStartSplit split;
  split.seed = seed;
  split.ratio = ratio;

  std::vector<std::uint32_t> order(dataset.n_items);
  for (std::uint32_t i = 0; i < dataset.n_items; ++i) order[i] = i;
  Rng rng(mix_seed(seed, 0x51u));
  rng.shuffle(order);
  split.cold_items.assign(order.begin(), order.begin() + n_cold);
  std::sort(split.cold_items.begin(), split.cold_items.end());

  std::vector<std::uint8_t> is_cold(dataset.n_items, 0);
  for (std::uint32_t i : split.cold_items) is_cold[i] = 1;

  std::vector<std::uint8_t> user_in_train(dataset.n_users, 0);
  for (const Interaction& row : dataset.interactions) {
    if (is_cold[row.item]) {
      split.test.push_back(row);
    } else {
      split.train.push_back(row);
      user_in_train[row.user] = 1;
    }
  }
  if (split.train.empty()) {
    fail(ErrorCategory::kDegenerate,
         "degenerate split: cold selection empties the training set");
  }
  for (std::uint32_t u = 0; u < dataset.n_users; ++u) {
    if (!user_in_train[u]) split.cold_users.push_back(u);
  }
  return split;
}

std::uint64_t split_hash(const ColdStartSplit& split) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto hash_rows = [&h](const std::vector<Interaction>& rows) {
    for (const Interaction& row : rows) {
      h = fnv1a64(&row.user, sizeof(row.user), h);
      h = fnv1a64(&row.item, sizeof(row.item), h);
      h = fnv1a64(&row.weight, sizeof(row.weight), h);
    }
  };
  hash_rows(split.train);
  hash_rows(split.test);
  for (std::uint32_t i : split.cold_items) h = fnv1a64(&i, sizeof(i), h);
  for (std::uint32_t u : split.cold_users) h = fnv1a64(&u, sizeof(u), h);
  return h;
}

void validate_split(const Dataset& dataset, const ColdStartSplit& split) {
  ItemSet cold_items(split.cold_items.begin(), split.cold_items.end());
  ItemSet cold_users(split.cold_users.begin(), split.cold_users.end());
  for (std::uint32_t i : split.cold_items) {
    if (i >= dataset.n_items) {
      fail(ErrorCategory::kIntegrity, "split references unknown item");
    }
  }
  for (std::uint32_t u : split.cold_users) {
    if (u >= dataset.n_users) {
      fail(ErrorCategory::kIntegrity, "split references unknown user");
    }
  }
  for (const Interaction& row : split.train) {
    if (row.user >= dataset.n_users || row.item >= dataset.n_items) {
      fail(ErrorCategory::kIntegrity, "split references unknown entity");
    }
    if (cold_items.count(row.item) || cold_users.count(row.user)) {
      fail(ErrorCategory::kIntegrity,
           "split invariant violated: cold id in training interactions");
    }
  }
  for (const Interaction& row : split.test) {
    if (row.user >= dataset.n_users || row.item >= dataset.n_items) {
      fail(ErrorCategory::kIntegrity, "split references unknown entity");
    }
    if (!cold_items.count(row.item) && !cold_users.count(row.user)) {
      fail(ErrorCategory::kIntegrity,
           "split invariant violated: warm-only interaction in test");
    }
  }
}

namespace {

TrialMetrics mean_of(const std::vector<TrialMetrics>& trials) {
  TrialMetrics m;
  for (const TrialMetrics& t : trials) {
    m.recall += t.recall;
    m.ndcg += t.ndcg;
    m.hit_rate += t.hit_rate;
    m.exposure_gini += t.exposure_gini;
    m.users_evaluated += t.users_evaluated;
    m.users_skipped += t.users_skipped;
  }
  double n = static_cast<double>(trials.size());
  m.recall /= n;
  m.ndcg /= n;
  m.hit_rate /= n;
  m.exposure_gini /= n;
  return m;
}

TrialMetrics stddev_of(const std::vector<TrialMetrics>& trials,
                       const TrialMetrics& mean) {
  TrialMetrics s;
  if (trials.size() < 2) return s;
  for (const TrialMetrics& t : trials) {
    s.recall += (t.recall - mean.recall) * (t.recall - mean.recall);
    s.ndcg += (t.ndcg - mean.ndcg) * (t.ndcg - mean.ndcg);
    s.hit_rate += (t.hit_rate - mean.hit_rate) * (t.hit_rate - mean.hit_rate);
    s.exposure_gini += (t.exposure_gini - mean.exposure_gini) *
                       (t.exposure_gini - mean.exposure_gini);
  }
  double n1 = static_cast<double>(trials.size() - 1);
  s.recall = std::sqrt(s.recall / n1);
  s.ndcg = std::sqrt(s.ndcg / n1);
  s.hit_rate = std::sqrt(s.hit_rate / n1);
  s.exposure_gini = std::sqrt(s.exposure_gini / n1);
  return s;
}

}  // namespace

const char* to_string(InitMode mode) {
  switch (mode) {
    case InitMode::kRandom:
      return "random";
    case InitMode::kWordAvg:
      return "wordavg";
    case InitMode::kBpe:
      return "bpe";
  }
  return "?";
}

ComparisonReport run_trials(const Dataset& dataset, const BpeVocab& vocab,
                            const EmbeddingTable& table,
                            const std::vector<InitMode>& modes,
                            const TrialsConfig& config) {
  if (config.trials < 1) {
    fail(ErrorCategory::kConfig, "trials must be at least 1");
  }
  ComparisonReport report;
  report.config = config;
  for (InitMode mode : modes) {
    EvalReport er;
    er.mode = mode;
    report.modes.push_back(er);
  }

  ContentContext ctx = build_content_context<float>(dataset, vocab, table);
  EvalOptions eval_opts;
  eval_opts.k = config.k;
  eval_opts.full_catalog_pool = config.full_catalog_pool;
  eval_opts.threads = config.threads;

  for (int t = 0; t < config.trials; ++t) {
    std::uint64_t trial_seed = config.base_seed + static_cast<std::uint64_t>(t);
    ColdStartSplit split = make_cold_split(dataset, config.ratio, trial_seed);
    validate_split(dataset, split);
    report.trial_seeds.push_back(trial_seed);
    report.split_hashes.push_back(split_hash(split));

    for (std::size_t m = 0; m < modes.size(); ++m) {
      ModelOptions opts = config.options;
      opts.init_mode = modes[m];
      ModelState state = init_model(ctx, opts, trial_seed);
      TrainConfig train_cfg = config.train;
      train_cfg.seed = trial_seed;
      try {
        train(state, ctx, split.train, train_cfg);
        report.modes[m].per_trial.push_back(
            evaluate(state, ctx, dataset, split, eval_opts));
      } catch (const Error& e) {
        fail(e.category(), "trial " + std::to_string(t) + " mode " +
                               to_string(modes[m]) + ": " + e.what());
      }
    }
  }

  for (EvalReport& er : report.modes) {
    er.mean = mean_of(er.per_trial);
    er.stddev = stddev_of(er.per_trial, er.mean);
  }
  return report;
}

std::string format_comparison(const ComparisonReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-8s  %-16s  %-16s  %-16s  %-16s\n",
                "method", "recall@k", "ndcg@k", "hitrate@k", "gini");
  out << line;
  for (const EvalReport& er : report.modes) {
    std::snprintf(line, sizeof(line),
                  "%-8s  %.4f +- %.4f  %.4f +- %.4f  %.4f +- %.4f  "
                  "%.4f +- %.4f\n",
                  to_string(er.mode), er.mean.recall, er.stddev.recall,
                  er.mean.ndcg, er.stddev.ndcg, er.mean.hit_rate,
                  er.stddev.hit_rate, er.mean.exposure_gini,
                  er.stddev.exposure_gini);
    out << line;
  }
  return out.str();
}

namespace {

using nlohmann::json;

json metrics_to_json(const TrialMetrics& m) {
  return json{{"recall_at_k", m.recall},
              {"ndcg_at_k", m.ndcg},
              {"hit_rate_at_k", m.hit_rate},
              {"exposure_gini", m.exposure_gini},
              {"users_evaluated", m.users_evaluated},
              {"users_skipped", m.users_skipped}};
}

json train_config_to_json(const TrainConfig& c) {
  return json{{"epochs", c.epochs},
              {"learning_rate", c.learning_rate},
              {"adam_beta1", c.adam_beta1},
              {"adam_beta2", c.adam_beta2},
              {"adam_epsilon", c.adam_epsilon},
              {"negatives_per_positive", c.negatives_per_positive},
              {"batch_size", c.batch_size},
              {"l2_weight", c.l2_weight}};
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::string comparison_to_json(const ComparisonReport& report) {
  json j;
  j["k"] = report.config.k;
  j["trials"] = report.config.trials;
  j["base_seed"] = report.config.base_seed;
  j["ratio"] = report.config.ratio;
  j["candidate_pool"] =
      report.config.full_catalog_pool ? "full_catalog" : "cold_items";
  j["train"] = train_config_to_json(report.config.train);
  j["content_mode"] = report.config.options.content_mode == ContentMode::kTied
                          ? "tied"
                          : "init";
  j["score_mode"] =
      report.config.options.score_mode == ScoreMode::kCosine ? "cosine" : "dot";
  j["pooling"] = report.config.options.pooling == PoolKind::kAttention
                     ? "attention"
                     : "mean";

  json trials = json::array();
  for (std::size_t t = 0; t < report.trial_seeds.size(); ++t) {
    trials.push_back(json{{"trial", t},
                          {"seed", report.trial_seeds[t]},
                          {"split_hash", hash_hex(report.split_hashes[t])}});
  }
  j["splits"] = trials;

  json modes;
  for (const EvalReport& er : report.modes) {
    json per_trial = json::array();
    for (const TrialMetrics& m : er.per_trial) {
      per_trial.push_back(metrics_to_json(m));
    }
    modes[to_string(er.mode)] = json{{"per_trial", per_trial},
                                     {"mean", metrics_to_json(er.mean)},
                                     {"stddev", metrics_to_json(er.stddev)}};
  }
  j["modes"] = modes;
  return j.dump(2) + "\n";
}

std::string trial_to_json(const TrialMetrics& metrics, const EvalOptions& opts,
                          std::uint64_t seed) {
  json j;
  j["k"] = opts.k;
  j["seed"] = seed;
  j["candidate_pool"] = opts.full_catalog_pool ? "full_catalog" : "cold_items";
  j["metrics"] = metrics_to_json(metrics);
  return j.dump(2) + "\n";
}

std::vector<ProjectedPoint> project_2d(const MatrixX<double>& points,
                                       const std::vector<std::string>& labels) {
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  if (n < 3) {
    fail(ErrorCategory::kDegenerate, "projection needs at least 3 vectors");
  }
  if (labels.size() != static_cast<std::size_t>(n)) {
    fail(ErrorCategory::kConfig, "projection labels do not match vectors");
  }
  if (d < 2) {
    fail(ErrorCategory::kDegenerate, "projection needs dimension >= 2");
  }

  Eigen::MatrixXd centered =
      points.cast<double>().rowwise() - points.colwise().mean();
  Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    fail(ErrorCategory::kNumeric, "eigendecomposition failed");
  }
  // Eigenvalues ascend; the last two columns span the projection plane.
  double lead = solver.eigenvalues()[d - 1];
  double second = solver.eigenvalues()[d - 2];
  if (lead <= 0.0 || second <= lead * 1e-12) {
    fail(ErrorCategory::kDegenerate,
         "degenerate projection: input rank below 2");
  }

  Eigen::VectorXd pc1 = solver.eigenvectors().col(d - 1);
  Eigen::VectorXd pc2 = solver.eigenvectors().col(d - 2);
  auto orient = [](Eigen::VectorXd& v) {
    Eigen::Index at = 0;
    v.cwiseAbs().maxCoeff(&at);
    if (v[at] < 0.0) v = -v;
  };
  orient(pc1);
  orient(pc2);

  std::vector<ProjectedPoint> out(n);
  Eigen::VectorXd x = centered * pc1;
  Eigen::VectorXd y = centered * pc2;
  for (Eigen::Index i = 0; i < n; ++i) {
    out[i] = ProjectedPoint{x[i], y[i], labels[i]};
  }
  return out;
}

std::vector<ProjectedPoint> project_2d(const MatrixX<float>& points,
                                       const std::vector<std::string>& labels) {
  return project_2d(MatrixX<double>(points.cast<double>()), labels);
}

void save_projection(const std::vector<ProjectedPoint>& points,
                     const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCategory::kConfig, "cannot open for writing: " + path);
  char buf[80];
  for (const ProjectedPoint& p : points) {
    std::snprintf(buf, sizeof(buf), "%.9g\t%.9g\t", p.x, p.y);
    f << buf << p.label << '\n';
  }
  if (!f) fail(ErrorCategory::kConfig, "write failed: " + path);
}

}  // namespace coldrec
