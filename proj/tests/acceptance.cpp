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
//
// End-to-end acceptance suite. Each criterion prints one pass/fail line;
// the process exits non-zero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include "coldrec/data.hpp"
#include "coldrec/embedding.hpp"
#include "coldrec/evaluation.hpp"
#include "coldrec/model.hpp"
#include "coldrec/tokenizer.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace coldrec;

namespace {

struct Check {
  std::string name;
  std::function<bool(std::ostream&)> run;
};

// Shared fixture: the default synthetic benchmark with its vocabulary and
// token table (topics 8, items/topic 40, users 500, 30 interactions/user,
// vocab 600, h 64), seed 42 throughout.
struct BenchFixture {
  SynthConfig synth;
  SynthInfo info;
  Dataset dataset;
  BpeVocab vocab;
  EmbeddingTable table;
  static constexpr std::uint64_t kSeed = 42;

  BenchFixture() {
    synth.seed = kSeed;
    dataset = synth_benchmark(synth, &info);
    vocab = train_bpe(dataset.item_text, 600);
    table = synth_table(vocab, 64, kSeed);
  }
};

const BenchFixture& bench_fixture() {
  static BenchFixture fx;
  return fx;
}

bool criterion_table1_ordering(std::ostream& log) {
  const BenchFixture& fx = bench_fixture();
  TrialsConfig cfg;  // epochs 50, lr 0.01, k 10, ratio 0.1, trials 5
  cfg.base_seed = BenchFixture::kSeed;
  std::vector<InitMode> modes = {InitMode::kRandom, InitMode::kWordAvg,
                                 InitMode::kBpe};
  ComparisonReport report =
      run_trials(fx.dataset, fx.vocab, fx.table, modes, cfg);
  const EvalReport& random = report.modes[0];
  const EvalReport& wordavg = report.modes[1];
  const EvalReport& bpe = report.modes[2];

  bool ok = true;
  for (int t = 0; t < cfg.trials; ++t) {
    auto strict = [&](double b, double w, double r) { return b > w && w > r; };
    if (!strict(bpe.per_trial[t].recall, wordavg.per_trial[t].recall,
                random.per_trial[t].recall) ||
        !strict(bpe.per_trial[t].ndcg, wordavg.per_trial[t].ndcg,
                random.per_trial[t].ndcg) ||
        !strict(bpe.per_trial[t].hit_rate, wordavg.per_trial[t].hit_rate,
                random.per_trial[t].hit_rate)) {
      log << "ordering violated in trial " << t << "; ";
      ok = false;
    }
  }
  double gap = bpe.mean.recall - random.mean.recall;
  double pooled = std::sqrt((bpe.stddev.recall * bpe.stddev.recall +
                             random.stddev.recall * random.stddev.recall) /
                            2.0);
  if (!(gap > 3.0 * pooled)) {
    log << "recall gap " << gap << " not above 3x pooled std " << pooled
        << "; ";
    ok = false;
  }
  log << "recall " << bpe.mean.recall << " > " << wordavg.mean.recall << " > "
      << random.mean.recall << ", gap/pooled = " << gap / pooled;
  return ok;
}

bool criterion_bpe_oracle(std::ostream& log) {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> corpus = testutil::random_small_corpus(
        rng, /*max_words=*/200, /*alphabet=*/12);
    std::uint32_t target = 257 + static_cast<std::uint32_t>(rng.below(44));
    BpeVocab vocab = train_bpe(corpus, target);
    std::vector<MergeRule> expected = oracle::brute_force_bpe(corpus, target);
    if (vocab.merges().size() != expected.size()) {
      log << "merge count mismatch in corpus " << trial;
      return false;
    }
    for (std::size_t r = 0; r < expected.size(); ++r) {
      if (vocab.merges()[r].left != expected[r].left ||
          vocab.merges()[r].right != expected[r].right) {
        log << "merge " << r << " differs in corpus " << trial;
        return false;
      }
    }
  }
  log << "100 corpora, exact merge lists";
  return true;
}

bool criterion_roundtrip(std::ostream& log) {
  BpeVocab vocab = train_bpe(
      {"the quick brown fox jumps over the lazy dog",
       "wireless gaming headset bluetooth audio gear limited edition"},
      512);
  Rng rng(99);
  for (int i = 0; i < 1000; ++i) {
    std::string norm = normalize_text(testutil::random_unicode_string(rng));
    if (decode(vocab, encode(vocab, norm)) != norm) {
      log << "roundtrip mismatch at string " << i;
      return false;
    }
  }
  log << "1000 strings, exact";
  return true;
}

bool criterion_gradients(std::ostream& log) {
  Rng rng(7777);
  int total_params = 0;
  for (int trial = 0; trial < 100; ++trial) {
    int dim = 2 + static_cast<int>(rng.below(15));  // h <= 16
    int n_items = 4 + static_cast<int>(rng.below(5));
    std::vector<std::string> texts;
    std::vector<std::string> corpus;
    for (int i = 0; i < n_items; ++i) {
      if (rng.uniform() < 0.2) {
        texts.emplace_back();
        continue;
      }
      std::string t;
      int words = 1 + static_cast<int>(rng.below(3));
      for (int w = 0; w < words; ++w) {
        if (w) t.push_back(' ');
        int len = 2 + static_cast<int>(rng.below(4));
        for (int c = 0; c < len; ++c) {
          t.push_back(static_cast<char>('a' + rng.below(6)));
        }
      }
      texts.push_back(t);
      corpus.push_back(t);
      corpus.push_back(t);
    }
    if (corpus.empty()) corpus.push_back("abab");

    std::vector<RawInteraction> recs;
    recs.push_back({"u0", "i0", 1.0f, std::nullopt});
    recs.push_back({"u1", "i1", 1.0f, std::nullopt});
    MetadataFile items;
    for (std::size_t i = 0; i < texts.size(); ++i) {
      items.entries.emplace_back("i" + std::to_string(i), texts[i]);
    }
    Dataset ds = build_dataset(recs, items);
    BpeVocab vocab = train_bpe(corpus, 270);
    EmbeddingTable table = synth_table(vocab, dim, rng.next_u64());
    auto ctx = build_content_context<double>(ds, vocab, table);

    ModelOptions opts;
    opts.content_mode =
        trial % 2 == 0 ? ContentMode::kInit : ContentMode::kTied;
    opts.pooling = opts.content_mode == ContentMode::kTied
                       ? PoolKind::kAttention
                       : PoolKind::kMean;
    ModelStateT<double> state = init_model(ctx, opts, rng.next_u64());

    std::uint32_t u = static_cast<std::uint32_t>(rng.below(ds.n_users));
    std::uint32_t p = static_cast<std::uint32_t>(rng.below(ds.n_items));
    std::uint32_t n = static_cast<std::uint32_t>(rng.below(ds.n_items));
    if (p == n) n = (n + 1) % ds.n_items;
    int bad = gradcheck::check_triple(state, ctx, u, p, n, 1e-3);
    if (bad != 0) {
      log << bad << " coordinates off in configuration " << trial;
      return false;
    }
    total_params += 3 * dim + (state.pooler ? dim + 1 : 0);
  }
  log << "100 configurations, " << total_params << " coordinates";
  return true;
}

bool criterion_metric_oracles(std::ostream& log) {
  double worked = ndcg_at_k({7, 5, 3}, {5}, 10);
  double closed_form = 1.0 / std::log2(3.0);
  if (std::abs(worked - closed_form) > 1e-12 ||
      std::abs(worked - 0.630930) > 5e-7) {
    log << "worked NDCG value " << worked << " off";
    return false;
  }
  Rng rng(4242);
  for (int trial = 0; trial < 1000; ++trial) {
    int catalog = 5 + static_cast<int>(rng.below(45));
    std::vector<std::uint32_t> ranked(catalog);
    for (int i = 0; i < catalog; ++i) ranked[i] = i;
    rng.shuffle(ranked);
    ranked.resize(1 + rng.below(catalog));
    ItemSet relevant;
    int n_rel = 1 + static_cast<int>(rng.below(6));
    for (int r = 0; r < n_rel; ++r) {
      relevant.insert(static_cast<std::uint32_t>(rng.below(catalog)));
    }
    int k = 1 + static_cast<int>(rng.below(15));
    if (std::abs(recall_at_k(ranked, relevant, k) -
                 oracle::brute_recall(ranked, relevant, k)) > 1e-12 ||
        std::abs(ndcg_at_k(ranked, relevant, k) -
                 oracle::brute_ndcg(ranked, relevant, k)) > 1e-12 ||
        std::abs(hit_rate_at_k(ranked, relevant, k) -
                 oracle::brute_hit_rate(ranked, relevant, k)) > 1e-12) {
      log << "metric mismatch at instance " << trial;
      return false;
    }
  }
  log << "1000 instances at 1e-12; NDCG@10(rank 2) = " << worked;
  return true;
}

bool criterion_null_model(std::ostream& log) {
  const int kCandidates = 40;
  const int kUsers = 400;
  const int kK = 10;
  Rng rng(31337);
  double hits = 0.0;
  for (int u = 0; u < kUsers; ++u) {
    std::vector<std::uint32_t> ranked(kCandidates);
    for (int i = 0; i < kCandidates; ++i) ranked[i] = i;
    rng.shuffle(ranked);
    ItemSet relevant = {static_cast<std::uint32_t>(rng.below(kCandidates))};
    hits += hit_rate_at_k(ranked, relevant, kK);
  }
  double empirical = hits / kUsers;
  double expected = static_cast<double>(kK) / kCandidates;
  double sigma = std::sqrt(expected * (1.0 - expected) / kUsers);
  log << "hit rate " << empirical << " vs " << expected << " (3 sigma = "
      << 3.0 * sigma << ")";
  return std::abs(empirical - expected) <= 3.0 * sigma;
}

bool criterion_cold_isolation(std::ostream& log) {
  const BenchFixture& fx = bench_fixture();
  ContentContext ctx =
      build_content_context<float>(fx.dataset, fx.vocab, fx.table);
  ColdStartSplit split =
      make_cold_split(fx.dataset, 0.1, BenchFixture::kSeed);
  ModelOptions opts;  // init mode, bpe
  ModelState state = init_model(ctx, opts, BenchFixture::kSeed);

  MatrixX<float> before(split.cold_items.size(), ctx.dim);
  for (std::size_t c = 0; c < split.cold_items.size(); ++c) {
    before.row(c) = state.item_vectors.row(split.cold_items[c]);
  }
  TrainConfig cfg;
  cfg.seed = BenchFixture::kSeed;
  train(state, ctx, split.train, cfg);
  for (std::size_t c = 0; c < split.cold_items.size(); ++c) {
    if (std::memcmp(before.row(c).data(),
                    state.item_vectors.row(split.cold_items[c]).data(),
                    sizeof(float) * ctx.dim) != 0) {
      log << "cold item " << split.cold_items[c] << " changed";
      return false;
    }
  }

  // Byte-identical reports from two CLI bench runs with the same seed.
  std::string bin = COLDREC_BIN;
  auto out_a = std::filesystem::temp_directory_path() / "coldrec_acc_a";
  auto out_b = std::filesystem::temp_directory_path() / "coldrec_acc_b";
  std::filesystem::remove_all(out_a);
  std::filesystem::remove_all(out_b);
  std::string cmd_a =
      bin + " bench --seed 42 --quiet --out " + out_a.string();
  std::string cmd_b =
      bin + " bench --seed 42 --quiet --out " + out_b.string();
  if (std::system(cmd_a.c_str()) != 0 || std::system(cmd_b.c_str()) != 0) {
    log << "bench run failed";
    return false;
  }
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)),
                       std::istreambuf_iterator<char>());
  };
  std::string ra = slurp(out_a / "report.json");
  std::string rb = slurp(out_b / "report.json");
  if (ra.empty() || ra != rb) {
    log << "bench reports differ between runs";
    return false;
  }
  log << split.cold_items.size()
      << " cold rows bit-identical; CLI reports byte-identical";
  return true;
}

bool criterion_subword_correlation(std::ostream& log) {
  // Entities from a compact synthetic dataset: token-sharing pairs vs
  // token-disjoint pairs under 100 independent synthetic tables.
  SynthConfig cfg;
  cfg.n_topics = 4;
  cfg.items_per_topic = 10;
  cfg.users = 20;
  cfg.interactions_per_user = 5;
  cfg.seed = 9;
  Dataset ds = synth_benchmark(cfg);
  BpeVocab vocab = train_bpe(ds.item_text, 500);

  std::vector<ItemSet> token_sets(ds.n_items);
  for (std::uint32_t i = 0; i < ds.n_items; ++i) {
    for (TokenId id : encode(vocab, normalize_text(ds.item_text[i])).ids) {
      if (id != BpeVocab::kSpaceToken) token_sets[i].insert(id);
    }
  }
  auto share_token = [&](std::uint32_t a, std::uint32_t b) {
    for (std::uint32_t t : token_sets[a]) {
      if (token_sets[b].count(t)) return true;
    }
    return false;
  };

  double shared_sum = 0.0, disjoint_sum = 0.0;
  std::int64_t shared_n = 0, disjoint_n = 0;
  PoolingConfig mean;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    EmbeddingTable table = synth_table(vocab, 64, seed);
    MatrixX<float> vecs(ds.n_items, 64);
    for (std::uint32_t i = 0; i < ds.n_items; ++i) {
      vecs.row(i) = embed_entity(vocab, table, ds.item_text[i], mean, false)
                        .values.transpose();
    }
    for (std::uint32_t a = 0; a < ds.n_items; ++a) {
      for (std::uint32_t b = a + 1; b < ds.n_items; ++b) {
        double c = vecs.row(a).dot(vecs.row(b)) /
                   (vecs.row(a).norm() * vecs.row(b).norm());
        if (share_token(a, b)) {
          shared_sum += c;
          ++shared_n;
        } else {
          disjoint_sum += c;
          ++disjoint_n;
        }
      }
    }
  }
  double shared_mean = shared_sum / shared_n;
  double disjoint_mean = disjoint_sum / disjoint_n;
  log << "mean cosine shared " << shared_mean << " vs disjoint "
      << disjoint_mean << " over 100 seeds";
  return shared_n > 0 && disjoint_n > 0 && shared_mean > disjoint_mean;
}

bool criterion_projection_separation(std::ostream& log) {
  const BenchFixture& fx = bench_fixture();
  ContentContext ctx =
      build_content_context<float>(fx.dataset, fx.vocab, fx.table);
  ColdStartSplit split =
      make_cold_split(fx.dataset, 0.1, BenchFixture::kSeed);
  ModelOptions opts;
  ModelState state = init_model(ctx, opts, BenchFixture::kSeed);
  TrainConfig cfg;
  cfg.seed = BenchFixture::kSeed;
  train(state, ctx, split.train, cfg);

  MatrixX<float> vectors(split.cold_items.size(), ctx.dim);
  std::vector<std::string> labels;
  for (std::size_t c = 0; c < split.cold_items.size(); ++c) {
    std::uint32_t item = split.cold_items[c];
    vectors.row(c) =
        cold_vector(state, ctx, fx.dataset.item_text[item],
                    detail::entity_fallback_seed(state.rng_seed, true, item))
            .values.transpose();
    labels.push_back(fx.info.item_topic[item]);
  }
  std::vector<ProjectedPoint> points = project_2d(vectors, labels);

  double within = 0.0, between = 0.0;
  std::int64_t n_within = 0, n_between = 0;
  for (std::size_t a = 0; a < points.size(); ++a) {
    for (std::size_t b = a + 1; b < points.size(); ++b) {
      double d = std::hypot(points[a].x - points[b].x,
                            points[a].y - points[b].y);
      if (points[a].label == points[b].label) {
        within += d;
        ++n_within;
      } else {
        between += d;
        ++n_between;
      }
    }
  }
  if (n_within == 0 || n_between == 0) {
    log << "degenerate topic coverage among cold items";
    return false;
  }
  within /= n_within;
  between /= n_between;
  log << "within-topic " << within << " < between-topic " << between;
  return within < between;
}

}  // namespace

int main() {
  std::vector<Check> checks = {
      {"1 comparison ordering (bpe > wordavg > random, 5 paired trials)",
       criterion_table1_ordering},
      {"2 BPE merges equal the recount oracle on 100 random corpora",
       criterion_bpe_oracle},
      {"3 tokenizer roundtrip on 1000 random unicode strings",
       criterion_roundtrip},
      {"4 BPR gradients match finite differences (both content modes)",
       criterion_gradients},
      {"5 ranking metrics equal brute-force references",
       criterion_metric_oracles},
      {"6 random scoring matches the binomial null model",
       criterion_null_model},
      {"7 cold isolation and byte-identical bench reports",
       criterion_cold_isolation},
      {"8 token-sharing entities correlate above token-disjoint pairs",
       criterion_subword_correlation},
      {"9 projected cold items cluster by topic",
       criterion_projection_separation},
  };

  int failures = 0;
  for (Check& check : checks) {
    std::ostringstream log;
    bool ok = false;
    auto start = std::chrono::steady_clock::now();
    try {
      ok = check.run(log);
    } catch (const std::exception& e) {
      log << "exception: " << e.what();
    }
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    std::printf("[%s] criterion %s (%lldms)%s%s\n", ok ? "PASS" : "FAIL",
                check.name.c_str(), static_cast<long long>(elapsed),
                log.str().empty() ? "" : " -- ", log.str().c_str());
    std::fflush(stdout);
    failures += !ok;
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all %zu criteria passed\n", checks.size());
  return 0;
}
