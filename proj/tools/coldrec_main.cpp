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

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "coldrec/data.hpp"
#include "coldrec/embedding.hpp"
#include "coldrec/evaluation.hpp"
#include "coldrec/model.hpp"
#include "coldrec/tokenizer.hpp"

namespace {

using namespace coldrec;

struct GlobalFlags {
  std::uint64_t seed = 42;
  int threads = 0;  // 0 = hardware concurrency
  bool deterministic = false;
  bool quiet = false;
};

int resolved_threads(const GlobalFlags& g) {
  if (g.deterministic) return 1;
  if (g.threads > 0) return g.threads;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

InitMode parse_init_mode(const std::string& s) {
  if (s == "random") return InitMode::kRandom;
  if (s == "wordavg") return InitMode::kWordAvg;
  if (s == "bpe") return InitMode::kBpe;
  fail(ErrorCategory::kConfig, "unknown init mode: " + s);
}

ContentMode parse_content_mode(const std::string& s) {
  if (s == "init") return ContentMode::kInit;
  if (s == "tied") return ContentMode::kTied;
  fail(ErrorCategory::kConfig, "unknown content mode: " + s);
}

ScoreMode parse_score_mode(const std::string& s) {
  if (s == "dot") return ScoreMode::kDot;
  if (s == "cosine") return ScoreMode::kCosine;
  fail(ErrorCategory::kConfig, "unknown score mode: " + s);
}

PoolKind parse_pooling(const std::string& s) {
  if (s == "mean") return PoolKind::kMean;
  if (s == "attention") return PoolKind::kAttention;
  fail(ErrorCategory::kConfig, "unknown pooling: " + s);
}

std::vector<InitMode> parse_modes(const std::string& csv) {
  std::vector<InitMode> modes;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t comma = csv.find(',', start);
    if (comma == std::string::npos) comma = csv.size();
    if (comma > start) {
      modes.push_back(parse_init_mode(csv.substr(start, comma - start)));
    }
    start = comma + 1;
  }
  if (modes.empty()) fail(ErrorCategory::kConfig, "empty mode list");
  return modes;
}

// Flat "key = value" file; '#' starts a comment, unknown keys are rejected.
std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCategory::kConfig, "cannot open config: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto strip = [](std::string s) {
      std::size_t b = s.find_first_not_of(" \t\r");
      std::size_t e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string stripped = strip(line);
    if (stripped.empty()) continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCategory::kConfig, path + ":" + std::to_string(line_no) +
                                       ": expected 'key = value'");
    }
    kv[strip(stripped.substr(0, eq))] = strip(stripped.substr(eq + 1));
  }
  return kv;
}

template <typename T>
void apply_key(std::map<std::string, std::string>& kv, const std::string& key,
               T& out) {
  auto it = kv.find(key);
  if (it == kv.end()) return;
  std::istringstream in(it->second);
  T value;
  if (!(in >> value) || !in.eof()) {
    fail(ErrorCategory::kConfig, "bad value for config key '" + key + "'");
  }
  out = value;
  kv.erase(it);
}

void apply_key(std::map<std::string, std::string>& kv, const std::string& key,
               std::string& out) {
  auto it = kv.find(key);
  if (it == kv.end()) return;
  out = it->second;
  kv.erase(it);
}

void reject_unknown_keys(const std::map<std::string, std::string>& kv,
                         const std::string& path) {
  if (kv.empty()) return;
  fail(ErrorCategory::kConfig,
       path + ": unknown config key '" + kv.begin()->first + "'");
}

std::vector<std::string> read_corpus_lines(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCategory::kConfig, "cannot open corpus: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

void check_model_matches(const ModelState& state, const BpeVocab& vocab,
                         const EmbeddingTable& table) {
  if (state.vocab_hash != vocab.content_hash() ||
      table.vocab_hash() != vocab.content_hash()) {
    fail(ErrorCategory::kIntegrity,
         "model, vocabulary and embeddings do not share a content hash");
  }
}

// Labels file "item_external_id<TAB>label"; falls back to the external id.
std::vector<std::string> cold_item_labels(const Dataset& ds,
                                          const std::vector<std::uint32_t>& cold,
                                          const std::string& labels_path) {
  std::unordered_map<std::string, std::string> by_external;
  if (!labels_path.empty()) {
    MetadataFile f = load_metadata(labels_path);
    for (const auto& [id, label] : f.entries) by_external[id] = label;
  }
  std::vector<std::string> labels;
  labels.reserve(cold.size());
  for (std::uint32_t item : cold) {
    auto it = by_external.find(ds.item_ids[item]);
    labels.push_back(it == by_external.end() ? ds.item_ids[item] : it->second);
  }
  return labels;
}

// --- subcommand bodies -------------------------------------------------------

struct BenchParams {
  SynthConfig synth;
  std::uint32_t vocab_size = 600;
  int dim = 64;
  TrialsConfig trials;
  std::vector<InitMode> modes = {InitMode::kRandom, InitMode::kWordAvg,
                                 InitMode::kBpe};
  std::string out_dir = "bench_out";
};

int run_bench(const BenchParams& params, const GlobalFlags& globals) {
  BenchParams p = params;
  p.synth.seed = p.trials.base_seed;
  p.trials.threads = resolved_threads(globals);

  SynthInfo info;
  Dataset ds = synth_benchmark(p.synth, &info);
  BpeVocab vocab = train_bpe(ds.item_text, p.vocab_size);
  EmbeddingTable table = synth_table(vocab, p.dim, p.trials.base_seed);

  ComparisonReport report = run_trials(ds, vocab, table, p.modes, p.trials);

  std::filesystem::create_directories(p.out_dir);
  std::string json = comparison_to_json(report);
  {
    std::ofstream f(p.out_dir + "/report.json", std::ios::binary);
    f << json;
  }
  std::string table_text = format_comparison(report);
  {
    std::ofstream f(p.out_dir + "/comparison.txt", std::ios::binary);
    f << table_text;
  }
  if (!globals.quiet) {
    std::cout << table_text;
    std::cout << "report: " << p.out_dir << "/report.json\n";
  }
  return 0;
}

int run_evaluate_modes(const std::string& data_dir,
                       const std::string& vocab_path,
                       const std::string& table_path, const std::string& modes,
                       TrialsConfig trials, const std::string& report_path,
                       const GlobalFlags& globals) {
  Dataset ds = load_dataset(data_dir);
  BpeVocab vocab = load_vocab(vocab_path);
  EmbeddingTable table = load_table(table_path, vocab);
  trials.threads = resolved_threads(globals);
  ComparisonReport report =
      run_trials(ds, vocab, table, parse_modes(modes), trials);
  std::string json = comparison_to_json(report);
  if (!report_path.empty()) {
    std::ofstream f(report_path, std::ios::binary);
    if (!f) fail(ErrorCategory::kConfig, "cannot write " + report_path);
    f << json;
  }
  if (!globals.quiet) std::cout << format_comparison(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cold-start recommendation toolkit"};
  app.require_subcommand(1);

  GlobalFlags globals;
  app.add_option("--seed", globals.seed, "default seed for subcommands");
  app.add_option("--threads", globals.threads,
                 "worker cap (0 = all available cores)");
  app.add_flag("--deterministic", globals.deterministic,
               "force sequential-equivalent execution");
  app.add_flag("--quiet", globals.quiet, "suppress progress output");

  std::string active_stage = "startup";

  // train-bpe
  auto* cmd_bpe = app.add_subcommand("train-bpe", "learn a BPE vocabulary");
  std::string bpe_corpus, bpe_out;
  std::uint32_t bpe_size = 30000;
  cmd_bpe->add_option("--corpus", bpe_corpus, "text file, one document per line")
      ->required();
  cmd_bpe->add_option("--vocab-size", bpe_size, "target vocabulary size");
  cmd_bpe->add_option("--out", bpe_out, "output vocabulary path")->required();
  cmd_bpe->callback([&] {
    active_stage = "train-bpe";
    BpeVocab vocab = train_bpe(read_corpus_lines(bpe_corpus), bpe_size);
    save_vocab(vocab, bpe_out);
    if (!globals.quiet) {
      std::cout << "vocab size " << vocab.size() << " (" << vocab.merges().size()
                << " merges) -> " << bpe_out << "\n";
    }
  });

  // synth-embeddings
  auto* cmd_emb =
      app.add_subcommand("synth-embeddings", "deterministic token vectors");
  std::string emb_vocab, emb_out;
  int emb_dim = 64;
  cmd_emb->add_option("--vocab", emb_vocab, "vocabulary path")->required();
  cmd_emb->add_option("--dim", emb_dim, "embedding dimension");
  cmd_emb->add_option("--out", emb_out, "output table path")->required();
  cmd_emb->callback([&] {
    active_stage = "synth-embeddings";
    BpeVocab vocab = load_vocab(emb_vocab);
    EmbeddingTable table = synth_table(vocab, emb_dim, globals.seed);
    save_table(table, emb_out);
    if (!globals.quiet) {
      std::cout << table.rows() << " x " << table.dim() << " table -> "
                << emb_out << "\n";
    }
  });

  // synth-data
  auto* cmd_synth =
      app.add_subcommand("synth-data", "generate the synthetic benchmark");
  std::string synth_config, synth_out;
  SynthConfig synth;
  cmd_synth->add_option("--config", synth_config, "key = value config file");
  cmd_synth->add_option("--out", synth_out, "output directory")->required();
  cmd_synth->add_option("--topics", synth.n_topics);
  cmd_synth->add_option("--items-per-topic", synth.items_per_topic);
  cmd_synth->add_option("--users", synth.users);
  cmd_synth->add_option("--interactions-per-user", synth.interactions_per_user);
  cmd_synth->add_option("--stems-per-topic", synth.stems_per_topic);
  cmd_synth->add_option("--holdout-fraction", synth.cold_word_holdout_fraction);
  cmd_synth->add_option("--sparsity", synth.sparsity);
  cmd_synth->callback([&] {
    active_stage = "synth-data";
    SynthConfig cfg;  // file first, then flags on top
    if (!synth_config.empty()) {
      auto kv = read_config_file(synth_config);
      apply_key(kv, "topics", cfg.n_topics);
      apply_key(kv, "items_per_topic", cfg.items_per_topic);
      apply_key(kv, "users", cfg.users);
      apply_key(kv, "interactions_per_user", cfg.interactions_per_user);
      apply_key(kv, "stems_per_topic", cfg.stems_per_topic);
      apply_key(kv, "holdout_fraction", cfg.cold_word_holdout_fraction);
      apply_key(kv, "sparsity", cfg.sparsity);
      apply_key(kv, "seed", cfg.seed);
      reject_unknown_keys(kv, synth_config);
    }
    auto take = [&](const char* flag, auto member, auto& into) {
      if (cmd_synth->count(flag)) into = member;
    };
    take("--topics", synth.n_topics, cfg.n_topics);
    take("--items-per-topic", synth.items_per_topic, cfg.items_per_topic);
    take("--users", synth.users, cfg.users);
    take("--interactions-per-user", synth.interactions_per_user,
         cfg.interactions_per_user);
    take("--stems-per-topic", synth.stems_per_topic, cfg.stems_per_topic);
    take("--holdout-fraction", synth.cold_word_holdout_fraction,
         cfg.cold_word_holdout_fraction);
    take("--sparsity", synth.sparsity, cfg.sparsity);
    if (app.count("--seed")) cfg.seed = globals.seed;

    SynthInfo info;
    Dataset ds = synth_benchmark(cfg, &info);
    save_dataset(ds, synth_out);
    {
      std::ofstream f(synth_out + "/labels.tsv", std::ios::binary);
      for (std::uint32_t i = 0; i < ds.n_items; ++i) {
        f << ds.item_ids[i] << '\t' << info.item_topic[i] << '\n';
      }
    }
    if (!globals.quiet) {
      DatasetStats s = dataset_stats(ds);
      std::cout << s.n_users << " users, " << s.n_items << " items, "
                << s.n_interactions << " interactions -> " << synth_out
                << "\n";
    }
  });

  // stats
  auto* cmd_stats = app.add_subcommand("stats", "dataset summary");
  std::string stats_data;
  cmd_stats->add_option("--data", stats_data, "dataset directory")->required();
  cmd_stats->callback([&] {
    active_stage = "stats";
    DatasetStats s = dataset_stats(load_dataset(stats_data));
    std::cout << "users\t" << s.n_users << "\n"
              << "items\t" << s.n_items << "\n"
              << "interactions\t" << s.n_interactions << "\n"
              << "sparsity\t" << s.sparsity << "\n"
              << "text_len_min\t" << s.min_text_len << "\n"
              << "text_len_mean\t" << s.mean_text_len << "\n"
              << "text_len_max\t" << s.max_text_len << "\n"
              << "empty_metadata_items\t" << s.empty_metadata_items << "\n";
  });

  // train
  auto* cmd_train = app.add_subcommand("train", "train a model");
  std::string train_data, train_vocab, train_emb, train_out;
  std::string train_init = "bpe", train_mode = "init", train_pooling = "mean",
              train_score = "dot";
  TrainConfig train_cfg;
  cmd_train->add_option("--data", train_data)->required();
  cmd_train->add_option("--vocab", train_vocab)->required();
  cmd_train->add_option("--embeddings", train_emb)->required();
  cmd_train->add_option("--init", train_init, "random|wordavg|bpe");
  cmd_train->add_option("--mode", train_mode, "init|tied");
  cmd_train->add_option("--pooling", train_pooling, "mean|attention");
  cmd_train->add_option("--score", train_score, "dot|cosine");
  cmd_train->add_option("--epochs", train_cfg.epochs);
  cmd_train->add_option("--lr", train_cfg.learning_rate);
  cmd_train->add_option("--l2", train_cfg.l2_weight);
  cmd_train->add_option("--negatives", train_cfg.negatives_per_positive);
  cmd_train->add_option("--batch-size", train_cfg.batch_size);
  cmd_train->add_option("--out", train_out)->required();
  cmd_train->callback([&] {
    active_stage = "train";
    Dataset ds = load_dataset(train_data);
    BpeVocab vocab = load_vocab(train_vocab);
    EmbeddingTable table = load_table(train_emb, vocab);
    ContentContext ctx = build_content_context<float>(ds, vocab, table);
    ModelOptions opts;
    opts.init_mode = parse_init_mode(train_init);
    opts.content_mode = parse_content_mode(train_mode);
    opts.pooling = parse_pooling(train_pooling);
    opts.score_mode = parse_score_mode(train_score);
    ModelState state = init_model(ctx, opts, globals.seed);
    train_cfg.seed = globals.seed;
    std::vector<double> trace = train(state, ctx, ds.interactions, train_cfg);
    save_model(state, train_out);
    if (!globals.quiet) {
      std::cout << "loss " << trace.front() << " -> " << trace.back() << " over "
                << trace.size() << " epochs; model -> " << train_out << "\n";
    }
  });

  // evaluate
  auto* cmd_eval = app.add_subcommand("evaluate", "cold-start evaluation");
  std::string eval_data, eval_vocab, eval_emb, eval_model, eval_modes,
      eval_report;
  std::string eval_mode = "init", eval_pooling = "mean", eval_score = "dot";
  int eval_k = 10, eval_trials = 5;
  double eval_ratio = 0.1;
  bool eval_full_pool = false;
  TrainConfig eval_train_cfg;
  cmd_eval->add_option("--data", eval_data)->required();
  cmd_eval->add_option("--vocab", eval_vocab)->required();
  cmd_eval->add_option("--embeddings", eval_emb)->required();
  cmd_eval->add_option("--model", eval_model,
                       "checkpoint to evaluate on one split");
  cmd_eval->add_option("--modes", eval_modes,
                       "comma list; runs paired retraining trials");
  cmd_eval->add_option("--k", eval_k);
  cmd_eval->add_option("--trials", eval_trials);
  cmd_eval->add_option("--ratio", eval_ratio);
  cmd_eval->add_flag("--full-pool", eval_full_pool,
                     "rank against the whole catalog, not only cold items");
  cmd_eval->add_option("--epochs", eval_train_cfg.epochs);
  cmd_eval->add_option("--lr", eval_train_cfg.learning_rate);
  cmd_eval->add_option("--mode", eval_mode, "init|tied");
  cmd_eval->add_option("--pooling", eval_pooling, "mean|attention");
  cmd_eval->add_option("--score", eval_score, "dot|cosine");
  cmd_eval->add_option("--report", eval_report, "report JSON path");
  cmd_eval->callback([&] {
    active_stage = "evaluate";
    if (!eval_modes.empty()) {
      TrialsConfig trials;
      trials.train = eval_train_cfg;
      trials.options.content_mode = parse_content_mode(eval_mode);
      trials.options.pooling = parse_pooling(eval_pooling);
      trials.options.score_mode = parse_score_mode(eval_score);
      trials.ratio = eval_ratio;
      trials.k = eval_k;
      trials.trials = eval_trials;
      trials.base_seed = globals.seed;
      trials.full_catalog_pool = eval_full_pool;
      run_evaluate_modes(eval_data, eval_vocab, eval_emb, eval_modes, trials,
                         eval_report, globals);
      return;
    }
    if (eval_model.empty()) {
      fail(ErrorCategory::kConfig, "evaluate needs --model or --modes");
    }
    Dataset ds = load_dataset(eval_data);
    BpeVocab vocab = load_vocab(eval_vocab);
    EmbeddingTable table = load_table(eval_emb, vocab);
    ModelState state = load_model(eval_model);
    check_model_matches(state, vocab, table);
    ContentContext ctx = build_content_context<float>(ds, vocab, table);
    ColdStartSplit split = make_cold_split(ds, eval_ratio, globals.seed);
    EvalOptions opts;
    opts.k = eval_k;
    opts.full_catalog_pool = eval_full_pool;
    opts.threads = resolved_threads(globals);
    TrialMetrics m = evaluate(state, ctx, ds, split, opts);
    std::string json = trial_to_json(m, opts, globals.seed);
    if (!eval_report.empty()) {
      std::ofstream f(eval_report, std::ios::binary);
      f << json;
    }
    std::cout << json;
  });

  // bench
  auto* cmd_bench =
      app.add_subcommand("bench", "synthetic end-to-end comparison");
  BenchParams bench;
  std::string bench_config, bench_modes;
  cmd_bench->add_option("--config", bench_config, "key = value config file");
  cmd_bench->add_option("--out", bench.out_dir, "output directory");
  cmd_bench->add_option("--trials", bench.trials.trials);
  cmd_bench->add_option("--epochs", bench.trials.train.epochs);
  cmd_bench->add_option("--k", bench.trials.k);
  cmd_bench->add_option("--ratio", bench.trials.ratio);
  cmd_bench->add_option("--vocab-size", bench.vocab_size);
  cmd_bench->add_option("--dim", bench.dim);
  cmd_bench->add_option("--topics", bench.synth.n_topics);
  cmd_bench->add_option("--items-per-topic", bench.synth.items_per_topic);
  cmd_bench->add_option("--users", bench.synth.users);
  cmd_bench->add_option("--interactions-per-user",
                        bench.synth.interactions_per_user);
  cmd_bench->add_option("--sparsity", bench.synth.sparsity);
  cmd_bench->add_option("--modes", bench_modes, "comma list of init modes");
  cmd_bench->callback([&] {
    active_stage = "bench";
    if (!bench_config.empty()) {
      auto kv = read_config_file(bench_config);
      apply_key(kv, "trials", bench.trials.trials);
      apply_key(kv, "epochs", bench.trials.train.epochs);
      apply_key(kv, "k", bench.trials.k);
      apply_key(kv, "ratio", bench.trials.ratio);
      apply_key(kv, "vocab_size", bench.vocab_size);
      apply_key(kv, "dim", bench.dim);
      apply_key(kv, "topics", bench.synth.n_topics);
      apply_key(kv, "items_per_topic", bench.synth.items_per_topic);
      apply_key(kv, "users", bench.synth.users);
      apply_key(kv, "interactions_per_user",
                bench.synth.interactions_per_user);
      apply_key(kv, "sparsity", bench.synth.sparsity);
      apply_key(kv, "seed", bench.trials.base_seed);
      apply_key(kv, "learning_rate", bench.trials.train.learning_rate);
      apply_key(kv, "l2_weight", bench.trials.train.l2_weight);
      std::string modes_str;
      apply_key(kv, "modes", modes_str);
      if (!modes_str.empty()) bench.modes = parse_modes(modes_str);
      reject_unknown_keys(kv, bench_config);
    }
    if (app.count("--seed")) bench.trials.base_seed = globals.seed;
    if (!bench_modes.empty()) bench.modes = parse_modes(bench_modes);
    run_bench(bench, globals);
  });

  // project
  auto* cmd_proj =
      app.add_subcommand("project", "2-D projection of cold-item vectors");
  std::string proj_data, proj_vocab, proj_emb, proj_model, proj_labels,
      proj_out;
  double proj_ratio = 0.1;
  cmd_proj->add_option("--data", proj_data)->required();
  cmd_proj->add_option("--vocab", proj_vocab)->required();
  cmd_proj->add_option("--embeddings", proj_emb)->required();
  cmd_proj->add_option("--model", proj_model)->required();
  cmd_proj->add_option("--labels", proj_labels,
                       "item_external_id<TAB>label file");
  cmd_proj->add_option("--ratio", proj_ratio);
  cmd_proj->add_option("--out", proj_out, "output TSV")->required();
  cmd_proj->callback([&] {
    active_stage = "project";
    Dataset ds = load_dataset(proj_data);
    BpeVocab vocab = load_vocab(proj_vocab);
    EmbeddingTable table = load_table(proj_emb, vocab);
    ModelState state = load_model(proj_model);
    check_model_matches(state, vocab, table);
    ContentContext ctx = build_content_context<float>(ds, vocab, table);
    ColdStartSplit split = make_cold_split(ds, proj_ratio, globals.seed);

    MatrixX<float> vectors(split.cold_items.size(), ctx.dim);
    for (std::size_t c = 0; c < split.cold_items.size(); ++c) {
      std::uint32_t item = split.cold_items[c];
      vectors.row(static_cast<Eigen::Index>(c)) =
          cold_vector(state, ctx, ds.item_text[item],
                      detail::entity_fallback_seed(state.rng_seed, true, item))
              .values.transpose();
    }
    auto points = project_2d(
        vectors, cold_item_labels(ds, split.cold_items, proj_labels));
    save_projection(points, proj_out);
    if (!globals.quiet) {
      std::cout << points.size() << " cold items -> " << proj_out << "\n";
    }
  });

  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error category=config stage=cli: " << e.what() << "\n";
    return exit_code(ErrorCategory::kConfig);
  } catch (const Error& e) {
    std::cerr << "error category=" << category_name(e.category())
              << " stage=" << active_stage << ": " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error category=internal stage=" << active_stage << ": "
              << e.what() << "\n";
    return 1;
  }
  return 0;
}
