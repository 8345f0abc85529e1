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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <unordered_set>

#include "coldrec/data.hpp"
#include "coldrec/errors.hpp"
#include "coldrec/tokenizer.hpp"

using namespace coldrec;

namespace {

std::string temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::create_directories(dir);
  return dir.string();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  f << content;
}

}  // namespace

TEST_CASE("load_interactions parses the schema") {
  std::string dir = temp_dir("coldrec_data_a");
  write_file(dir + "/interactions.tsv",
             "# comment\nu1\ti9\t1.0\t1700000000\nu2\ti9\t2.5\n");
  auto recs = load_interactions(dir + "/interactions.tsv");
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].user == "u1");
  CHECK(recs[0].item == "i9");
  CHECK(recs[0].weight == doctest::Approx(1.0));
  CHECK(recs[0].timestamp == 1700000000);
  CHECK_FALSE(recs[1].timestamp.has_value());
}

TEST_CASE("load_interactions empty file gives empty list") {
  std::string dir = temp_dir("coldrec_data_b");
  write_file(dir + "/interactions.tsv", "");
  CHECK(load_interactions(dir + "/interactions.tsv").empty());
}

TEST_CASE("load_interactions parse failures name the line") {
  std::string dir = temp_dir("coldrec_data_c");

  SUBCASE("two fields") {
    write_file(dir + "/interactions.tsv", "u1\ti9\t1\nu2\ti3\n");
    try {
      load_interactions(dir + "/interactions.tsv");
      FAIL("expected parse error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::kParse);
      CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
  }

  SUBCASE("non-numeric weight") {
    write_file(dir + "/interactions.tsv", "u1\ti9\thigh\n");
    CHECK_THROWS_AS(load_interactions(dir + "/interactions.tsv"), Error);
  }

  SUBCASE("duplicate header") {
    write_file(dir + "/interactions.tsv",
               "user_id\titem_id\tweight\nu1\ti9\t1\nuser_id\titem_id\tweight\n");
    try {
      load_interactions(dir + "/interactions.tsv");
      FAIL("expected parse error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::kParse);
    }
  }
}

TEST_CASE("load_metadata duplicates and empty text") {
  std::string dir = temp_dir("coldrec_data_d");
  write_file(dir + "/items.tsv",
             "i9\tToy Story (1995) animation\ni9\treplacement\ni2\t\n");
  MetadataFile meta = load_metadata(dir + "/items.tsv");
  REQUIRE(meta.entries.size() == 2);
  CHECK(meta.entries[0].second == "replacement");
  CHECK(meta.entries[1].second == "");
  CHECK(meta.duplicate_count == 1);
}

TEST_CASE("build_dataset assigns dense ids in first-seen order") {
  std::vector<RawInteraction> recs = {
      {"alice", "book", 1.0f, std::nullopt},
      {"bob", "film", 1.0f, std::nullopt},
      {"alice", "film", 1.0f, std::nullopt},
      {"carol", "game", 1.0f, std::nullopt},
  };
  MetadataFile items;
  items.entries = {{"book", "a book"}, {"game", "a game"}, {"song", "a song"}};
  Dataset ds = build_dataset(recs, items);
  CHECK(ds.n_users == 3);
  CHECK(ds.n_items == 4);  // song retained from metadata only
  CHECK(ds.user_index.at("alice") == 0);
  CHECK(ds.item_index.at("book") == 0);
  CHECK(ds.item_index.at("song") == 3);
  CHECK(ds.item_text[ds.item_index.at("film")] == "");  // no metadata
  CHECK(ds.item_text[ds.item_index.at("song")] == "a song");

  Dataset again = build_dataset(recs, items);
  CHECK(again.user_ids == ds.user_ids);
  CHECK(again.item_ids == ds.item_ids);

  CHECK_THROWS_AS(build_dataset({}, items), Error);
}

TEST_CASE("dataset export/import is a fixpoint") {
  SynthConfig cfg;
  cfg.n_topics = 3;
  cfg.items_per_topic = 6;
  cfg.users = 20;
  cfg.interactions_per_user = 5;
  cfg.seed = 9;
  Dataset ds = synth_benchmark(cfg);

  std::string dir = temp_dir("coldrec_data_roundtrip");
  save_dataset(ds, dir);
  Dataset back = load_dataset(dir);
  CHECK(back.n_users == ds.n_users);
  CHECK(back.n_items == ds.n_items);
  CHECK(back.user_ids == ds.user_ids);
  CHECK(back.item_ids == ds.item_ids);
  CHECK(back.item_text == ds.item_text);
  REQUIRE(back.interactions.size() == ds.interactions.size());
  for (std::size_t i = 0; i < ds.interactions.size(); ++i) {
    CHECK(back.interactions[i].user == ds.interactions[i].user);
    CHECK(back.interactions[i].item == ds.interactions[i].item);
  }

  // Exporting the re-imported dataset reproduces identical bytes.
  std::string dir2 = temp_dir("coldrec_data_roundtrip2");
  save_dataset(back, dir2);
  for (const char* name : {"/interactions.tsv", "/items.tsv"}) {
    std::ifstream a(dir + name, std::ios::binary);
    std::ifstream b(dir2 + name, std::ios::binary);
    std::string sa((std::istreambuf_iterator<char>(a)),
                   std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)),
                   std::istreambuf_iterator<char>());
    CHECK(sa == sb);
  }
}

TEST_CASE("synth_benchmark determinism and holdout hygiene") {
  SynthConfig cfg;
  cfg.n_topics = 4;
  cfg.items_per_topic = 10;
  cfg.users = 50;
  cfg.interactions_per_user = 8;
  cfg.seed = 77;

  SynthInfo info;
  Dataset ds = synth_benchmark(cfg, &info);
  Dataset ds2 = synth_benchmark(cfg);
  CHECK(ds.item_text == ds2.item_text);
  CHECK(ds.interactions.size() == ds2.interactions.size());
  CHECK(ds.n_items == 40);

  // Dense id ranges are tight.
  std::uint32_t max_user = 0, max_item = 0;
  for (const auto& row : ds.interactions) {
    max_user = std::max(max_user, row.user);
    max_item = std::max(max_item, row.item);
  }
  CHECK(max_user == ds.n_users - 1);

  // Every holdout word appears on exactly one cold-eligible item and on
  // no non-eligible item.
  std::unordered_set<std::string> holdout(info.holdout_words.begin(),
                                          info.holdout_words.end());
  CHECK(holdout.size() == info.holdout_words.size());
  for (std::uint32_t i = 0; i < ds.n_items; ++i) {
    if (info.cold_eligible[i]) continue;
    std::istringstream words(ds.item_text[i]);
    std::string w;
    while (words >> w) CHECK(holdout.count(w) == 0);
  }
}

TEST_CASE("synth_benchmark default config feeds BPE stem learning") {
  SynthConfig cfg;  // defaults: 8 topics, 40 items, 500 users, 30 per user
  SynthInfo info;
  Dataset ds = synth_benchmark(cfg, &info);
  CHECK(ds.n_items == 320);
  CHECK(ds.n_users == 500);

  // Each stem occurs in at least two distinct words of the corpus.
  std::unordered_map<std::string, std::unordered_set<std::string>> stem_words;
  for (const std::string& text : ds.item_text) {
    std::istringstream words(text);
    std::string w;
    while (words >> w) {
      for (const std::string& stem : info.stems) {
        if (w.rfind(stem, 0) == 0) stem_words[stem].insert(w);
      }
    }
  }
  for (const std::string& stem : info.stems) {
    CHECK(stem_words[stem].size() >= 2);
  }

  // BPE at vocab 600 learns a multi-byte token inside at least 90% of stems.
  BpeVocab vocab = train_bpe(ds.item_text, 600);
  int covered = 0;
  for (const std::string& stem : info.stems) {
    bool hit = false;
    for (const MergeRule& rule : vocab.merges()) {
      std::string token = rule.left + rule.right;
      if (token.size() >= 2 && stem.find(token) != std::string::npos) {
        hit = true;
        break;
      }
    }
    covered += hit;
  }
  CHECK(covered >= static_cast<int>(0.9 * info.stems.size()));

  // No holdout word became a whole-vocabulary token.
  for (const std::string& w : info.holdout_words) {
    CHECK_FALSE(vocab.find(w).has_value());
  }
}

TEST_CASE("synth_benchmark rejects bad configs") {
  SynthConfig cfg;
  cfg.cold_word_holdout_fraction = 0.0;
  CHECK_THROWS_AS(synth_benchmark(cfg), Error);
  cfg.cold_word_holdout_fraction = 0.01;
  cfg.items_per_topic = 3;  // rounds to zero eligible items
  try {
    synth_benchmark(cfg);
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::kConfig);
  }
}

TEST_CASE("dataset_stats") {
  std::vector<RawInteraction> recs;
  for (int u = 0; u < 3; ++u) {
    recs.push_back({"u" + std::to_string(u), "i" + std::to_string(u), 1.0f,
                    std::nullopt});
  }
  recs.push_back({"u0", "i1", 1.0f, std::nullopt});
  recs.push_back({"u1", "i3", 1.0f, std::nullopt});
  recs.push_back({"u2", "i3", 1.0f, std::nullopt});
  MetadataFile items;
  items.entries = {{"i0", "zero"}, {"i1", ""}, {"i2", ""}, {"i3", "three"}};
  Dataset ds = build_dataset(recs, items);
  DatasetStats stats = dataset_stats(ds);
  CHECK(stats.n_users == 3);
  CHECK(stats.n_items == 4);
  CHECK(stats.n_interactions == 6);
  CHECK(stats.sparsity == doctest::Approx(0.5));
  CHECK(stats.empty_metadata_items == 2);
}
