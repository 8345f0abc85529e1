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
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace coldrec {

struct Interaction {
  std::uint32_t user = 0;
  std::uint32_t item = 0;
  float weight = 1.0f;
  std::optional<std::int64_t> timestamp;
};

// Interaction record with external (string) ids, straight from a TSV row.
struct RawInteraction {
  std::string user;
  std::string item;
  float weight = 1.0f;
  std::optional<std::int64_t> timestamp;
};

// id -> text entries in file order, last write wins on duplicates.
struct MetadataFile {
  std::vector<std::pair<std::string, std::string>> entries;
  std::size_t duplicate_count = 0;
};

// Immutable once built. Dense ids are contiguous from 0, assigned in
// first-seen order over interactions, then over metadata-only entities.
struct Dataset {
  std::uint32_t n_users = 0;
  std::uint32_t n_items = 0;
  std::vector<Interaction> interactions;
  std::vector<std::string> item_text;                 // size n_items
  std::vector<std::optional<std::string>> user_text;  // size n_users
  std::vector<std::string> user_ids;                  // dense -> external
  std::vector<std::string> item_ids;
  std::unordered_map<std::string, std::uint32_t> user_index;
  std::unordered_map<std::string, std::uint32_t> item_index;
};

// interactions.tsv: "user<TAB>item<TAB>weight[<TAB>timestamp]"; '#' lines
// are comments, an optional "user_id..." header line is tolerated once.
std::vector<RawInteraction> load_interactions(const std::string& path);

// items.tsv / users.tsv: "id<TAB>text"; a lone id means empty text.
MetadataFile load_metadata(const std::string& path);

Dataset build_dataset(const std::vector<RawInteraction>& interactions,
                      const MetadataFile& item_meta,
                      const MetadataFile* user_meta = nullptr);

// Writes interactions.tsv, items.tsv and (when any user has text)
// users.tsv into dir. Re-importing the files reproduces the dataset.
void save_dataset(const Dataset& dataset, const std::string& dir);
Dataset load_dataset(const std::string& dir);

struct SynthConfig {
  int n_topics = 8;
  int items_per_topic = 40;
  int users = 500;
  int interactions_per_user = 30;
  int stems_per_topic = 3;
  // Fraction of each topic's items whose texts are built from held-out
  // words: full words unique to one item, so whole-word lookup can never
  // resolve them while their stems stay shared with training text.
  double cold_word_holdout_fraction = 0.5;
  double sparsity = 1.0;  // fraction of drawn interactions retained
  std::uint64_t seed = 42;
};

// Generation details the benchmark and tests need beyond the Dataset.
struct SynthInfo {
  std::vector<std::string> item_topic;      // dense item id -> topic label
  std::vector<std::uint8_t> cold_eligible;  // dense item id -> holdout item?
  std::vector<std::string> stems;
  std::vector<std::string> shared_words;
  std::vector<std::string> holdout_words;
};

// Topic-structured synthetic benchmark. Deterministic in the seed; every
// held-out word appears on exactly one cold-eligible item.
Dataset synth_benchmark(const SynthConfig& config, SynthInfo* info = nullptr);

struct DatasetStats {
  std::uint32_t n_users = 0;
  std::uint32_t n_items = 0;
  std::size_t n_interactions = 0;
  double sparsity = 0.0;  // |interactions| / (n_users * n_items)
  std::size_t min_text_len = 0;
  std::size_t max_text_len = 0;
  double mean_text_len = 0.0;
  std::size_t empty_metadata_items = 0;
};

DatasetStats dataset_stats(const Dataset& dataset);

}  // namespace coldrec
