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

#include "coldrec/data.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "coldrec/errors.hpp"
#include "coldrec/rng.hpp"

namespace coldrec {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t line_no,
                             const std::string& why) {
  fail(ErrorCategory::kParse,
       path + ":" + std::to_string(line_no) + ": " + why);
}

bool parse_float(const std::string& s, float& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtof(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

bool parse_int64(const std::string& s, std::int64_t& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtoll(s.c_str(), &end, 10);
  return end == s.c_str() + s.size();
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::vector<RawInteraction> load_interactions(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCategory::kConfig, "cannot open interactions: " + path);

  std::vector<RawInteraction> records;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(f, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = split_tabs(line);
    if (fields[0] == "user_id") {
      if (header_seen) parse_fail(path, line_no, "duplicate header line");
      header_seen = true;
      continue;
    }
    if (fields.size() < 3 || fields.size() > 4) {
      parse_fail(path, line_no,
                 "expected 3 or 4 tab-separated fields, got " +
                     std::to_string(fields.size()));
    }
    RawInteraction rec;
    rec.user = fields[0];
    rec.item = fields[1];
    if (rec.user.empty() || rec.item.empty()) {
      parse_fail(path, line_no, "empty user or item id");
    }
    if (!parse_float(fields[2], rec.weight)) {
      parse_fail(path, line_no, "non-numeric weight '" + fields[2] + "'");
    }
    if (rec.weight <= 0.0f) {
      parse_fail(path, line_no, "weight must be positive");
    }
    if (fields.size() == 4) {
      std::int64_t ts = 0;
      if (!parse_int64(fields[3], ts)) {
        parse_fail(path, line_no, "non-numeric timestamp '" + fields[3] + "'");
      }
      rec.timestamp = ts;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

MetadataFile load_metadata(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCategory::kConfig, "cannot open metadata: " + path);

  MetadataFile meta;
  std::unordered_map<std::string, std::size_t> index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    std::string id = tab == std::string::npos ? line : line.substr(0, tab);
    std::string text = tab == std::string::npos ? "" : line.substr(tab + 1);
    if (id.empty()) parse_fail(path, line_no, "empty id");
    if (text.find('\t') != std::string::npos) {
      parse_fail(path, line_no, "text field contains a tab");
    }
    auto [it, inserted] = index.emplace(id, meta.entries.size());
    if (inserted) {
      meta.entries.emplace_back(std::move(id), std::move(text));
    } else {
      meta.entries[it->second].second = std::move(text);
      ++meta.duplicate_count;
    }
  }
  return meta;
}

Dataset build_dataset(const std::vector<RawInteraction>& interactions,
                      const MetadataFile& item_meta,
                      const MetadataFile* user_meta) {
  if (interactions.empty()) {
    fail(ErrorCategory::kDegenerate, "empty dataset: no interactions");
  }
  Dataset ds;
  auto intern = [](const std::string& ext, std::vector<std::string>& ids,
                   std::unordered_map<std::string, std::uint32_t>& index) {
    auto [it, inserted] =
        index.emplace(ext, static_cast<std::uint32_t>(ids.size()));
    if (inserted) ids.push_back(ext);
    return it->second;
  };

  ds.interactions.reserve(interactions.size());
  for (const RawInteraction& rec : interactions) {
    Interaction row;
    row.user = intern(rec.user, ds.user_ids, ds.user_index);
    row.item = intern(rec.item, ds.item_ids, ds.item_index);
    row.weight = rec.weight;
    row.timestamp = rec.timestamp;
    ds.interactions.push_back(row);
  }
  for (const auto& [id, text] : item_meta.entries) {
    intern(id, ds.item_ids, ds.item_index);
  }
  if (user_meta != nullptr) {
    for (const auto& [id, text] : user_meta->entries) {
      intern(id, ds.user_ids, ds.user_index);
    }
  }

  ds.n_users = static_cast<std::uint32_t>(ds.user_ids.size());
  ds.n_items = static_cast<std::uint32_t>(ds.item_ids.size());
  ds.item_text.assign(ds.n_items, "");
  for (const auto& [id, text] : item_meta.entries) {
    ds.item_text[ds.item_index.at(id)] = text;
  }
  ds.user_text.assign(ds.n_users, std::nullopt);
  if (user_meta != nullptr) {
    for (const auto& [id, text] : user_meta->entries) {
      ds.user_text[ds.user_index.at(id)] = text;
    }
  }
  return ds;
}

void save_dataset(const Dataset& dataset, const std::string& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir + "/interactions.tsv", std::ios::binary);
    if (!f) fail(ErrorCategory::kConfig, "cannot write " + dir);
    for (const Interaction& row : dataset.interactions) {
      char weight[32];
      std::snprintf(weight, sizeof(weight), "%g",
                    static_cast<double>(row.weight));
      f << dataset.user_ids[row.user] << '\t' << dataset.item_ids[row.item]
        << '\t' << weight;
      if (row.timestamp) f << '\t' << *row.timestamp;
      f << '\n';
    }
  }
  {
    std::ofstream f(dir + "/items.tsv", std::ios::binary);
    for (std::uint32_t i = 0; i < dataset.n_items; ++i) {
      f << dataset.item_ids[i] << '\t' << dataset.item_text[i] << '\n';
    }
  }
  bool any_user_text = false;
  for (const auto& t : dataset.user_text) any_user_text |= t.has_value();
  if (any_user_text) {
    std::ofstream f(dir + "/users.tsv", std::ios::binary);
    for (std::uint32_t u = 0; u < dataset.n_users; ++u) {
      if (dataset.user_text[u]) {
        f << dataset.user_ids[u] << '\t' << *dataset.user_text[u] << '\n';
      }
    }
  }
}

Dataset load_dataset(const std::string& dir) {
  std::vector<RawInteraction> interactions =
      load_interactions(dir + "/interactions.tsv");
  MetadataFile items = load_metadata(dir + "/items.tsv");
  std::optional<MetadataFile> users;
  if (std::filesystem::exists(dir + "/users.tsv")) {
    users = load_metadata(dir + "/users.tsv");
  }
  return build_dataset(interactions, items, users ? &*users : nullptr);
}

namespace {

std::string random_letters(Rng& rng, int len) {
  std::string s;
  s.reserve(len);
  for (int i = 0; i < len; ++i) {
    s.push_back(static_cast<char>('a' + rng.below(26)));
  }
  return s;
}

bool prefix_related(const std::string& a, const std::string& b) {
  const std::string& shorter = a.size() <= b.size() ? a : b;
  const std::string& longer = a.size() <= b.size() ? b : a;
  return longer.compare(0, shorter.size(), shorter) == 0;
}

// Draws a string no existing entry is a prefix of (and vice versa).
// Prefix-freeness is what keeps held-out words unmergeable: a word that
// prefixes another would lend its completing pair extra frequency.
std::string fresh_prefix_free(Rng& rng, std::vector<std::string>& pool,
                              int min_len, int max_len) {
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::string s = random_letters(
        rng, min_len + static_cast<int>(rng.below(max_len - min_len + 1)));
    bool clash = false;
    for (const std::string& other : pool) {
      if (prefix_related(s, other)) {
        clash = true;
        break;
      }
    }
    if (!clash) {
      pool.push_back(s);
      return s;
    }
  }
  fail(ErrorCategory::kConfig,
       "synthetic word space exhausted; reduce items or words per topic");
}

}  // namespace

Dataset synth_benchmark(const SynthConfig& config, SynthInfo* info) {
  if (config.n_topics < 1 || config.items_per_topic < 1 || config.users < 1 ||
      config.interactions_per_user < 1 || config.stems_per_topic < 1) {
    fail(ErrorCategory::kConfig, "synthetic config counts must be positive");
  }
  if (config.cold_word_holdout_fraction <= 0.0 ||
      config.cold_word_holdout_fraction > 1.0 || config.sparsity <= 0.0 ||
      config.sparsity > 1.0) {
    fail(ErrorCategory::kConfig, "synthetic config fractions must be in (0,1]");
  }
  int eligible_per_topic = static_cast<int>(
      config.items_per_topic * config.cold_word_holdout_fraction + 0.5);
  if (eligible_per_topic < 1) {
    fail(ErrorCategory::kConfig,
         "config produces zero cold-eligible items per topic");
  }

  Rng rng(mix_seed(config.seed, 0x5d));
  const int n_items = config.n_topics * config.items_per_topic;
  constexpr int kSuffixesPerStem = 4;

  std::vector<std::vector<std::string>> topic_stems(config.n_topics);
  std::vector<std::vector<std::string>> topic_shared(config.n_topics);
  std::vector<std::string> all_stems, all_shared, all_holdout;

  // Prefix-free stems, and per stem a prefix-free suffix pool: no full
  // word is ever a prefix of another full word.
  std::unordered_map<std::string, std::vector<std::string>> stem_suffixes;
  for (int t = 0; t < config.n_topics; ++t) {
    for (int s = 0; s < config.stems_per_topic; ++s) {
      std::string stem = fresh_prefix_free(rng, all_stems, 4, 6);
      topic_stems[t].push_back(stem);
      for (int v = 0; v < kSuffixesPerStem; ++v) {
        std::string suffix = fresh_prefix_free(rng, stem_suffixes[stem], 2, 3);
        topic_shared[t].push_back(stem + suffix);
        all_shared.push_back(stem + suffix);
      }
    }
  }

  // Which items of each topic carry held-out words.
  std::vector<std::uint8_t> eligible(n_items, 0);
  for (int t = 0; t < config.n_topics; ++t) {
    std::vector<int> order(config.items_per_topic);
    for (int i = 0; i < config.items_per_topic; ++i) order[i] = i;
    rng.shuffle(order);
    for (int e = 0; e < eligible_per_topic; ++e) {
      eligible[t * config.items_per_topic + order[e]] = 1;
    }
  }

  std::vector<std::string> item_words(n_items);
  for (int g = 0; g < n_items; ++g) {
    int t = g / config.items_per_topic;
    int n_words = 5 + static_cast<int>(rng.below(6));  // 5..10
    std::string text;
    if (eligible[g]) {
      // Every word is unique to this item: its completing pair can never
      // reach frequency 2, so BPE never learns it as a whole token.
      for (int w = 0; w < n_words; ++w) {
        const std::string& stem =
            topic_stems[t][rng.below(topic_stems[t].size())];
        std::string suffix = fresh_prefix_free(rng, stem_suffixes[stem], 2, 3);
        all_holdout.push_back(stem + suffix);
        if (w > 0) text.push_back(' ');
        text += stem + suffix;
      }
    } else {
      std::vector<std::string> pool = topic_shared[t];
      rng.shuffle(pool);
      int take = std::min<int>(n_words, static_cast<int>(pool.size()));
      for (int w = 0; w < take; ++w) {
        if (w > 0) text.push_back(' ');
        text += pool[w];
      }
    }
    item_words[g] = std::move(text);
  }

  std::vector<RawInteraction> records;
  records.reserve(static_cast<std::size_t>(config.users) *
                  config.interactions_per_user);
  for (int u = 0; u < config.users; ++u) {
    int primary = static_cast<int>(rng.below(config.n_topics));
    std::unordered_set<int> seen;
    int attempts = config.interactions_per_user * 60;
    std::vector<int> picked;
    while (static_cast<int>(picked.size()) < config.interactions_per_user &&
           attempts-- > 0) {
      int item;
      if (rng.uniform() < 0.85) {
        item = primary * config.items_per_topic +
               static_cast<int>(rng.below(config.items_per_topic));
      } else {
        item = static_cast<int>(rng.below(n_items));
      }
      if (seen.insert(item).second) picked.push_back(item);
    }
    for (int item : picked) {
      if (config.sparsity < 1.0 && rng.uniform() >= config.sparsity) continue;
      RawInteraction rec;
      rec.user = "u" + std::to_string(u);
      rec.item = "i" + std::to_string(item);
      rec.weight = 1.0f;
      records.push_back(std::move(rec));
    }
  }

  MetadataFile items;
  items.entries.reserve(n_items);
  for (int g = 0; g < n_items; ++g) {
    items.entries.emplace_back("i" + std::to_string(g), item_words[g]);
  }

  Dataset ds = build_dataset(records, items);
  if (info != nullptr) {
    info->item_topic.assign(ds.n_items, "");
    info->cold_eligible.assign(ds.n_items, 0);
    for (int g = 0; g < n_items; ++g) {
      std::uint32_t dense = ds.item_index.at("i" + std::to_string(g));
      info->item_topic[dense] =
          "topic" + std::to_string(g / config.items_per_topic);
      info->cold_eligible[dense] = eligible[g];
    }
    info->stems = std::move(all_stems);
    info->shared_words = std::move(all_shared);
    info->holdout_words = std::move(all_holdout);
  }
  return ds;
}

DatasetStats dataset_stats(const Dataset& dataset) {
  DatasetStats stats;
  stats.n_users = dataset.n_users;
  stats.n_items = dataset.n_items;
  stats.n_interactions = dataset.interactions.size();
  stats.sparsity =
      static_cast<double>(stats.n_interactions) /
      (static_cast<double>(dataset.n_users) * dataset.n_items);
  std::size_t total = 0;
  stats.min_text_len = dataset.item_text.empty() ? 0 : SIZE_MAX;
  for (const std::string& text : dataset.item_text) {
    total += text.size();
    stats.min_text_len = std::min(stats.min_text_len, text.size());
    stats.max_text_len = std::max(stats.max_text_len, text.size());
    if (text.empty()) ++stats.empty_metadata_items;
  }
  stats.mean_text_len =
      dataset.item_text.empty()
          ? 0.0
          : static_cast<double>(total) / dataset.item_text.size();
  return stats;
}

}  // namespace coldrec
