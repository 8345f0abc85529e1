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

#include "coldrec/tokenizer.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include "coldrec/errors.hpp"
#include "coldrec/rng.hpp"

namespace coldrec {

namespace {

constexpr std::uint64_t pack_pair(TokenId a, TokenId b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

// --- UTF-8 / normalization helpers ---------------------------------------

struct Utf8Char {
  std::uint32_t cp = 0;
  std::size_t len = 1;
  bool valid = false;
};

Utf8Char decode_utf8(const unsigned char* s, std::size_t remaining) {
  Utf8Char c;
  unsigned char c0 = s[0];
  if (c0 < 0x80) {
    c.cp = c0;
    c.len = 1;
    c.valid = true;
  } else if ((c0 >> 5) == 0x6 && remaining >= 2 && (s[1] & 0xc0) == 0x80) {
    c.cp = (static_cast<std::uint32_t>(c0 & 0x1f) << 6) | (s[1] & 0x3f);
    c.len = 2;
    c.valid = c.cp >= 0x80;
  } else if ((c0 >> 4) == 0xe && remaining >= 3 && (s[1] & 0xc0) == 0x80 &&
             (s[2] & 0xc0) == 0x80) {
    c.cp = (static_cast<std::uint32_t>(c0 & 0x0f) << 12) |
           (static_cast<std::uint32_t>(s[1] & 0x3f) << 6) | (s[2] & 0x3f);
    c.len = 3;
    c.valid = c.cp >= 0x800;
  } else if ((c0 >> 3) == 0x1e && remaining >= 4 && (s[1] & 0xc0) == 0x80 &&
             (s[2] & 0xc0) == 0x80 && (s[3] & 0xc0) == 0x80) {
    c.cp = (static_cast<std::uint32_t>(c0 & 0x07) << 18) |
           (static_cast<std::uint32_t>(s[1] & 0x3f) << 12) |
           (static_cast<std::uint32_t>(s[2] & 0x3f) << 6) | (s[3] & 0x3f);
    c.len = 4;
    c.valid = c.cp >= 0x10000 && c.cp <= 0x10ffff;
  }
  return c;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp <= 0x7f) {
    out.push_back(static_cast<char>(cp));
  } else if (cp <= 0x7ff) {
    out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else if (cp <= 0xffff) {
    out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else {
    out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  }
}

bool is_space_cp(std::uint32_t cp) {
  switch (cp) {
    case 0x09:
    case 0x0a:
    case 0x0b:
    case 0x0c:
    case 0x0d:
    case 0x20:
    case 0xa0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202f:
    case 0x205f:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200a;
  }
}

bool is_punct_cp(std::uint32_t cp) {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2f) || (cp >= 0x3a && cp <= 0x40) ||
           (cp >= 0x5b && cp <= 0x60) || (cp >= 0x7b && cp <= 0x7e);
  }
  switch (cp) {
    case 0xa1:   // inverted exclamation
    case 0xa6:   // broken bar
    case 0xa7:   // section sign
    case 0xab:   // left guillemet
    case 0xb6:   // pilcrow
    case 0xb7:   // middle dot
    case 0xbb:   // right guillemet
    case 0xbf:   // inverted question mark
      return true;
    default:
      break;
  }
  return (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205e) ||
         (cp >= 0x2e00 && cp <= 0x2e7f) || (cp >= 0x3001 && cp <= 0x3003) ||
         (cp >= 0x3008 && cp <= 0x3011) || (cp >= 0x3014 && cp <= 0x301f) ||
         (cp >= 0xff01 && cp <= 0xff0f) || (cp >= 0xff1a && cp <= 0xff20) ||
         (cp >= 0xff3b && cp <= 0xff40) || (cp >= 0xff5b && cp <= 0xff65);
}

std::uint32_t to_lower_cp(std::uint32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xc0 && cp <= 0xde && cp != 0xd7) return cp + 0x20;  // Latin-1
  if (cp >= 0x391 && cp <= 0x3a1) return cp + 0x20;              // Greek
  if (cp >= 0x3a3 && cp <= 0x3ab) return cp + 0x20;
  if (cp >= 0x410 && cp <= 0x42f) return cp + 0x20;              // Cyrillic
  if (cp >= 0x400 && cp <= 0x40f) return cp + 0x50;
  return cp;
}

// --- hex helpers for the vocabulary file ----------------------------------

std::string to_hex(std::string_view bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 0xf]);
  }
  return out;
}

std::optional<std::string> from_hex(std::string_view hex) {
  if (hex.empty() || hex.size() % 2 != 0) return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::string out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = nibble(hex[i]);
    int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(static_cast<char>((hi << 4) | lo));
  }
  return out;
}

}  // namespace

// --- BpeVocab -------------------------------------------------------------

BpeVocab::BpeVocab() : BpeVocab({}, kBaseAlphabet) {}

BpeVocab::BpeVocab(std::vector<MergeRule> merges, std::uint32_t target_size)
    : merges_(std::move(merges)), target_size_(target_size) {
  if (target_size_ < kBaseAlphabet) {
    fail(ErrorCategory::kConfig, "vocabulary target size below base alphabet");
  }
  if (kBaseAlphabet + merges_.size() > target_size_) {
    fail(ErrorCategory::kIntegrity,
         "merge count exceeds vocabulary target size");
  }
  id_to_token_.reserve(kBaseAlphabet + merges_.size());
  token_to_id_.reserve(kBaseAlphabet + merges_.size());
  for (std::size_t b = 0; b < kBaseAlphabet; ++b) {
    id_to_token_.emplace_back(1, static_cast<char>(b));
    token_to_id_.emplace(id_to_token_.back(), static_cast<TokenId>(b));
  }
  for (std::size_t r = 0; r < merges_.size(); ++r) {
    const MergeRule& rule = merges_[r];
    if (rule.rank != r) {
      fail(ErrorCategory::kIntegrity,
           "merge ranks not contiguous at rank " + std::to_string(r));
    }
    auto left = token_to_id_.find(rule.left);
    auto right = token_to_id_.find(rule.right);
    if (left == token_to_id_.end() || right == token_to_id_.end()) {
      fail(ErrorCategory::kIntegrity,
           "merge rank " + std::to_string(r) + " references unknown token");
    }
    std::string merged = rule.left + rule.right;
    TokenId id = static_cast<TokenId>(kBaseAlphabet + r);
    if (!token_to_id_.emplace(merged, id).second) {
      fail(ErrorCategory::kIntegrity,
           "duplicate token produced by merge rank " + std::to_string(r));
    }
    id_to_token_.push_back(std::move(merged));
    merge_map_.emplace(pack_pair(left->second, right->second),
                       std::make_pair(rule.rank, id));
  }

  auto hash_str = [](const std::string& s, std::uint64_t h) {
    std::uint32_t len = static_cast<std::uint32_t>(s.size());
    h = fnv1a64(&len, sizeof(len), h);
    return fnv1a64(s.data(), s.size(), h);
  };
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const MergeRule& rule : merges_) {
    h = fnv1a64(&rule.rank, sizeof(rule.rank), h);
    h = hash_str(rule.left, h);
    h = hash_str(rule.right, h);
  }
  for (TokenId id = 0; id < id_to_token_.size(); ++id) {
    h = fnv1a64(&id, sizeof(id), h);
    h = hash_str(id_to_token_[id], h);
  }
  content_hash_ = h;
}

const std::string& BpeVocab::token(TokenId id) const {
  if (id >= id_to_token_.size()) {
    fail(ErrorCategory::kIntegrity,
         "token id " + std::to_string(id) + " out of range for vocabulary of " +
             std::to_string(id_to_token_.size()));
  }
  return id_to_token_[id];
}

std::optional<TokenId> BpeVocab::find(std::string_view token_bytes) const {
  auto it = token_to_id_.find(std::string(token_bytes));
  if (it == token_to_id_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::pair<std::uint32_t, TokenId>> BpeVocab::merge_of(
    TokenId left, TokenId right) const {
  auto it = merge_map_.find(pack_pair(left, right));
  if (it == merge_map_.end()) return std::nullopt;
  return it->second;
}

// --- normalize ------------------------------------------------------------

std::string normalize_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  std::size_t i = 0;
  const auto* bytes = reinterpret_cast<const unsigned char*>(raw.data());
  while (i < raw.size()) {
    Utf8Char c = decode_utf8(bytes + i, raw.size() - i);
    if (!c.valid) {
      // Undecodable byte: passed through unchanged.
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(raw[i]);
      ++i;
      continue;
    }
    if (is_space_cp(c.cp) || is_punct_cp(c.cp)) {
      pending_space = true;
    } else {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      append_utf8(out, to_lower_cp(c.cp));
    }
    i += c.len;
  }
  return out;
}

// --- training ---------------------------------------------------------------

BpeVocab train_bpe(const std::vector<std::string>& corpus,
                   std::uint32_t target_size) {
  if (target_size < BpeVocab::kBaseAlphabet + 1) {
    fail(ErrorCategory::kConfig,
         "vocabulary size must be at least " +
             std::to_string(BpeVocab::kBaseAlphabet + 1));
  }

  // Distinct words with corpus frequencies, in first-seen order.
  struct Word {
    std::vector<TokenId> sym;
    std::int64_t count = 0;
  };
  std::vector<Word> words;
  std::unordered_map<std::string, std::size_t> word_index;
  for (const std::string& text : corpus) {
    std::string norm = normalize_text(text);
    std::size_t start = 0;
    while (start <= norm.size()) {
      std::size_t end = norm.find(' ', start);
      if (end == std::string::npos) end = norm.size();
      if (end > start) {
        std::string w = norm.substr(start, end - start);
        auto [it, inserted] = word_index.emplace(w, words.size());
        if (inserted) {
          Word word;
          word.sym.reserve(w.size());
          for (unsigned char c : w) word.sym.push_back(c);
          words.push_back(std::move(word));
        }
        words[it->second].count += 1;
      }
      start = end + 1;
    }
  }
  if (words.empty()) {
    fail(ErrorCategory::kConfig, "corpus is empty after normalization");
  }

  std::vector<std::string> token_str;
  token_str.reserve(target_size);
  for (std::size_t b = 0; b < BpeVocab::kBaseAlphabet; ++b) {
    token_str.emplace_back(1, static_cast<char>(b));
  }

  std::unordered_map<std::uint64_t, std::int64_t> pair_count;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> pair_words;

  auto add_word = [&](std::uint32_t wi) {
    const Word& w = words[wi];
    for (std::size_t j = 0; j + 1 < w.sym.size(); ++j) {
      std::uint64_t key = pack_pair(w.sym[j], w.sym[j + 1]);
      pair_count[key] += w.count;
      pair_words[key].push_back(wi);
    }
  };
  auto remove_word = [&](std::uint32_t wi) {
    const Word& w = words[wi];
    for (std::size_t j = 0; j + 1 < w.sym.size(); ++j) {
      pair_count[pack_pair(w.sym[j], w.sym[j + 1])] -= w.count;
    }
  };

  for (std::uint32_t wi = 0; wi < words.size(); ++wi) add_word(wi);

  std::vector<MergeRule> merges;
  while (BpeVocab::kBaseAlphabet + merges.size() < target_size) {
    bool found = false;
    std::uint64_t best_key = 0;
    std::int64_t best_count = 0;
    for (const auto& [key, count] : pair_count) {
      if (count < 2) continue;
      if (!found || count > best_count) {
        found = true;
        best_key = key;
        best_count = count;
        continue;
      }
      if (count == best_count) {
        TokenId a = static_cast<TokenId>(key >> 32);
        TokenId b = static_cast<TokenId>(key & 0xffffffffu);
        TokenId ba = static_cast<TokenId>(best_key >> 32);
        TokenId bb = static_cast<TokenId>(best_key & 0xffffffffu);
        if (token_str[a] < token_str[ba] ||
            (token_str[a] == token_str[ba] && token_str[b] < token_str[bb])) {
          best_key = key;
        }
      }
    }
    if (!found) break;

    TokenId left = static_cast<TokenId>(best_key >> 32);
    TokenId right = static_cast<TokenId>(best_key & 0xffffffffu);
    TokenId merged = static_cast<TokenId>(token_str.size());
    MergeRule rule{token_str[left], token_str[right],
                   static_cast<std::uint32_t>(merges.size())};
    token_str.push_back(rule.left + rule.right);
    merges.push_back(std::move(rule));

    std::vector<std::uint32_t> affected = pair_words[best_key];
    std::sort(affected.begin(), affected.end());
    affected.erase(std::unique(affected.begin(), affected.end()),
                   affected.end());
    for (std::uint32_t wi : affected) {
      Word& w = words[wi];
      bool contains = false;
      for (std::size_t j = 0; j + 1 < w.sym.size(); ++j) {
        if (w.sym[j] == left && w.sym[j + 1] == right) {
          contains = true;
          break;
        }
      }
      if (!contains) continue;  // stale occurrence entry
      remove_word(wi);
      std::vector<TokenId> next;
      next.reserve(w.sym.size());
      std::size_t j = 0;
      while (j < w.sym.size()) {
        if (j + 1 < w.sym.size() && w.sym[j] == left && w.sym[j + 1] == right) {
          next.push_back(merged);
          j += 2;
        } else {
          next.push_back(w.sym[j]);
          j += 1;
        }
      }
      w.sym = std::move(next);
      add_word(wi);
    }
    pair_words.erase(best_key);
  }

  return BpeVocab(std::move(merges), target_size);
}

// --- encode / decode --------------------------------------------------------

namespace {

void encode_word(const BpeVocab& vocab, std::string_view word,
                 std::vector<TokenId>& out) {
  std::vector<TokenId> ids;
  ids.reserve(word.size());
  for (unsigned char c : word) ids.push_back(c);

  constexpr std::uint32_t kNoMerge = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> ranks(ids.size(), kNoMerge);
  auto rank_at = [&](std::size_t j) -> std::uint32_t {
    auto m = vocab.merge_of(ids[j], ids[j + 1]);
    return m ? m->first : kNoMerge;
  };
  for (std::size_t j = 0; j + 1 < ids.size(); ++j) ranks[j] = rank_at(j);

  std::size_t n = ids.size();
  while (n > 1) {
    std::uint32_t best = kNoMerge;
    std::size_t best_j = 0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      if (ranks[j] < best) {
        best = ranks[j];
        best_j = j;
      }
    }
    if (best == kNoMerge) break;
    ids[best_j] = vocab.merge_of(ids[best_j], ids[best_j + 1])->second;
    for (std::size_t j = best_j + 1; j + 1 < n; ++j) {
      ids[j] = ids[j + 1];
      ranks[j] = ranks[j + 1];
    }
    --n;
    ranks[best_j] = best_j + 1 < n ? rank_at(best_j) : kNoMerge;
    if (best_j > 0) ranks[best_j - 1] = rank_at(best_j - 1);
  }
  out.insert(out.end(), ids.begin(), ids.begin() + n);
}

}  // namespace

TokenSequence encode(const BpeVocab& vocab, std::string_view text) {
  TokenSequence seq;
  seq.source_len_bytes = text.size();
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == ' ') {
      seq.ids.push_back(BpeVocab::kSpaceToken);
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ') ++j;
    encode_word(vocab, text.substr(i, j - i), seq.ids);
    i = j;
  }
  return seq;
}

std::string decode(const BpeVocab& vocab, const TokenSequence& seq) {
  std::string out;
  out.reserve(seq.source_len_bytes);
  for (TokenId id : seq.ids) out += vocab.token(id);
  return out;
}

// --- persistence --------------------------------------------------------------

void save_vocab(const BpeVocab& vocab, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCategory::kConfig, "cannot open for writing: " + path);
  char hash_hex[17];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(vocab.content_hash()));
  f << "bpevocab 1 " << vocab.target_size() << ' ' << hash_hex << '\n';
  for (const MergeRule& rule : vocab.merges()) {
    f << rule.rank << ' ' << to_hex(rule.left) << ' ' << to_hex(rule.right)
      << '\n';
  }
  if (!f) fail(ErrorCategory::kConfig, "write failed: " + path);
}

BpeVocab load_vocab(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCategory::kConfig, "cannot open vocabulary: " + path);

  auto parse_fail = [&](std::size_t line_no, const std::string& why) {
    fail(ErrorCategory::kParse,
         path + ":" + std::to_string(line_no) + ": " + why);
  };

  std::string line;
  if (!std::getline(f, line)) parse_fail(1, "missing header");
  std::istringstream header(line);
  std::string magic;
  int version = 0;
  std::uint32_t target_size = 0;
  std::string hash_hex;
  if (!(header >> magic >> version >> target_size >> hash_hex) ||
      magic != "bpevocab") {
    parse_fail(1, "bad header, expected 'bpevocab 1 <size> <hash>'");
  }
  if (version != 1) parse_fail(1, "unsupported version");
  if (hash_hex.size() != 16) parse_fail(1, "bad content hash field");
  std::uint64_t stated_hash = 0;
  for (char c : hash_hex) {
    int v = c >= '0' && c <= '9'   ? c - '0'
            : c >= 'a' && c <= 'f' ? c - 'a' + 10
            : c >= 'A' && c <= 'F' ? c - 'A' + 10
                                   : -1;
    if (v < 0) parse_fail(1, "bad content hash field");
    stated_hash = (stated_hash << 4) | static_cast<std::uint64_t>(v);
  }

  std::vector<MergeRule> merges;
  std::size_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::uint32_t rank = 0;
    std::string left_hex, right_hex, extra;
    if (!(row >> rank >> left_hex >> right_hex)) {
      parse_fail(line_no, "expected '<rank> <left-hex> <right-hex>'");
    }
    if (row >> extra) parse_fail(line_no, "trailing fields");
    auto left = from_hex(left_hex);
    auto right = from_hex(right_hex);
    if (!left || !right) parse_fail(line_no, "bad hex token");
    merges.push_back(MergeRule{std::move(*left), std::move(*right), rank});
  }

  BpeVocab vocab(std::move(merges), target_size);
  if (vocab.content_hash() != stated_hash) {
    fail(ErrorCategory::kIntegrity,
         path + ": content hash mismatch (file corrupt or truncated)");
  }
  return vocab;
}

}  // namespace coldrec
