// Copyright 2026 The spot authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "spot/text_embedding.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "spot/error.hpp"

namespace spot {

namespace {

// English bigram frequency table (descending). Used only to seed default
// configs; training replaces the lists with corpus-derived ones.
const char* const kFrequentBigrams[] = {
    "th", "he", "in", "er", "an", "re", "on", "at", "en", "nd", "ti", "es",
    "or", "te", "of", "ed", "is", "it", "al", "ar", "st", "to", "nt", "ng",
    "se", "ha", "as", "ou", "io", "le", "ve", "co", "me", "de", "hi", "ri",
    "ro", "ic", "ne", "ea", "ra", "ce", "li", "ch", "ll", "be", "ma", "si",
    "om", "ur", "ca", "el", "ta", "la", "ns", "di", "fo", "ho", "pe", "ec",
    "pr", "no", "ct", "us", "ac", "ot", "il", "tr", "ly", "nc", "et", "ut",
    "ss", "so", "rs", "un", "lo", "wa", "ge", "ie", "wh", "ee", "wi", "em",
    "ad", "ol", "rt", "po", "we", "na", "ul", "ni", "ts", "mo", "ow", "pa",
    "im", "mi", "ai", "sh", "ir", "su", "id", "os", "iv", "ia", "am", "fi",
    "ci", "vi", "pl", "ig", "tu", "ev", "ld", "ry", "mp", "fe", "bl", "ab",
    "gh", "ty", "op", "wo", "sa", "ay", "ex", "ke", "fr", "oo", "av", "ag",
    "if", "ap", "gr", "od", "bo", "sp", "rd", "do", "uc", "bu", "ei", "ov",
    "by", "rm", "ep", "tt", "fa", "ga",
};
constexpr int kFrequentBigramCount =
    static_cast<int>(sizeof(kFrequentBigrams) / sizeof(kFrequentBigrams[0]));

int level_sum(const std::vector<int>& levels) {
  return std::accumulate(levels.begin(), levels.end(), 0);
}

}  // namespace

EmbeddingConfig EmbeddingConfig::defaults() {
  EmbeddingConfig cfg;
  cfg.word_bigrams.assign(kFrequentBigrams, kFrequentBigrams + 50);
  cfg.index_bigrams.assign(kFrequentBigrams, kFrequentBigrams + 150);
  cfg.validate();
  return cfg;
}

int EmbeddingConfig::phoc_dim() const {
  return static_cast<int>(alphabet.size()) * level_sum(char_levels) +
         static_cast<int>(word_bigrams.size()) * 2;
}

int EmbeddingConfig::phob_dim() const {
  return static_cast<int>(index_bigrams.size()) * 2 +
         10 * level_sum(digit_levels_phob);
}

int EmbeddingConfig::dim(EmbeddingKind kind) const {
  return kind == EmbeddingKind::phoc ? phoc_dim() : phob_dim();
}

void EmbeddingConfig::validate() const {
  std::set<char> chars(alphabet.begin(), alphabet.end());
  if (chars.size() != alphabet.size())
    fail(Err::Usage, "alphabet has duplicate symbols");
  auto check_bigrams = [this](const std::vector<std::string>& list,
                              const char* name) {
    std::set<std::string> seen;
    for (const auto& b : list) {
      if (b.size() != 2)
        fail(Err::Usage, std::string(name) + " entry is not 2 characters: " + b);
      if (!seen.insert(b).second)
        fail(Err::Usage, std::string(name) + " has duplicate entry: " + b);
      for (char c : b)
        if (symbol_index(c) < 0)
          fail(Err::Usage,
               std::string(name) + " entry uses non-alphabet character: " + b);
    }
  };
  check_bigrams(word_bigrams, "word_bigrams");
  check_bigrams(index_bigrams, "index_bigrams");
  for (int l : char_levels)
    if (l < 1) fail(Err::Usage, "char level must be >= 1");
  for (int l : digit_levels_phob)
    if (l < 1) fail(Err::Usage, "digit level must be >= 1");
}

int EmbeddingConfig::symbol_index(char c) const {
  const auto pos = alphabet.find(c);
  return pos == std::string::npos ? -1 : static_cast<int>(pos);
}

int EmbeddingConfig::word_bigram_index(std::string_view b) const {
  for (std::size_t i = 0; i < word_bigrams.size(); ++i)
    if (word_bigrams[i] == b) return static_cast<int>(i);
  return -1;
}

int EmbeddingConfig::index_bigram_index(std::string_view b) const {
  for (std::size_t i = 0; i < index_bigrams.size(); ++i)
    if (index_bigrams[i] == b) return static_cast<int>(i);
  return -1;
}

bool span_occupies_region(int pos, int span_chars, int word_len, int region,
                          int level) {
  // All quantities scaled by word_len * level so the >= 1/2 test is exact.
  const long long lo = std::max<long long>(
      static_cast<long long>(pos) * level,
      static_cast<long long>(region) * word_len);
  const long long hi = std::min<long long>(
      static_cast<long long>(pos + span_chars) * level,
      static_cast<long long>(region + 1) * word_len);
  const long long overlap = std::max<long long>(0, hi - lo);
  return 2 * overlap >= static_cast<long long>(span_chars) * level;
}

std::string normalize_text(std::string_view text, const EmbeddingConfig& cfg) {
  if (text.empty()) fail(Err::EmptyString, "empty string");
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = static_cast<char>(
        std::tolower(static_cast<unsigned char>(text[i])));
    if (cfg.symbol_index(c) < 0)
      fail(Err::UnsupportedCharacter,
           "unsupported character '" + std::string(1, text[i]) +
               "' at position " + std::to_string(i));
    out.push_back(c);
  }
  return out;
}

PyramidalTextEmbedding phoc_encode(std::string_view text,
                                   const EmbeddingConfig& cfg) {
  const std::string word = normalize_text(text, cfg);
  const int n = static_cast<int>(word.size());
  const int num_symbols = static_cast<int>(cfg.alphabet.size());

  PyramidalTextEmbedding emb;
  emb.kind = EmbeddingKind::phoc;
  emb.bits.assign(static_cast<std::size_t>(cfg.phoc_dim()), 0);

  int offset = 0;
  for (int level : cfg.char_levels) {
    for (int i = 0; i < n; ++i) {
      const int s = cfg.symbol_index(word[static_cast<std::size_t>(i)]);
      for (int r = 0; r < level; ++r) {
        if (span_occupies_region(i, 1, n, r, level))
          emb.bits[static_cast<std::size_t>(offset + r * num_symbols + s)] = 1;
      }
    }
    offset += level * num_symbols;
  }

  const int num_bigrams = static_cast<int>(cfg.word_bigrams.size());
  for (int i = 0; i + 1 < n; ++i) {
    const int b = cfg.word_bigram_index(word.substr(static_cast<std::size_t>(i), 2));
    if (b < 0) continue;
    for (int r = 0; r < 2; ++r) {
      if (span_occupies_region(i, 2, n, r, 2))
        emb.bits[static_cast<std::size_t>(offset + r * num_bigrams + b)] = 1;
    }
  }
  return emb;
}

PyramidalTextEmbedding phob_encode(std::string_view text,
                                   const EmbeddingConfig& cfg) {
  const std::string word = normalize_text(text, cfg);
  const int n = static_cast<int>(word.size());

  PyramidalTextEmbedding emb;
  emb.kind = EmbeddingKind::phob;
  emb.bits.assign(static_cast<std::size_t>(cfg.phob_dim()), 0);

  const int num_bigrams = static_cast<int>(cfg.index_bigrams.size());
  for (int i = 0; i + 1 < n; ++i) {
    const int b = cfg.index_bigram_index(word.substr(static_cast<std::size_t>(i), 2));
    if (b < 0) continue;
    for (int r = 0; r < 2; ++r) {
      if (span_occupies_region(i, 2, n, r, 2))
        emb.bits[static_cast<std::size_t>(r * num_bigrams + b)] = 1;
    }
  }

  int offset = num_bigrams * 2;
  for (int level : cfg.digit_levels_phob) {
    for (int i = 0; i < n; ++i) {
      const char c = word[static_cast<std::size_t>(i)];
      if (c < '0' || c > '9') continue;
      const int digit = c - '0';
      for (int r = 0; r < level; ++r) {
        if (span_occupies_region(i, 1, n, r, level))
          emb.bits[static_cast<std::size_t>(offset + r * 10 + digit)] = 1;
      }
    }
    offset += level * 10;
  }
  return emb;
}

PyramidalTextEmbedding bigram_embedding(std::string_view bigram,
                                        const EmbeddingConfig& cfg) {
  if (bigram.size() != 2)
    fail(Err::WrongLength, "bigram must have exactly 2 characters, got \"" +
                               std::string(bigram) + "\"");
  return phob_encode(bigram, cfg);
}

BigramSelection select_index_bigrams(const std::vector<std::string>& corpus,
                                     int k, const EmbeddingConfig& cfg) {
  if (corpus.empty()) fail(Err::EmptyCorpus, "empty corpus");
  if (k < 1) fail(Err::Usage, "k must be >= 1");

  std::map<std::string, long long> counts;
  long long total = 0;
  for (const auto& raw : corpus) {
    const std::string word = normalize_text(raw, cfg);
    for (std::size_t i = 0; i + 1 < word.size(); ++i) {
      ++counts[word.substr(i, 2)];
      ++total;
    }
  }

  std::vector<std::pair<std::string, long long>> ranked(counts.begin(),
                                                        counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  BigramSelection sel;
  long long covered = 0;
  for (std::size_t i = 0; i < ranked.size() && static_cast<int>(i) < k; ++i) {
    sel.bigrams.push_back(ranked[i].first);
    covered += ranked[i].second;
  }
  sel.coverage = total > 0 ? static_cast<double>(covered) /
                                 static_cast<double>(total)
                           : 1.0;
  return sel;
}

void write_bigram_list(const std::string& path,
                       const std::vector<std::string>& bigrams) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) fail(Err::Io, "cannot open for writing: " + path);
  for (const auto& b : bigrams) f << b << "\n";
  if (!f) fail(Err::Io, "write failed: " + path);
}

std::vector<std::string> read_bigram_list(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(Err::Io, "cannot open: " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

}  // namespace spot
