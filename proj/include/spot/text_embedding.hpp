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

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace spot {

enum class EmbeddingKind : std::uint8_t { phoc = 0, phob = 1 };

/// Configuration for the pyramidal binary text embeddings.
///
/// PHOC: one histogram of alphabet characters per region at each level in
/// char_levels, plus a 2-region histogram over word_bigrams.
/// PHOB: a 2-region histogram over index_bigrams, plus digit histograms at
/// the levels in digit_levels_phob.
///
/// Bit layout, fixed and relied on by the serialized model bundle:
///   PHOC: [level][region][alphabet symbol] then [region][word bigram]
///   PHOB: [region][index bigram] then [level][region][digit]
struct EmbeddingConfig {
  std::string alphabet = "abcdefghijklmnopqrstuvwxyz0123456789";
  std::vector<int> char_levels = {2, 3, 4, 5};
  std::vector<std::string> word_bigrams;   // PHOC tail, at level 2
  std::vector<std::string> index_bigrams;  // PHOB body, at level 2
  std::vector<int> digit_levels_phob = {2, 3};

  /// 36-symbol alphabet, levels {2..5}, 50 word bigrams and 150 index
  /// bigrams from a built-in English frequency table. PHOC dim 604,
  /// PHOB dim 350. The bigram lists are normally replaced at training time
  /// by select_index_bigrams over the training transcriptions.
  static EmbeddingConfig defaults();

  int phoc_dim() const;
  int phob_dim() const;
  int dim(EmbeddingKind kind) const;

  /// Throws on duplicate alphabet symbols or duplicate bigrams.
  void validate() const;

  /// Index of c in the alphabet, -1 if absent.
  int symbol_index(char c) const;
  int word_bigram_index(std::string_view b) const;
  int index_bigram_index(std::string_view b) const;
};

struct PyramidalTextEmbedding {
  std::vector<std::uint8_t> bits;  // each 0 or 1
  EmbeddingKind kind = EmbeddingKind::phoc;

  int dim() const { return static_cast<int>(bits.size()); }
};

/// Occupancy rule shared by characters, digits and bigrams. A symbol
/// starting at character position pos and spanning span_chars characters of
/// an n-character word covers [pos/n, (pos+span_chars)/n]; region r of level
/// L covers [r/L, (r+1)/L]. The symbol occupies the region iff the overlap
/// is at least half the symbol span. Evaluated in exact integer arithmetic.
bool span_occupies_region(int pos, int span_chars, int word_len, int region,
                          int level);

/// Lowercases ASCII letters and rejects anything outside cfg.alphabet
/// (UnsupportedCharacter with the offending position). Empty -> EmptyString.
std::string normalize_text(std::string_view text, const EmbeddingConfig& cfg);

PyramidalTextEmbedding phoc_encode(std::string_view text,
                                   const EmbeddingConfig& cfg);
PyramidalTextEmbedding phob_encode(std::string_view text,
                                   const EmbeddingConfig& cfg);

/// PHOB encoding of a 2-character string; rejects other lengths.
PyramidalTextEmbedding bigram_embedding(std::string_view bigram,
                                        const EmbeddingConfig& cfg);

struct BigramSelection {
  std::vector<std::string> bigrams;  // top-k by count, ties lexicographic
  double coverage = 0.0;             // fraction of corpus occurrences covered
};

/// Ranks bigrams of the (normalized) corpus by occurrence count and keeps
/// the top k. Substitute for a fixed published frequency list.
BigramSelection select_index_bigrams(const std::vector<std::string>& corpus,
                                     int k, const EmbeddingConfig& cfg);

void write_bigram_list(const std::string& path,
                       const std::vector<std::string>& bigrams);
std::vector<std::string> read_bigram_list(const std::string& path);

}  // namespace spot
