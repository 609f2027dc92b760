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
#include <vector>

#include "spot/evaluation.hpp"
#include "spot/image.hpp"

namespace spot {

struct GlyphStyle {
  float scale = 3.0f;         // px per font cell (glyphs are 5x7 cells)
  float stroke = 1.15f;       // ink square size relative to the cell
  float slant_jitter = 0.10f; // max shear per word
  float scale_jitter = 0.10f; // max relative scale change per word
};

struct CorpusSpec {
  std::vector<std::string> vocabulary;
  int instances_per_word = 8;
  int words_per_page = 40;
  int page_width = 960;
  GlyphStyle style;
  float noise = 0.03f;  // background noise stddev
  std::uint64_t seed = 7;

  int total_instances() const {
    return static_cast<int>(vocabulary.size()) * instances_per_word;
  }
  int page_count() const {
    return (total_instances() + words_per_page - 1) / words_per_page;
  }
};

struct SynthInstance {
  std::string page_id;
  PixelBox box;  // tight ink bounding box
  std::string text;
  bool train = false;
};

struct SynthCorpus {
  std::vector<std::pair<std::string, GrayImage>> pages;
  GroundTruth gt;  // word boxes plus LINE records
  std::vector<SynthInstance> instances;
};

/// Deterministic synthetic pages: stroke-rendered glyph words laid out in
/// lines with per-word scale/slant jitter and background noise. The split
/// assigns the first ceil(m/2) placements of each word to train.
SynthCorpus generate(const CorpusSpec& spec);

/// Built-in list of common lowercase words for quick corpora.
std::vector<std::string> default_vocabulary(int count);

}  // namespace spot
