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
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "spot/attribute_space.hpp"
#include "spot/exec.hpp"
#include "spot/image.hpp"
#include "spot/text_embedding.hpp"
#include "spot/visual_features.hpp"

namespace spot {

/// Foreground iff intensity < 0.75 * mean intensity.
BinaryImage binarize(const GrayImage& page);

/// Candidate region from the connected-component merge. The minimal box is
/// the greedy box keeping at least 90% of the component ink; it drives the
/// overlap and closeness tests so descenders do not chain lines together.
struct Region {
  std::uint32_t id = 0;
  std::string page_id;
  PixelBox bbox;
  PixelBox minimal_box;
  int threshold_tag = 0;  // gap threshold (px) that produced the region
};

/// Connected components (8-connected), minimal 90%-density boxes, merge of
/// overlapping minimal boxes, then one merge pass per gap threshold; the
/// union of all per-threshold region sets is returned with duplicate boxes
/// removed. Region ids are densely assigned in output order.
std::vector<Region> propose_regions(const BinaryImage& binary,
                                    const std::vector<int>& gap_thresholds_px);

/// {0.5, 1.0, 1.5} x median component height, deduplicated, min 1 px.
std::vector<int> default_gap_thresholds(const BinaryImage& binary);

struct Posting {
  std::uint32_t region_id = 0;
  float score = 0;
};

struct IndexPage {
  std::string page_id;
  int width = 0, height = 0;
};

struct BigramInvertedIndex {
  std::vector<std::string> bigrams;            // index vocabulary
  std::vector<std::vector<Posting>> postings;  // per bigram, score-descending
  std::vector<Region> regions;                 // region table, id == position
  std::vector<IndexPage> pages;
  std::uint64_t bundle_hash = 0;

  int page_index(const std::string& page_id) const;
};

/// Embeds each region crop with the PHOB model and scores it against every
/// index bigram (cosine in the common subspace). Regions whose crops cannot
/// be described (too small) are dropped with a warning.
struct IndexBuildInput {
  const std::vector<Region>* regions = nullptr;
  // page_id -> raster; pages must cover every region
  std::function<const GrayImage&(const std::string&)> page_raster;
  std::vector<IndexPage> pages;
};

BigramInvertedIndex build_index(const IndexBuildInput& input,
                                const VisualVocabulary& vocab,
                                const AttributeModel& phob_model,
                                const EmbeddingConfig& cfg,
                                const DescriptorParams& dp = {},
                                std::uint64_t bundle_hash = 0,
                                Exec exec = Exec::parallel,
                                std::vector<std::uint32_t>* skipped = nullptr);

/// First n postings of the bigram's list (all if fewer). UnknownBigram if
/// the bigram is not part of the index vocabulary.
std::vector<Posting> lookup(const BigramInvertedIndex& index,
                            std::string_view bigram, int n);

// "SPIX1" container: page table, fixed-width region records, delta-encoded
// postings.
void write_index(const std::filesystem::path& path,
                 const BigramInvertedIndex& index);
BigramInvertedIndex read_index(const std::filesystem::path& path);

}  // namespace spot
