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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spot/attribute_space.hpp"
#include "spot/exec.hpp"
#include "spot/image.hpp"
#include "spot/layout_index.hpp"
#include "spot/page_attributes.hpp"

namespace spot {

/// Mean training word widths used to size search windows.
struct TrainStats {
  std::vector<std::pair<std::string, float>> word_widths;  // sorted by word
  float mean_char_width = 12.f;

  /// Mean width of training instances of this transcription when known,
  /// otherwise length * mean character width.
  float expected_width(std::string_view query) const;
};

struct QueryPlan {
  std::string query;
  std::vector<std::string> bigrams;          // distinct, found in the index
  std::vector<std::string> skipped_bigrams;  // distinct, not in the index
  float expected_width = 0;                  // px

  struct Candidate {
    std::uint32_t region_id = 0;
    std::string page_id;
    PixelBox region_box;
    PixelBox search_box;  // widened, clipped to the page
  };
  std::vector<Candidate> candidates;  // deduplicated union of top-n lists

  int distinct_bigram_count() const { return static_cast<int>(bigrams.size()); }
};

/// Looks up the top n regions of each distinct query bigram, deduplicates
/// them and widens boxes narrower than the expected word width to at least
/// 1.2x of it (symmetrically, clipped at the page edges).
QueryPlan plan_query(std::string_view query, const BigramInvertedIndex& index,
                     const TrainStats& stats, int top_n,
                     const EmbeddingConfig& cfg);

struct ResultEntry {
  std::string page_id;
  PixelBox box;
  float score = 0;
  bool rescore_failed = false;
};

enum class ResultStage { initial, reranked };

struct RankedResult {
  std::vector<ResultEntry> entries;  // scores non-increasing
  ResultStage stage = ResultStage::initial;
};

struct ScanParams {
  std::vector<float> width_factors = {0.8f, 1.0f, 1.2f};
  float nms_iou = 0.5f;
};

/// Greedy non-maximum suppression per page: keep higher scores, drop entries
/// overlapping a kept one with IoU > threshold. Input must be sorted by
/// descending score. Idempotent.
std::vector<ResultEntry> non_maximum_suppression(std::vector<ResultEntry> sorted,
                                                 float iou_threshold);

/// Slides block-snapped windows of widths {0.8, 1.0, 1.2} x expected width
/// across each widened candidate box (full box height, one block stride) and
/// scores them by cosine against the query embedding; pooled results are
/// sorted and suppressed.
///
/// integral_for_page must be safe for concurrent calls; it should throw
/// MissingPageMap for unknown pages.
RankedResult sliding_window_scan(
    const QueryPlan& plan,
    const std::function<const IntegralAttributeImage&(const std::string&)>&
        integral_for_page,
    const AttributeModel& phoc_window_model, const EmbeddingConfig& cfg,
    const ScanParams& params = {}, Exec exec = Exec::parallel);

/// Re-scores the top percent of the list with the enriched Fisher vector of
/// each window crop through the full PHOC model; the head is re-sorted above
/// the unchanged tail. Extraction failures keep their initial score, flagged.
RankedResult rerank(
    const RankedResult& initial, std::string_view query,
    const std::function<const GrayImage&(const std::string&)>& page_raster,
    const VisualVocabulary& vocab_enriched, const AttributeModel& phoc_full_model,
    const EmbeddingConfig& cfg, double top_percent,
    const DescriptorParams& dp = {.step = 2}, Exec exec = Exec::parallel);

}  // namespace spot
