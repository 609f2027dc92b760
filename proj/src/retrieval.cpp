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

#include "spot/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "spot/error.hpp"
#include "spot/evaluation.hpp"

namespace spot {

namespace {

bool entry_order(const ResultEntry& a, const ResultEntry& b) {
  if (a.score != b.score) return a.score > b.score;
  return std::tie(a.page_id, a.box.x, a.box.y, a.box.w, a.box.h) <
         std::tie(b.page_id, b.box.x, b.box.y, b.box.w, b.box.h);
}

}  // namespace

float TrainStats::expected_width(std::string_view query) const {
  const auto it = std::lower_bound(
      word_widths.begin(), word_widths.end(), query,
      [](const auto& entry, std::string_view q) { return entry.first < q; });
  if (it != word_widths.end() && it->first == query) return it->second;
  return static_cast<float>(query.size()) * mean_char_width;
}

QueryPlan plan_query(std::string_view query, const BigramInvertedIndex& index,
                     const TrainStats& stats, int top_n,
                     const EmbeddingConfig& cfg) {
  const std::string normalized = normalize_text(query, cfg);
  if (normalized.size() < 2)
    fail(Err::QueryTooShort, "query must have at least 2 characters");

  QueryPlan plan;
  plan.query = normalized;
  plan.expected_width = stats.expected_width(normalized);

  std::set<std::string> distinct;
  for (std::size_t i = 0; i + 1 < normalized.size(); ++i)
    distinct.insert(normalized.substr(i, 2));

  std::set<std::uint32_t> seen_regions;
  for (const auto& bigram : distinct) {
    std::vector<Posting> postings;
    try {
      postings = lookup(index, bigram, top_n);
    } catch (const SpotError& e) {
      if (e.code() != Err::UnknownBigram) throw;
      plan.skipped_bigrams.push_back(bigram);
      std::fprintf(stderr, "[spot] warning: query bigram \"%s\" not indexed\n",
                   bigram.c_str());
      continue;
    }
    plan.bigrams.push_back(bigram);
    for (const auto& p : postings) seen_regions.insert(p.region_id);
  }
  if (plan.bigrams.empty())
    fail(Err::NoKnownBigrams, "no query bigram is present in the index");

  for (std::uint32_t rid : seen_regions) {
    const Region& r = index.regions[rid];
    const int page = index.page_index(r.page_id);
    const int page_w = index.pages[static_cast<std::size_t>(page)].width;
    const int page_h = index.pages[static_cast<std::size_t>(page)].height;

    QueryPlan::Candidate c;
    c.region_id = rid;
    c.page_id = r.page_id;
    c.region_box = r.bbox;
    PixelBox box = r.bbox;
    if (static_cast<float>(box.w) < plan.expected_width) {
      const int target =
          static_cast<int>(std::ceil(1.2f * plan.expected_width));
      const int grow = target - box.w;
      box.x -= (grow + 1) / 2;
      box.w = target;
    }
    c.search_box = clip_box(box, page_w, page_h);
    plan.candidates.push_back(std::move(c));
  }
  return plan;
}

std::vector<ResultEntry> non_maximum_suppression(std::vector<ResultEntry> sorted,
                                                 float iou_threshold) {
  std::vector<ResultEntry> kept;
  for (const auto& e : sorted) {
    bool suppressed = false;
    for (const auto& k : kept) {
      if (k.page_id != e.page_id) continue;
      if (iou(k.box, e.box) > iou_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(e);
  }
  return kept;
}

RankedResult sliding_window_scan(
    const QueryPlan& plan,
    const std::function<const IntegralAttributeImage&(const std::string&)>&
        integral_for_page,
    const AttributeModel& phoc_window_model, const EmbeddingConfig& cfg,
    const ScanParams& params, Exec exec) {
  const Eigen::VectorXf query_vec =
      embed_text(phoc_encode(plan.query, cfg), phoc_window_model);

  std::vector<std::vector<ResultEntry>> per_candidate(plan.candidates.size());
  parallel_for(
      static_cast<std::int64_t>(plan.candidates.size()), exec,
      [&](std::int64_t ci) {
        const auto& cand = plan.candidates[static_cast<std::size_t>(ci)];
        const IntegralAttributeImage& integral =
            integral_for_page(cand.page_id);
        const int n = integral.block_size;

        // snap the widened search box outward to whole blocks
        const int bx0 = std::max(0, cand.search_box.x / n);
        const int by0 = std::max(0, cand.search_box.y / n);
        const int bx1 = std::min(integral.grid_w,
                                 (cand.search_box.x2() + n - 1) / n);
        const int by1 = std::min(integral.grid_h,
                                 (cand.search_box.y2() + n - 1) / n);
        if (bx1 <= bx0 || by1 <= by0) return;
        const int box_blocks_w = bx1 - bx0;
        const int box_blocks_h = by1 - by0;

        std::set<int> widths;  // distinct window widths in blocks
        for (float f : params.width_factors) {
          const int wb = std::max(
              1, static_cast<int>(std::lround(f * plan.expected_width / n)));
          widths.insert(std::min(wb, box_blocks_w));
        }

        auto& local = per_candidate[static_cast<std::size_t>(ci)];
        for (int wb : widths) {
          for (int bx = bx0; bx + wb <= bx1; ++bx) {
            const BlockBox window{bx, by0, wb, box_blocks_h};
            const Eigen::VectorXf v = window_embedding(integral, window);
            ResultEntry e;
            e.page_id = cand.page_id;
            e.box = clip_box(PixelBox{bx * n, by0 * n, wb * n, box_blocks_h * n},
                             integral.page_width, integral.page_height);
            e.score = v.dot(query_vec);
            local.push_back(std::move(e));
          }
        }
      });

  RankedResult result;
  result.stage = ResultStage::initial;
  for (const auto& local : per_candidate)
    result.entries.insert(result.entries.end(), local.begin(), local.end());
  std::sort(result.entries.begin(), result.entries.end(), entry_order);
  result.entries = non_maximum_suppression(std::move(result.entries),
                                           params.nms_iou);
  return result;
}

RankedResult rerank(
    const RankedResult& initial, std::string_view query,
    const std::function<const GrayImage&(const std::string&)>& page_raster,
    const VisualVocabulary& vocab_enriched, const AttributeModel& phoc_full_model,
    const EmbeddingConfig& cfg, double top_percent, const DescriptorParams& dp,
    Exec exec) {
  if (top_percent <= 0 || top_percent > 100)
    fail(Err::Usage, "rerank percent must be in (0, 100]");

  const std::size_t head = static_cast<std::size_t>(
      std::ceil(top_percent / 100.0 * static_cast<double>(initial.entries.size())));

  RankedResult out;
  out.stage = ResultStage::reranked;
  out.entries = initial.entries;
  if (head == 0) return out;

  const Eigen::VectorXf query_vec =
      embed_text(phoc_encode(query, cfg), phoc_full_model);

  parallel_for(static_cast<std::int64_t>(head), exec, [&](std::int64_t i) {
    ResultEntry& e = out.entries[static_cast<std::size_t>(i)];
    try {
      const GrayImage& page = page_raster(e.page_id);
      const GrayImage patch = crop(page, e.box);
      const DenseDescriptorSet desc =
          extract_dense_descriptors(patch, dp.step, dp.scales, Exec::serial);
      const FloatBox region{0.f, 0.f, static_cast<float>(patch.width),
                            static_cast<float>(patch.height)};
      const FisherVector fv =
          fisher_vector(desc, vocab_enriched, true, region, Exec::serial);
      e.score = embed_image(fv, phoc_full_model).dot(query_vec);
    } catch (const SpotError&) {
      e.rescore_failed = true;  // keeps the initial score
    }
  });

  std::sort(out.entries.begin(), out.entries.begin() + static_cast<std::ptrdiff_t>(head),
            entry_order);
  return out;
}

}  // namespace spot
