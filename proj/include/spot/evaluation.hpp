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

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "spot/image.hpp"

namespace spot {

struct ResultEntry;
struct RankedResult;

double iou(const PixelBox& a, const PixelBox& b);

struct GtWord {
  PixelBox box;
  std::string text;
};

struct GtLine {
  int line_id = 0;
  PixelBox box;
};

struct PageGroundTruth {
  std::vector<GtWord> words;
  std::vector<GtLine> lines;
};

/// page id -> annotations. File format, one file per page:
///   x y w h transcription
///   LINE line_id x y w h
using GroundTruth = std::map<std::string, PageGroundTruth>;

GroundTruth read_ground_truth_dir(const std::filesystem::path& dir);
PageGroundTruth read_ground_truth_file(const std::filesystem::path& file);
void write_ground_truth_file(const std::filesystem::path& file,
                             const PageGroundTruth& gt);

/// AP from an already-matched ranked list: mean over the relevant instances
/// of the precision at each true-positive rank; unretrieved relevant
/// instances contribute zero.
double average_precision(const std::vector<bool>& tp_flags, int relevant_count);

/// Greedy one-to-one matching by rank: a result is a true positive iff it
/// overlaps an unclaimed relevant box on its page with IoU > threshold
/// (the best-overlapping unclaimed one is claimed).
struct MatchedRanking {
  std::vector<bool> tp_flags;
  int relevant_count = 0;
};
MatchedRanking match_results(
    const std::vector<ResultEntry>& ranked,
    const std::vector<std::pair<std::string, PixelBox>>& relevant,
    double iou_threshold);

struct QueryEval {
  std::string query;
  double ap = 0;
  int relevant = 0;
  int true_positives = 0;
};

struct EvalReport {
  double mean_ap = 0;
  std::vector<QueryEval> per_query;   // queries with at least one relevant box
  std::vector<std::string> excluded;  // queries with no relevant instances
};

/// Word spotting protocol: for each query, relevant = every ground-truth box
/// with the same transcription; TP iff IoU > threshold with an unclaimed one.
EvalReport evaluate_word_spotting(
    const std::vector<std::pair<std::string, RankedResult>>& results_per_query,
    const GroundTruth& gt, double iou_threshold = 0.5);

/// Line spotting protocol: each line is scored by the maximum score of the
/// result windows intersecting it; a line is relevant iff it contains a word
/// with the query transcription (word center inside the line box).
EvalReport evaluate_line_spotting(
    const std::vector<std::pair<std::string, RankedResult>>& results_per_query,
    const GroundTruth& gt);

}  // namespace spot
