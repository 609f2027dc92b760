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

#include "spot/evaluation.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "spot/error.hpp"
#include "spot/retrieval.hpp"

namespace spot {

double iou(const PixelBox& a, const PixelBox& b) {
  const long long inter = box_intersection(a, b).area();
  const long long uni = a.area() + b.area() - inter;
  if (uni <= 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

GroundTruth read_ground_truth_dir(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir))
    fail(Err::MissingData, "ground truth directory not found: " + dir.string());
  GroundTruth gt;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".gt")
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) gt[f.stem().string()] = read_ground_truth_file(f);
  return gt;
}

PageGroundTruth read_ground_truth_file(const std::filesystem::path& file) {
  std::ifstream f(file);
  if (!f) fail(Err::Io, "cannot open: " + file.string());
  PageGroundTruth gt;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string first;
    ss >> first;
    if (first == "LINE") {
      GtLine l;
      ss >> l.line_id >> l.box.x >> l.box.y >> l.box.w >> l.box.h;
      if (!ss) fail(Err::Io, "bad LINE record in " + file.string());
      gt.lines.push_back(l);
    } else {
      GtWord w;
      w.box.x = std::stoi(first);
      ss >> w.box.y >> w.box.w >> w.box.h >> w.text;
      if (!ss) fail(Err::Io, "bad word record in " + file.string());
      gt.words.push_back(w);
    }
  }
  return gt;
}

void write_ground_truth_file(const std::filesystem::path& file,
                             const PageGroundTruth& gt) {
  std::ofstream f(file, std::ios::trunc);
  if (!f) fail(Err::Io, "cannot open for writing: " + file.string());
  for (const auto& w : gt.words)
    f << w.box.x << " " << w.box.y << " " << w.box.w << " " << w.box.h << " "
      << w.text << "\n";
  for (const auto& l : gt.lines)
    f << "LINE " << l.line_id << " " << l.box.x << " " << l.box.y << " "
      << l.box.w << " " << l.box.h << "\n";
  if (!f) fail(Err::Io, "write failed: " + file.string());
}

double average_precision(const std::vector<bool>& tp_flags,
                         int relevant_count) {
  if (relevant_count <= 0) fail(Err::Usage, "relevant set is empty");
  double sum = 0;
  int tp = 0;
  for (std::size_t k = 0; k < tp_flags.size(); ++k) {
    if (!tp_flags[k]) continue;
    ++tp;
    sum += static_cast<double>(tp) / static_cast<double>(k + 1);
  }
  return sum / static_cast<double>(relevant_count);
}

MatchedRanking match_results(
    const std::vector<ResultEntry>& ranked,
    const std::vector<std::pair<std::string, PixelBox>>& relevant,
    double iou_threshold) {
  MatchedRanking out;
  out.relevant_count = static_cast<int>(relevant.size());
  out.tp_flags.assign(ranked.size(), false);
  std::vector<bool> claimed(relevant.size(), false);
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    int best = -1;
    double best_iou = iou_threshold;
    for (std::size_t r = 0; r < relevant.size(); ++r) {
      if (claimed[r] || relevant[r].first != ranked[k].page_id) continue;
      const double v = iou(ranked[k].box, relevant[r].second);
      if (v > best_iou) {
        best_iou = v;
        best = static_cast<int>(r);
      }
    }
    if (best >= 0) {
      claimed[static_cast<std::size_t>(best)] = true;
      out.tp_flags[k] = true;
    }
  }
  return out;
}

EvalReport evaluate_word_spotting(
    const std::vector<std::pair<std::string, RankedResult>>& results_per_query,
    const GroundTruth& gt, double iou_threshold) {
  EvalReport report;
  double sum = 0;
  for (const auto& [query, result] : results_per_query) {
    std::vector<std::pair<std::string, PixelBox>> relevant;
    for (const auto& [page_id, page_gt] : gt)
      for (const auto& w : page_gt.words)
        if (w.text == query) relevant.push_back({page_id, w.box});
    if (relevant.empty()) {
      report.excluded.push_back(query);
      continue;
    }
    const MatchedRanking matched =
        match_results(result.entries, relevant, iou_threshold);
    QueryEval qe;
    qe.query = query;
    qe.relevant = matched.relevant_count;
    qe.true_positives = static_cast<int>(
        std::count(matched.tp_flags.begin(), matched.tp_flags.end(), true));
    qe.ap = average_precision(matched.tp_flags, matched.relevant_count);
    sum += qe.ap;
    report.per_query.push_back(std::move(qe));
  }
  report.mean_ap =
      report.per_query.empty() ? 0.0 : sum / static_cast<double>(report.per_query.size());
  return report;
}

EvalReport evaluate_line_spotting(
    const std::vector<std::pair<std::string, RankedResult>>& results_per_query,
    const GroundTruth& gt) {
  bool any_lines = false;
  for (const auto& [page_id, page_gt] : gt)
    if (!page_gt.lines.empty()) any_lines = true;
  if (!any_lines)
    fail(Err::MissingData, "no line annotations in the ground truth");

  EvalReport report;
  double sum = 0;
  for (const auto& [query, result] : results_per_query) {
    // a line is relevant iff it contains a word with the query transcription
    // (word box center inside the line box)
    std::map<std::pair<std::string, int>, bool> relevant;
    int relevant_count = 0;
    for (const auto& [page_id, page_gt] : gt) {
      for (const auto& l : page_gt.lines) {
        bool rel = false;
        for (const auto& w : page_gt.words) {
          if (w.text != query) continue;
          const int cx = w.box.x + w.box.w / 2;
          const int cy = w.box.y + w.box.h / 2;
          if (cx >= l.box.x && cx < l.box.x2() && cy >= l.box.y &&
              cy < l.box.y2()) {
            rel = true;
            break;
          }
        }
        relevant[{page_id, l.line_id}] = rel;
        relevant_count += rel ? 1 : 0;
      }
    }
    if (relevant_count == 0) {
      report.excluded.push_back(query);
      continue;
    }

    // line score = max over result windows intersecting the line
    std::map<std::pair<std::string, int>, float> line_score;
    for (const auto& e : result.entries) {
      const auto page_it = gt.find(e.page_id);
      if (page_it == gt.end()) continue;
      for (const auto& l : page_it->second.lines) {
        if (box_intersection(e.box, l.box).area() <= 0) continue;
        const auto key = std::make_pair(e.page_id, l.line_id);
        const auto it = line_score.find(key);
        if (it == line_score.end() || e.score > it->second)
          line_score[key] = e.score;
      }
    }

    std::vector<std::pair<float, std::pair<std::string, int>>> ranked;
    ranked.reserve(line_score.size());
    for (const auto& [key, score] : line_score) ranked.push_back({score, key});
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });

    std::vector<bool> tp_flags;
    tp_flags.reserve(ranked.size());
    for (const auto& [score, key] : ranked)
      tp_flags.push_back(relevant.at(key));

    QueryEval qe;
    qe.query = query;
    qe.relevant = relevant_count;
    qe.true_positives =
        static_cast<int>(std::count(tp_flags.begin(), tp_flags.end(), true));
    qe.ap = average_precision(tp_flags, relevant_count);
    sum += qe.ap;
    report.per_query.push_back(std::move(qe));
  }
  report.mean_ap =
      report.per_query.empty() ? 0.0 : sum / static_cast<double>(report.per_query.size());
  return report;
}

}  // namespace spot
