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

#include "spot/synth_corpus.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "spot/error.hpp"
#include "spot/rng.hpp"

namespace spot {

namespace {

// 5x7 glyphs for a-z (block shapes) and 0-9; '#' marks ink.
struct Glyph {
  const char* rows[7];
};

const std::map<char, Glyph>& glyph_table() {
  static const std::map<char, Glyph> table = {
      {'a', {{".###.", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"}}},
      {'b', {{"####.", "#...#", "#...#", "####.", "#...#", "#...#", "####."}}},
      {'c', {{".####", "#....", "#....", "#....", "#....", "#....", ".####"}}},
      {'d', {{"####.", "#...#", "#...#", "#...#", "#...#", "#...#", "####."}}},
      {'e', {{"#####", "#....", "#....", "####.", "#....", "#....", "#####"}}},
      {'f', {{"#####", "#....", "#....", "####.", "#....", "#....", "#...."}}},
      {'g', {{".####", "#....", "#....", "#.###", "#...#", "#...#", ".###."}}},
      {'h', {{"#...#", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"}}},
      {'i', {{".###.", "..#..", "..#..", "..#..", "..#..", "..#..", ".###."}}},
      {'j', {{"..###", "...#.", "...#.", "...#.", "...#.", "#..#.", ".##.."}}},
      {'k', {{"#...#", "#..#.", "#.#..", "##...", "#.#..", "#..#.", "#...#"}}},
      {'l', {{"#....", "#....", "#....", "#....", "#....", "#....", "#####"}}},
      {'m', {{"#...#", "##.##", "#.#.#", "#.#.#", "#...#", "#...#", "#...#"}}},
      {'n', {{"#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#", "#...#"}}},
      {'o', {{".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."}}},
      {'p', {{"####.", "#...#", "#...#", "####.", "#....", "#....", "#...."}}},
      {'q', {{".###.", "#...#", "#...#", "#...#", "#.#.#", "#..#.", ".##.#"}}},
      {'r', {{"####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#"}}},
      {'s', {{".####", "#....", "#....", ".###.", "....#", "....#", "####."}}},
      {'t', {{"#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."}}},
      {'u', {{"#...#", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."}}},
      {'v', {{"#...#", "#...#", "#...#", "#...#", "#...#", ".#.#.", "..#.."}}},
      {'w', {{"#...#", "#...#", "#...#", "#.#.#", "#.#.#", "##.##", "#...#"}}},
      {'x', {{"#...#", "#...#", ".#.#.", "..#..", ".#.#.", "#...#", "#...#"}}},
      {'y', {{"#...#", "#...#", ".#.#.", "..#..", "..#..", "..#..", "..#.."}}},
      {'z', {{"#####", "....#", "...#.", "..#..", ".#...", "#....", "#####"}}},
      {'0', {{".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###."}}},
      {'1', {{"..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###."}}},
      {'2', {{".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####"}}},
      {'3', {{"#####", "...#.", "..#..", "...#.", "....#", "#...#", ".###."}}},
      {'4', {{"...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."}}},
      {'5', {{"#####", "#....", "####.", "....#", "....#", "#...#", ".###."}}},
      {'6', {{"..##.", ".#...", "#....", "####.", "#...#", "#...#", ".###."}}},
      {'7', {{"#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#..."}}},
      {'8', {{".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."}}},
      {'9', {{".###.", "#...#", "#...#", ".####", "....#", "...#.", ".##.."}}},
  };
  return table;
}

struct InkBounds {
  int min_x = 1 << 30, min_y = 1 << 30, max_x = -1, max_y = -1;
  void grow(int x, int y) {
    min_x = std::min(min_x, x);
    min_y = std::min(min_y, y);
    max_x = std::max(max_x, x);
    max_y = std::max(max_y, y);
  }
  bool valid() const { return max_x >= 0; }
  PixelBox box() const {
    return {min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
  }
};

void fill_square(GrayImage& page, float cx, float cy, float r, float intensity,
                 InkBounds& bounds) {
  const int x0 = std::max(0, static_cast<int>(std::floor(cx - r)));
  const int x1 = std::min(page.width - 1, static_cast<int>(std::ceil(cx + r)));
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - r)));
  const int y1 = std::min(page.height - 1, static_cast<int>(std::ceil(cy + r)));
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) {
      page.at(x, y) = intensity;
      bounds.grow(x, y);
    }
}

// Draws one word; returns the tight ink bounding box.
PixelBox render_word(GrayImage& page, const std::string& word, int x0, int y0,
                     const GlyphStyle& style, Rng& rng) {
  const double scale =
      style.scale * (1.0 + rng.uniform(-style.scale_jitter, style.scale_jitter));
  const double slant = rng.uniform(-style.slant_jitter, style.slant_jitter);
  const double char_height = 7.0 * scale;
  const float r = static_cast<float>(scale * style.stroke * 0.5);

  InkBounds bounds;
  double pen_x = x0;
  for (char c : word) {
    const int dy = static_cast<int>(rng.below(3)) - 1;  // baseline jitter
    const auto it = glyph_table().find(c);
    if (it == glyph_table().end())
      fail(Err::UnsupportedCharacter,
           "no glyph for character '" + std::string(1, c) + "'");
    for (int fy = 0; fy < 7; ++fy) {
      for (int fx = 0; fx < 5; ++fx) {
        if (it->second.rows[fy][fx] != '#') continue;
        const double gy = (fy + 0.5) * scale;
        const double gx = (fx + 0.5) * scale + slant * (char_height - gy);
        const float ink =
            static_cast<float>(0.08 + 0.05 * rng.uniform());
        fill_square(page, static_cast<float>(pen_x + gx),
                    static_cast<float>(y0 + dy + gy), r, ink, bounds);
      }
    }
    pen_x += 6.0 * scale;
  }
  if (!bounds.valid()) fail(Err::Internal, "word rendered no ink: " + word);
  return bounds.box();
}

}  // namespace

std::vector<std::string> default_vocabulary(int count) {
  static const char* const words[] = {
      "the",      "company",  "letter",   "orders",   "received", "general",
      "instant",  "honour",   "regiment", "service",  "present",  "account",
      "officers", "command",  "obedient", "favour",   "sergeant", "captain",
      "provisions", "necessary", "morning", "evening", "winchester", "return",
      "express",  "fort",     "duty",     "men",      "guard",    "stores",
      "arrived",  "ordered",  "march",    "proper",   "things",   "together",
      "cumberland", "immediately", "yesterday", "tomorrow", "quarter",
      "deliver",  "country",  "director", "number",   "between",  "another",
      "without",  "himself",  "nothing",  "virginia", "colonel",  "majesty",
      "assembly", "governor", "soldiers", "regard",   "answer",   "before",
      "follow",   "written",  "second",   "third",    "places",   "spring",
  };
  std::vector<std::string> out;
  const int available = static_cast<int>(sizeof(words) / sizeof(words[0]));
  for (int i = 0; i < count && i < available; ++i) out.push_back(words[i]);
  return out;
}

SynthCorpus generate(const CorpusSpec& spec) {
  if (spec.vocabulary.empty()) fail(Err::EmptyCorpus, "empty vocabulary");
  if (spec.instances_per_word < 1 || spec.words_per_page < 1)
    fail(Err::Usage, "instances_per_word and words_per_page must be >= 1");
  for (const auto& w : spec.vocabulary) {
    if (w.empty()) fail(Err::EmptyString, "empty vocabulary word");
    for (char c : w)
      if (glyph_table().find(c) == glyph_table().end())
        fail(Err::UnsupportedCharacter,
             "vocabulary word \"" + w + "\" has no glyph for '" +
                 std::string(1, c) + "'");
  }

  // global placement order, one deterministic shuffle
  std::vector<int> order;
  for (std::size_t v = 0; v < spec.vocabulary.size(); ++v)
    for (int i = 0; i < spec.instances_per_word; ++i)
      order.push_back(static_cast<int>(v));
  Rng master(derive_seed(spec.seed, 0x5eedull));
  master.shuffle(order);

  const int margin = 32;
  const double max_scale = spec.style.scale * (1.0 + spec.style.scale_jitter);
  const int line_height = static_cast<int>(std::ceil(7.0 * max_scale)) + 16;
  const int usable_width = spec.page_width - 2 * margin;

  SynthCorpus corpus;
  int placed = 0;
  for (int page_index = 0; page_index < spec.page_count(); ++page_index) {
    char id_buf[32];
    std::snprintf(id_buf, sizeof(id_buf), "page_%04d", page_index);
    const std::string page_id = id_buf;
    Rng rng(derive_seed(spec.seed, 0x1000ull + static_cast<std::uint64_t>(page_index)));

    // lay out this page's words first to learn the page height
    struct Placement {
      int word = 0;
      int x = 0, y = 0;
      int line = 0;
    };
    std::vector<Placement> placements;
    int x = margin, line = 0;
    const int todo = std::min(spec.words_per_page,
                              static_cast<int>(order.size()) - placed);
    for (int i = 0; i < todo; ++i) {
      const int w = order[static_cast<std::size_t>(placed + i)];
      const int est_width = static_cast<int>(
          std::ceil(6.0 * max_scale * static_cast<double>(
                        spec.vocabulary[static_cast<std::size_t>(w)].size())));
      if (est_width > usable_width)
        fail(Err::Usage, "word \"" + spec.vocabulary[static_cast<std::size_t>(w)] +
                             "\" too wide for the page (PageOverflow)");
      if (x + est_width > spec.page_width - margin) {
        x = margin;
        ++line;
      }
      placements.push_back({w, x, margin + line * line_height, line});
      x += est_width + 18 + static_cast<int>(rng.below(10));
    }

    const int page_height = margin * 2 + (line + 1) * line_height;
    GrayImage page(spec.page_width, page_height);
    for (auto& px : page.pixels) {
      const double v = 0.93 + spec.noise * rng.normal();
      px = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }

    PageGroundTruth page_gt;
    std::map<int, PixelBox> line_boxes;
    for (const auto& pl : placements) {
      const std::string& word =
          spec.vocabulary[static_cast<std::size_t>(pl.word)];
      const PixelBox ink = render_word(page, word, pl.x, pl.y, spec.style, rng);
      page_gt.words.push_back({ink, word});
      corpus.instances.push_back({page_id, ink, word, false});
      const auto it = line_boxes.find(pl.line);
      line_boxes[pl.line] =
          it == line_boxes.end() ? ink : box_union(it->second, ink);
    }
    for (const auto& [line_id, box] : line_boxes) {
      const PixelBox padded = clip_box({box.x - 4, box.y - 4, box.w + 8, box.h + 8},
                                       page.width, page.height);
      page_gt.lines.push_back({line_id, padded});
    }

    // quantize to the 8-bit PGM grid so in-memory and on-disk pages agree
    for (auto& px : page.pixels)
      px = static_cast<float>(std::lround(std::clamp(px, 0.f, 1.f) * 255.f)) /
           255.f;

    corpus.gt[page_id] = std::move(page_gt);
    corpus.pages.push_back({page_id, std::move(page)});
    placed += todo;
  }

  // first ceil(m/2) placements of each word go to train
  std::map<std::string, int> seen, total;
  for (const auto& inst : corpus.instances) ++total[inst.text];
  for (auto& inst : corpus.instances) {
    const int m = total[inst.text];
    inst.train = seen[inst.text] < (m + 1) / 2;
    ++seen[inst.text];
  }
  return corpus;
}

}  // namespace spot
