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

#include "spot/layout_index.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

#include "spot/binio.hpp"
#include "spot/error.hpp"

namespace spot {

namespace {

constexpr char kIndexMagic[5] = {'S', 'P', 'I', 'X', '1'};

struct Component {
  std::vector<int> xs, ys;  // pixel coordinates
  PixelBox bbox;
  PixelBox minimal_box;
};

// Greedy 90%-density box: repeatedly drop the outermost row/column shedding
// the fewest foreground pixels until less than 90% remains, then undo the
// last step. Tie-break order: left, right, top, bottom.
PixelBox minimal_density_box(const Component& comp) {
  const PixelBox b = comp.bbox;
  std::vector<long long> col_counts(static_cast<std::size_t>(b.w), 0);
  std::vector<long long> row_counts(static_cast<std::size_t>(b.h), 0);
  for (std::size_t i = 0; i < comp.xs.size(); ++i) {
    ++col_counts[static_cast<std::size_t>(comp.xs[i] - b.x)];
    ++row_counts[static_cast<std::size_t>(comp.ys[i] - b.y)];
  }
  const long long total = static_cast<long long>(comp.xs.size());
  // ceil(0.9 * total): smallest kept count still >= 90% of the ink
  const long long keep_at_least = (9 * total + 9) / 10;

  int left = 0, right = b.w - 1, top = 0, bottom = b.h - 1;
  long long kept = total;
  while (left < right || top < bottom) {
    long long best = -1;
    int which = -1;  // 0 left, 1 right, 2 top, 3 bottom
    if (left < right) {
      if (best < 0 || col_counts[static_cast<std::size_t>(left)] < best) {
        best = col_counts[static_cast<std::size_t>(left)];
        which = 0;
      }
      if (col_counts[static_cast<std::size_t>(right)] < best) {
        best = col_counts[static_cast<std::size_t>(right)];
        which = 1;
      }
    }
    if (top < bottom) {
      if (best < 0 || row_counts[static_cast<std::size_t>(top)] < best) {
        best = row_counts[static_cast<std::size_t>(top)];
        which = 2;
      }
      if (row_counts[static_cast<std::size_t>(bottom)] < best) {
        best = row_counts[static_cast<std::size_t>(bottom)];
        which = 3;
      }
    }
    if (which < 0 || kept - best < keep_at_least) break;
    kept -= best;
    // dropping a row/column also removes those pixels from the other axis
    auto strip = [&](bool column, int line) {
      for (std::size_t i = 0; i < comp.xs.size(); ++i) {
        const int cx = comp.xs[i] - b.x;
        const int cy = comp.ys[i] - b.y;
        if (cx < left || cx > right || cy < top || cy > bottom) continue;
        if (column ? (cx == line) : (cy == line)) {
          --col_counts[static_cast<std::size_t>(cx)];
          --row_counts[static_cast<std::size_t>(cy)];
        }
      }
    };
    switch (which) {
      case 0: strip(true, left); ++left; break;
      case 1: strip(true, right); --right; break;
      case 2: strip(false, top); ++top; break;
      case 3: strip(false, bottom); --bottom; break;
    }
  }
  return {b.x + left, b.y + top, right - left + 1, bottom - top + 1};
}

std::vector<Component> connected_components(const BinaryImage& bin) {
  std::vector<Component> comps;
  std::vector<std::int32_t> label(
      static_cast<std::size_t>(bin.width) * bin.height, -1);
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < bin.height; ++y) {
    for (int x = 0; x < bin.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * bin.width + x;
      if (!bin.fg[i] || label[i] >= 0) continue;
      const std::int32_t id = static_cast<std::int32_t>(comps.size());
      comps.emplace_back();
      Component& c = comps.back();
      int min_x = x, max_x = x, min_y = y, max_y = y;
      label[i] = id;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        c.xs.push_back(cx);
        c.ys.push_back(cy);
        min_x = std::min(min_x, cx);
        max_x = std::max(max_x, cx);
        min_y = std::min(min_y, cy);
        max_y = std::max(max_y, cy);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= bin.width || ny >= bin.height)
              continue;
            const std::size_t ni =
                static_cast<std::size_t>(ny) * bin.width + nx;
            if (!bin.fg[ni] || label[ni] >= 0) continue;
            label[ni] = id;
            stack.push_back({nx, ny});
          }
        }
      }
      c.bbox = {min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
      c.minimal_box = minimal_density_box(c);
    }
  }
  return comps;
}

struct Group {
  PixelBox bbox;
  PixelBox minimal_box;
};

bool boxes_intersect(const PixelBox& a, const PixelBox& b) {
  return box_intersection(a, b).area() > 0;
}

// "close along the page width": horizontal gap between minimal boxes under
// the threshold and vertical overlap at least 30% of the shorter box.
bool close_along_width(const Group& a, const Group& b, int gap_px) {
  const PixelBox& ma = a.minimal_box;
  const PixelBox& mb = b.minimal_box;
  const int gap = std::max(ma.x, mb.x) - std::min(ma.x2(), mb.x2());
  if (gap >= gap_px) return false;
  const int overlap =
      std::min(ma.y2(), mb.y2()) - std::max(ma.y, mb.y);
  const int shorter = std::min(ma.h, mb.h);
  return overlap * 10 >= shorter * 3;
}

// Fixpoint pairwise merge in deterministic scan order.
template <class CloseFn>
std::vector<Group> merge_groups(std::vector<Group> groups, CloseFn&& close) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < groups.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < groups.size(); ++j) {
        if (!close(groups[i], groups[j])) continue;
        groups[i].bbox = box_union(groups[i].bbox, groups[j].bbox);
        groups[i].minimal_box =
            box_union(groups[i].minimal_box, groups[j].minimal_box);
        groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(j));
        changed = true;
        break;
      }
    }
  }
  return groups;
}

}  // namespace

BinaryImage binarize(const GrayImage& page) {
  BinaryImage out;
  out.width = page.width;
  out.height = page.height;
  out.fg.assign(page.pixels.size(), 0);
  if (page.pixels.empty()) return out;
  double mean = 0;
  for (float v : page.pixels) mean += v;
  mean /= static_cast<double>(page.pixels.size());
  const double threshold = 0.75 * mean;
  for (std::size_t i = 0; i < page.pixels.size(); ++i)
    out.fg[i] = page.pixels[i] < threshold ? 1 : 0;
  return out;
}

std::vector<int> default_gap_thresholds(const BinaryImage& binary) {
  std::vector<Component> comps = connected_components(binary);
  std::vector<int> heights;
  heights.reserve(comps.size());
  for (const auto& c : comps) heights.push_back(c.minimal_box.h);
  int median = 8;
  if (!heights.empty()) {
    std::sort(heights.begin(), heights.end());
    median = heights[heights.size() / 2];
  }
  std::vector<int> out;
  for (double f : {0.5, 1.0, 1.5}) {
    const int t = std::max(1, static_cast<int>(std::lround(f * median)));
    if (out.empty() || out.back() != t) out.push_back(t);
  }
  return out;
}

std::vector<Region> propose_regions(const BinaryImage& binary,
                                    const std::vector<int>& gap_thresholds_px) {
  const std::vector<Component> comps = connected_components(binary);
  if (comps.empty()) return {};

  std::vector<Group> base;
  base.reserve(comps.size());
  for (const auto& c : comps) base.push_back({c.bbox, c.minimal_box});

  // (c) merge components whose minimal boxes overlap
  base = merge_groups(std::move(base), [](const Group& a, const Group& b) {
    return boxes_intersect(a.minimal_box, b.minimal_box);
  });

  std::vector<Region> out;
  std::set<std::array<int, 4>> seen;
  for (int gap : gap_thresholds_px) {
    std::vector<Group> merged =
        merge_groups(base, [gap](const Group& a, const Group& b) {
          return close_along_width(a, b, gap);
        });
    std::sort(merged.begin(), merged.end(), [](const Group& a, const Group& b) {
      return std::tie(a.bbox.x, a.bbox.y, a.bbox.w, a.bbox.h) <
             std::tie(b.bbox.x, b.bbox.y, b.bbox.w, b.bbox.h);
    });
    for (const auto& g : merged) {
      if (!seen.insert({g.bbox.x, g.bbox.y, g.bbox.w, g.bbox.h}).second)
        continue;
      Region r;
      r.id = static_cast<std::uint32_t>(out.size());
      r.bbox = g.bbox;
      r.minimal_box = g.minimal_box;
      r.threshold_tag = gap;
      out.push_back(r);
    }
  }
  return out;
}

int BigramInvertedIndex::page_index(const std::string& page_id) const {
  for (std::size_t i = 0; i < pages.size(); ++i)
    if (pages[i].page_id == page_id) return static_cast<int>(i);
  return -1;
}

BigramInvertedIndex build_index(const IndexBuildInput& input,
                                const VisualVocabulary& vocab,
                                const AttributeModel& phob_model,
                                const EmbeddingConfig& cfg,
                                const DescriptorParams& dp,
                                std::uint64_t bundle_hash, Exec exec,
                                std::vector<std::uint32_t>* skipped) {
  if (phob_model.kind != EmbeddingKind::phob)
    fail(Err::KindMismatch, "indexing uses the PHOB model");

  BigramInvertedIndex index;
  index.bigrams = cfg.index_bigrams;
  index.pages = input.pages;
  index.bundle_hash = bundle_hash;

  const std::vector<Region>& regions = *input.regions;
  const int d_sub = phob_model.subspace_dim();

  // text side of every index bigram, precomputed once
  Eigen::MatrixXf bigram_vecs(d_sub, static_cast<Eigen::Index>(index.bigrams.size()));
  for (std::size_t b = 0; b < index.bigrams.size(); ++b)
    bigram_vecs.col(static_cast<Eigen::Index>(b)) =
        embed_text(bigram_embedding(index.bigrams[b], cfg), phob_model);

  std::vector<Eigen::VectorXf> region_vecs(regions.size());
  std::vector<std::uint8_t> ok(regions.size(), 0);
  parallel_for(static_cast<std::int64_t>(regions.size()), exec,
               [&](std::int64_t i) {
                 const Region& r = regions[static_cast<std::size_t>(i)];
                 const GrayImage& page = input.page_raster(r.page_id);
                 const GrayImage patch = crop(page, r.bbox);
                 try {
                   const DenseDescriptorSet desc = extract_dense_descriptors(
                       patch, dp.step, dp.scales, Exec::serial);
                   const FisherVector fv =
                       fisher_vector(desc, vocab, false, std::nullopt, Exec::serial);
                   region_vecs[static_cast<std::size_t>(i)] =
                       embed_image(fv, phob_model);
                   ok[static_cast<std::size_t>(i)] = 1;
                 } catch (const SpotError&) {
                   ok[static_cast<std::size_t>(i)] = 0;
                 }
               });

  // regions are re-identified densely over the embedded survivors
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (!ok[i]) {
      if (skipped) skipped->push_back(regions[i].id);
      std::fprintf(stderr,
                   "[spot] warning: region %u on page %s skipped "
                   "(crop not describable)\n",
                   regions[i].id, regions[i].page_id.c_str());
      continue;
    }
    Region r = regions[i];
    r.id = static_cast<std::uint32_t>(index.regions.size());
    index.regions.push_back(r);
  }

  index.postings.assign(index.bigrams.size(), {});
  std::vector<Eigen::VectorXf> kept_vecs;
  kept_vecs.reserve(index.regions.size());
  for (std::size_t i = 0; i < regions.size(); ++i)
    if (ok[i]) kept_vecs.push_back(region_vecs[i]);

  parallel_for(static_cast<std::int64_t>(index.bigrams.size()), exec,
               [&](std::int64_t b) {
                 auto& list = index.postings[static_cast<std::size_t>(b)];
                 list.resize(index.regions.size());
                 for (std::size_t i = 0; i < index.regions.size(); ++i) {
                   list[i].region_id = static_cast<std::uint32_t>(i);
                   list[i].score =
                       kept_vecs[i].dot(bigram_vecs.col(static_cast<Eigen::Index>(b)));
                 }
                 std::sort(list.begin(), list.end(),
                           [](const Posting& p, const Posting& q) {
                             if (p.score != q.score) return p.score > q.score;
                             return p.region_id < q.region_id;
                           });
               });
  return index;
}

std::vector<Posting> lookup(const BigramInvertedIndex& index,
                            std::string_view bigram, int n) {
  for (std::size_t b = 0; b < index.bigrams.size(); ++b) {
    if (index.bigrams[b] == bigram) {
      const auto& list = index.postings[b];
      const std::size_t take =
          std::min<std::size_t>(list.size(), n < 0 ? 0 : static_cast<std::size_t>(n));
      return {list.begin(), list.begin() + static_cast<std::ptrdiff_t>(take)};
    }
  }
  fail(Err::UnknownBigram, "bigram not in index vocabulary: " + std::string(bigram));
}

void write_index(const std::filesystem::path& path,
                 const BigramInvertedIndex& index) {
  BinWriter w;
  w.bytes(kIndexMagic, 5);
  w.u32(1);  // version
  w.u64(index.bundle_hash);

  w.u32(static_cast<std::uint32_t>(index.pages.size()));
  for (const auto& p : index.pages) {
    w.str(p.page_id);
    w.u32(static_cast<std::uint32_t>(p.width));
    w.u32(static_cast<std::uint32_t>(p.height));
  }

  w.u32(static_cast<std::uint32_t>(index.regions.size()));
  for (const auto& r : index.regions) {
    const int page = index.page_index(r.page_id);
    if (page < 0) fail(Err::Internal, "region references unknown page");
    w.u32(static_cast<std::uint32_t>(page));
    w.i32(r.bbox.x); w.i32(r.bbox.y); w.i32(r.bbox.w); w.i32(r.bbox.h);
    w.i32(r.minimal_box.x); w.i32(r.minimal_box.y);
    w.i32(r.minimal_box.w); w.i32(r.minimal_box.h);
    w.i32(r.threshold_tag);
  }

  w.u32(static_cast<std::uint32_t>(index.bigrams.size()));
  for (std::size_t b = 0; b < index.bigrams.size(); ++b) {
    w.str(index.bigrams[b]);
    const auto& list = index.postings[b];
    w.u32(static_cast<std::uint32_t>(list.size()));
    std::int64_t prev = 0;
    for (const auto& p : list) {
      // zigzag delta between consecutive region ids in posting order
      const std::int64_t delta = static_cast<std::int64_t>(p.region_id) - prev;
      prev = static_cast<std::int64_t>(p.region_id);
      std::uint64_t zz = (static_cast<std::uint64_t>(delta) << 1) ^
                         static_cast<std::uint64_t>(delta >> 63);
      while (zz >= 0x80) {
        w.u8(static_cast<std::uint8_t>(zz) | 0x80);
        zz >>= 7;
      }
      w.u8(static_cast<std::uint8_t>(zz));
      w.f32(p.score);
    }
  }
  write_file_atomic(path, w.buffer());
}

BigramInvertedIndex read_index(const std::filesystem::path& path) {
  BinReader r(read_file(path));
  char magic[5];
  for (char& c : magic) c = static_cast<char>(r.u8());
  if (std::string_view(magic, 5) != std::string_view(kIndexMagic, 5))
    fail(Err::VersionMismatch, "not an index file: " + path.string());
  const std::uint32_t version = r.u32();
  if (version != 1)
    fail(Err::VersionMismatch,
         "unsupported index version " + std::to_string(version));

  BigramInvertedIndex index;
  index.bundle_hash = r.u64();

  const std::uint32_t num_pages = r.u32();
  index.pages.resize(num_pages);
  for (auto& p : index.pages) {
    p.page_id = r.str();
    p.width = static_cast<int>(r.u32());
    p.height = static_cast<int>(r.u32());
  }

  const std::uint32_t num_regions = r.u32();
  index.regions.resize(num_regions);
  for (std::uint32_t i = 0; i < num_regions; ++i) {
    Region& reg = index.regions[i];
    reg.id = i;
    const std::uint32_t page = r.u32();
    if (page >= num_pages) fail(Err::Io, "region references invalid page");
    reg.page_id = index.pages[page].page_id;
    reg.bbox = {r.i32(), r.i32(), r.i32(), r.i32()};
    reg.minimal_box = {r.i32(), r.i32(), r.i32(), r.i32()};
    reg.threshold_tag = r.i32();
  }

  const std::uint32_t num_bigrams = r.u32();
  index.bigrams.resize(num_bigrams);
  index.postings.resize(num_bigrams);
  for (std::uint32_t b = 0; b < num_bigrams; ++b) {
    index.bigrams[b] = r.str();
    const std::uint32_t len = r.u32();
    auto& list = index.postings[b];
    list.resize(len);
    std::int64_t prev = 0;
    for (std::uint32_t i = 0; i < len; ++i) {
      std::uint64_t zz = 0;
      int shift = 0;
      while (true) {
        const std::uint8_t byte = r.u8();
        zz |= static_cast<std::uint64_t>(byte & 0x7f) << shift;
        if (!(byte & 0x80)) break;
        shift += 7;
      }
      const std::int64_t delta =
          static_cast<std::int64_t>(zz >> 1) ^ -static_cast<std::int64_t>(zz & 1);
      prev += delta;
      list[i].region_id = static_cast<std::uint32_t>(prev);
      list[i].score = r.f32();
    }
  }
  return index;
}

}  // namespace spot
