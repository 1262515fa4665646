// Copyright 2026 The fastlk Authors
// SPDX-License-Identifier: Apache-2.0

#include "fastlk/oracle.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "fastlk/error.hpp"

namespace fastlk {
namespace oracle {

bool arc_oracle(std::uint16_t mask, int min_len) {
  if (min_len <= 0) return true;
  if (min_len > 16) return false;
  const std::uint32_t want = (min_len == 16) ? 0xFFFFu : ((1u << min_len) - 1u);
  const std::uint32_t m = mask;
  for (int rot = 0; rot < 16; ++rot) {
    const std::uint32_t rotated = ((m >> rot) | (m << (16 - rot))) & 0xFFFFu;
    if ((rotated & want) == want) return true;
  }
  return false;
}

namespace {

enum class Label { kDarker, kSimilar, kBrighter };

struct NaivePixel {
  int center = 0;
  std::array<int, kCircleSize> ring{};
  std::array<Label, kCircleSize> labels{};
};

NaivePixel label_circle(const Image& img, int x, int y, int epsilon) {
  NaivePixel p;
  p.center = img.at(x, y);
  for (int i = 0; i < kCircleSize; ++i) {
    const CircleOffset off = kBresenhamCircle[static_cast<std::size_t>(i)];
    const int v = img.at(x + off.dx, y + off.dy);
    p.ring[static_cast<std::size_t>(i)] = v;
    if (v < p.center - epsilon) {
      p.labels[static_cast<std::size_t>(i)] = Label::kDarker;
    } else if (v > p.center + epsilon) {
      p.labels[static_cast<std::size_t>(i)] = Label::kBrighter;
    } else {
      p.labels[static_cast<std::size_t>(i)] = Label::kSimilar;
    }
  }
  return p;
}

bool has_arc(const NaivePixel& p, Label which, int min_len) {
  for (int start = 0; start < kCircleSize; ++start) {
    bool ok = true;
    for (int j = 0; j < min_len; ++j) {
      if (p.labels[static_cast<std::size_t>((start + j) & 15)] != which) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

long naive_arc_sad(const NaivePixel& p, Label which, int min_len, int epsilon) {
  // Sum the SAD terms of every maximal run of `which` labels that is at least
  // min_len long; keep the best. The full circle has no run starts, so it is
  // handled first.
  const auto term = [&](int i) {
    const int d = std::abs(p.ring[static_cast<std::size_t>(i)] - p.center);
    return static_cast<long>(std::max(d - epsilon, 0));
  };
  bool all = true;
  for (int i = 0; i < kCircleSize; ++i) {
    if (p.labels[static_cast<std::size_t>(i)] != which) all = false;
  }
  if (all) {
    long sum = 0;
    for (int i = 0; i < kCircleSize; ++i) sum += term(i);
    return min_len <= 16 ? sum : -1;
  }
  long best = -1;
  for (int start = 0; start < kCircleSize; ++start) {
    const bool is_run_start =
        p.labels[static_cast<std::size_t>(start)] == which &&
        p.labels[static_cast<std::size_t>((start + 15) & 15)] != which;
    if (!is_run_start) continue;
    int len = 0;
    long sum = 0;
    while (len < kCircleSize &&
           p.labels[static_cast<std::size_t>((start + len) & 15)] == which) {
      sum += term((start + len) & 15);
      ++len;
    }
    if (len >= min_len) best = std::max(best, sum);
  }
  return best;
}

bool naive_segment_test(const Image& img, int x, int y, int epsilon, int n) {
  const NaivePixel p = label_circle(img, x, y, epsilon);
  return has_arc(p, Label::kDarker, n) || has_arc(p, Label::kBrighter, n);
}

float naive_score(const Image& img, int x, int y, const FastParams& params) {
  const NaivePixel p = label_circle(img, x, y, params.epsilon);
  const bool corner = has_arc(p, Label::kDarker, params.arc_length) ||
                      has_arc(p, Label::kBrighter, params.arc_length);
  if (!corner) return 0.0f;
  switch (params.score) {
    case ScoreKind::kSadB: {
      long sum = 0;
      for (int i = 0; i < kCircleSize; ++i) {
        const int d = std::abs(p.ring[static_cast<std::size_t>(i)] - p.center);
        if (d > params.epsilon) sum += d - params.epsilon;
      }
      return static_cast<float>(sum);
    }
    case ScoreKind::kSadA: {
      long best = -1;
      if (has_arc(p, Label::kDarker, params.arc_length)) {
        best = std::max(best, naive_arc_sad(p, Label::kDarker, params.arc_length,
                                            params.epsilon));
      }
      if (has_arc(p, Label::kBrighter, params.arc_length)) {
        best = std::max(best, naive_arc_sad(p, Label::kBrighter,
                                            params.arc_length, params.epsilon));
      }
      return best < 0 ? 0.0f : static_cast<float>(best);
    }
    case ScoreKind::kMt: {
      int mt = params.epsilon;
      for (int e = params.epsilon; e <= 255; ++e) {
        if (naive_segment_test(img, x, y, e, params.arc_length)) {
          mt = e;
        } else {
          break;  // monotone: once the test fails it stays failed
        }
      }
      return static_cast<float>(mt);
    }
  }
  return 0.0f;
}

}  // namespace

ResponseMap naive_fast(const Image& img, const FastParams& params, int level) {
  validate(params);
  ResponseMap map = ResponseMap::allocate(img.width, img.height, level);
  for (int y = kDetectBorder; y < img.height - kDetectBorder; ++y) {
    for (int x = kDetectBorder; x < img.width - kDetectBorder; ++x) {
      map.at(x, y) = naive_score(img, x, y, params);
    }
  }
  return map;
}

std::vector<ResponseMap> naive_detect_responses(const ImagePyramid& pyr,
                                                const FastParams& params) {
  std::vector<ResponseMap> maps;
  maps.reserve(static_cast<std::size_t>(pyr.num_levels()));
  for (int k = 0; k < pyr.num_levels(); ++k) {
    maps.push_back(naive_fast(pyr.level(k), params, k));
  }
  return maps;
}

std::vector<std::uint8_t> raster_local_max_mask(const ResponseMap& resp,
                                                int radius) {
  std::vector<std::uint8_t> mask(
      static_cast<std::size_t>(resp.width) * resp.height, 0);
  for (int y = 0; y < resp.height; ++y) {
    for (int x = 0; x < resp.width; ++x) {
      const float score = resp.at(x, y);
      if (score <= 0.0f) continue;
      bool survives = true;
      for (int dy = -radius; dy <= radius && survives; ++dy) {
        for (int dx = -radius; dx <= radius && survives; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int nx = x + dx;
          const int ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= resp.width || ny >= resp.height) continue;
          const float v = resp.at(nx, ny);
          if (v > score || (v == score && (ny < y || (ny == y && nx < x)))) {
            survives = false;
          }
        }
      }
      if (survives) {
        mask[static_cast<std::size_t>(y) * resp.width + x] = 1;
      }
    }
  }
  return mask;
}

FeatureGrid naive_nms_then_argmax(const std::vector<ResponseMap>& responses,
                                  const GridConfig& cfg) {
  validate(cfg);
  if (static_cast<int>(responses.size()) != cfg.num_levels) {
    throw ConfigError("grid configured for " + std::to_string(cfg.num_levels) +
                      " levels, got " + std::to_string(responses.size()) +
                      " response maps");
  }
  const ResponseMap& base = responses.front();
  FeatureGrid grid = FeatureGrid::allocate(cfg.grid_cols(base.width),
                                           cfg.grid_rows(base.height));
  for (int k = 0; k < cfg.num_levels; ++k) {
    const ResponseMap& resp = responses[static_cast<std::size_t>(k)];
    const std::vector<std::uint8_t> survivors =
        raster_local_max_mask(resp, cfg.nms_radius);
    for (int y = 0; y < resp.height; ++y) {
      for (int x = 0; x < resp.width; ++x) {
        if (survivors[static_cast<std::size_t>(y) * resp.width + x] == 0) continue;
        const CellMax cand{x << k, y << k, resp.at(x, y), k};
        auto& slot = grid.at(cand.x / cfg.cell_width(), cand.y / cfg.cell_height());
        if (!slot.has_value()) {
          slot = cand;
          continue;
        }
        const CellMax& cur = *slot;
        const bool wins =
            cand.score > cur.score ||
            (cand.score == cur.score &&
             (cand.level < cur.level ||
              (cand.level == cur.level &&
               (cand.y < cur.y || (cand.y == cur.y && cand.x < cur.x)))));
        if (wins) slot = cand;
      }
    }
  }
  return grid;
}

Conformance conformance_check(const ImagePyramid& pyr, const FeatureGrid& grid,
                              const FastParams& params, const GridConfig& cfg) {
  Conformance result;
  std::vector<ResponseMap> naive = naive_detect_responses(pyr, params);
  long naive_survivors = 0;
  std::vector<std::vector<std::uint8_t>> masks;
  masks.reserve(naive.size());
  for (const ResponseMap& resp : naive) {
    masks.push_back(raster_local_max_mask(resp, cfg.nms_radius));
    for (const std::uint8_t s : masks.back()) naive_survivors += s;
  }
  for (const auto& cell : grid.cells) {
    if (!cell.has_value()) continue;
    const int k = cell->level;
    const int lx = cell->x >> k;
    const int ly = cell->y >> k;
    const ResponseMap& resp = naive[static_cast<std::size_t>(k)];
    if (resp.at(lx, ly) <= 0.0f) {
      ++result.false_positives;
      continue;
    }
    if (masks[static_cast<std::size_t>(k)]
             [static_cast<std::size_t>(ly) * resp.width + lx] != 0) {
      ++result.matched;
    }
  }
  result.subset_only = static_cast<int>(naive_survivors) - result.matched;
  return result;
}

}  // namespace oracle
}  // namespace fastlk
