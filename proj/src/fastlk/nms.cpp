// Copyright 2026 The fastlk Authors
// SPDX-License-Identifier: Apache-2.0

#include "fastlk/nms.hpp"

#include <string>

#include "fastlk/error.hpp"
#include "fastlk/parallel.hpp"

namespace fastlk {

void validate(const GridConfig& cfg) {
  if (cfg.cell_width_units < 1 || cfg.cell_height_units < 1) {
    throw InvalidArgument("grid cell units must be positive");
  }
  if (cfg.num_levels < 1) {
    throw InvalidArgument("grid needs at least one level");
  }
  if (cfg.nms_radius < 1) {
    throw InvalidArgument("suppression radius must be at least 1");
  }
}

FeatureGrid FeatureGrid::allocate(int cols, int rows) {
  FeatureGrid grid;
  grid.cols = cols;
  grid.rows = rows;
  grid.cells.assign(static_cast<std::size_t>(cols) * rows, std::nullopt);
  return grid;
}

int FeatureGrid::feature_count() const {
  int count = 0;
  for (const auto& cell : cells) {
    if (cell.has_value()) ++count;
  }
  return count;
}

bool cell_candidate_wins(const CellMax& challenger, const CellMax& incumbent) {
  if (challenger.score != incumbent.score) return challenger.score > incumbent.score;
  if (challenger.level != incumbent.level) return challenger.level < incumbent.level;
  if (challenger.y != incumbent.y) return challenger.y < incumbent.y;
  return challenger.x < incumbent.x;
}

bool spiral_is_local_max(const ResponseMap& resp, int x, int y, int radius,
                         std::uint64_t* comparisons) {
  const float score = resp.at(x, y);
  std::uint64_t count = 0;
  const auto suppressed_by = [&](int nx, int ny) {
    if (nx < 0 || ny < 0 || nx >= resp.width || ny >= resp.height) return false;
    ++count;
    const float v = resp.at(nx, ny);
    if (v > score) return true;
    return v == score && (ny < y || (ny == y && nx < x));
  };
  for (int r = 1; r <= radius; ++r) {
    // Walk the ring perimeter: top edge, right edge, bottom edge, left edge.
    for (int dx = -r; dx <= r; ++dx) {
      if (suppressed_by(x + dx, y - r)) goto lost;
    }
    for (int dy = -r + 1; dy <= r; ++dy) {
      if (suppressed_by(x + r, y + dy)) goto lost;
    }
    for (int dx = r - 1; dx >= -r; --dx) {
      if (suppressed_by(x + dx, y + r)) goto lost;
    }
    for (int dy = r - 1; dy >= -r + 1; --dy) {
      if (suppressed_by(x - r, y + dy)) goto lost;
    }
  }
  if (comparisons != nullptr) *comparisons += count;
  return true;
lost:
  if (comparisons != nullptr) *comparisons += count;
  return false;
}

FeatureGrid suppress_and_select(const std::vector<ResponseMap>& responses,
                                const GridConfig& cfg, int threads,
                                NmsStats* stats) {
  validate(cfg);
  if (static_cast<int>(responses.size()) != cfg.num_levels) {
    throw ConfigError("grid configured for " + std::to_string(cfg.num_levels) +
                      " levels, got " + std::to_string(responses.size()) +
                      " response maps");
  }
  const ResponseMap& base = responses.front();
  FeatureGrid grid = FeatureGrid::allocate(cfg.grid_cols(base.width),
                                           cfg.grid_rows(base.height));

  struct Partial {
    std::vector<CellMax> survivors;
    std::uint64_t comparisons = 0;
    std::uint64_t candidates = 0;
  };

  for (int k = 0; k < cfg.num_levels; ++k) {
    const ResponseMap& resp = responses[static_cast<std::size_t>(k)];
    std::vector<Partial> parts(
        static_cast<std::size_t>(chunk_count(resp.height, threads)));
    parallel_chunks(resp.height, threads, [&](int chunk, int begin, int end) {
      Partial& part = parts[static_cast<std::size_t>(chunk)];
      for (int y = begin; y < end; ++y) {
        for (int x = 0; x < resp.width; ++x) {
          const float score = resp.at(x, y);
          if (score <= 0.0f) continue;
          ++part.candidates;
          if (!spiral_is_local_max(resp, x, y, cfg.nms_radius, &part.comparisons)) {
            continue;
          }
          const auto [x0, y0] = rescale_to_level0(x, y, k);
          part.survivors.push_back(CellMax{x0, y0, score, k});
        }
      }
    });
    // Cell selection is an extremum under a total order, so the fold result
    // does not depend on chunk boundaries.
    for (const Partial& part : parts) {
      for (const CellMax& cand : part.survivors) {
        auto& slot = grid.at(cand.x / cfg.cell_width(), cand.y / cfg.cell_height());
        if (!slot.has_value() || cell_candidate_wins(cand, *slot)) {
          slot = cand;
        }
      }
      if (stats != nullptr) {
        stats->comparisons += part.comparisons;
        stats->candidates += part.candidates;
      }
    }
  }
  return grid;
}

}  // namespace fastlk
