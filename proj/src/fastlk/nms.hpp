// Copyright 2026 The fastlk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "fastlk/fast.hpp"

namespace fastlk {

/// Cell-grid geometry. At full resolution a cell spans 32*cell_width_units by
/// 2^(num_levels-1)*cell_height_units pixels; partial edge cells are allowed.
struct GridConfig {
  int cell_width_units = 1;
  int cell_height_units = 32;
  int num_levels = 1;
  int nms_radius = 1;  // Moore-neighborhood radius, in pixels of each level

  int cell_width() const { return 32 * cell_width_units; }
  int cell_height() const { return (1 << (num_levels - 1)) * cell_height_units; }
  int grid_cols(int image_width) const {
    return (image_width + cell_width() - 1) / cell_width();
  }
  int grid_rows(int image_height) const {
    return (image_height + cell_height() - 1) / cell_height();
  }
};

void validate(const GridConfig& cfg);

/// Winning candidate of one cell, in full-resolution coordinates.
struct CellMax {
  int x = 0;
  int y = 0;
  float score = 0.0f;
  int level = 0;
};

struct FeatureGrid {
  int cols = 0;
  int rows = 0;
  std::vector<std::optional<CellMax>> cells;  // row-major

  static FeatureGrid allocate(int cols, int rows);

  const std::optional<CellMax>& at(int cx, int cy) const {
    return cells[static_cast<std::size_t>(cy) * cols + cx];
  }
  std::optional<CellMax>& at(int cx, int cy) {
    return cells[static_cast<std::size_t>(cy) * cols + cx];
  }
  int feature_count() const;
};

/// Neighborhood-suppression instrumentation: total neighbor comparisons and
/// the number of candidates (pixels with a positive score) examined.
struct NmsStats {
  std::uint64_t comparisons = 0;
  std::uint64_t candidates = 0;
};

/// (x, y) at level k projected to full resolution: (x * 2^k, y * 2^k).
inline std::pair<int, int> rescale_to_level0(int x, int y, int level) {
  return {x << level, y << level};
}

/// True iff the score at (x, y) survives against every neighbor in its
/// (2*radius+1)^2 Moore neighborhood. Comparisons proceed ring by ring (3x3
/// first) and stop at the first suppressing neighbor. A neighbor suppresses on
/// a strictly greater score, or an equal score at a lexicographically smaller
/// (y, x). Neighbors outside the image never suppress.
bool spiral_is_local_max(const ResponseMap& resp, int x, int y, int radius,
                         std::uint64_t* comparisons = nullptr);

// Fused suppression and cell selection: every positive pixel of every level
// that survives Moore suppression on its own level competes, at its projected
// full-resolution position, for the cell it falls in. The cell keeps the
// candidate with the highest score; ties prefer the lower level, then the
// smaller (y, x). Candidates are independent, so results are identical for
// any thread count.
FeatureGrid suppress_and_select(const std::vector<ResponseMap>& responses,
                                const GridConfig& cfg, int threads = 1,
                                NmsStats* stats = nullptr);

/// Strict total order used for cell selection across levels.
bool cell_candidate_wins(const CellMax& challenger, const CellMax& incumbent);

}  // namespace fastlk
