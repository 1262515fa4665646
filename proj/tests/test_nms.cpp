// Copyright 2026 The fastlk Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fastlk/error.hpp"
#include "fastlk/fast.hpp"
#include "fastlk/nms.hpp"
#include "fastlk/oracle.hpp"
#include "support.hpp"

using fastlk::CellMax;
using fastlk::FeatureGrid;
using fastlk::GridConfig;
using fastlk::ResponseMap;

namespace {

ResponseMap zero_map(int w, int h, int level = 0) {
  return ResponseMap::allocate(w, h, level);
}

// Random response map; density in [0,1] controls how many pixels fire, and
// quantization to a few score values produces plenty of plateaus and ties.
ResponseMap random_map(int w, int h, std::uint32_t seed, double density,
                       int quantize_levels, int level = 0) {
  ResponseMap map = ResponseMap::allocate(w, h, level);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (u(rng) >= density) continue;
      const int q = 1 + static_cast<int>(u(rng) * quantize_levels);
      map.at(x, y) = static_cast<float>(q);
    }
  }
  return map;
}

GridConfig grid_32x32() {
  GridConfig cfg;
  cfg.cell_width_units = 1;   // 32 px
  cfg.cell_height_units = 32; // 32 px with a single level
  cfg.num_levels = 1;
  cfg.nms_radius = 1;
  return cfg;
}

}  // namespace

TEST_CASE("grid geometry follows the cell-unit rules") {
  GridConfig cfg;
  cfg.cell_width_units = 2;
  cfg.cell_height_units = 8;
  cfg.num_levels = 3;
  CHECK(cfg.cell_width() == 64);
  CHECK(cfg.cell_height() == 32);  // 2^(3-1) * 8
  CHECK(cfg.grid_cols(130) == 3);  // partial edge cell allowed
  CHECK(cfg.grid_rows(64) == 2);

  cfg.nms_radius = 0;
  CHECK_THROWS_AS(fastlk::validate(cfg), fastlk::InvalidArgument);
}

TEST_CASE("rescaling to full resolution") {
  CHECK(fastlk::rescale_to_level0(10, 7, 0) == std::pair<int, int>{10, 7});
  CHECK(fastlk::rescale_to_level0(10, 7, 1) == std::pair<int, int>{20, 14});
  CHECK(fastlk::rescale_to_level0(3, 5, 2) == std::pair<int, int>{12, 20});
}

TEST_CASE("a lone response owns its cell; all other cells stay empty") {
  std::vector<ResponseMap> maps;
  maps.push_back(zero_map(96, 64));
  maps[0].at(40, 10) = 5.0f;
  const FeatureGrid grid = fastlk::suppress_and_select(maps, grid_32x32());
  REQUIRE(grid.cols == 3);
  REQUIRE(grid.rows == 2);
  CHECK(grid.feature_count() == 1);
  REQUIRE(grid.at(1, 0).has_value());
  CHECK(grid.at(1, 0)->x == 40);
  CHECK(grid.at(1, 0)->y == 10);
  CHECK(grid.at(1, 0)->score == 5.0f);
  CHECK(grid.at(1, 0)->level == 0);
}

TEST_CASE("the weaker of two neighbors is suppressed") {
  std::vector<ResponseMap> maps;
  maps.push_back(zero_map(32, 32));
  maps[0].at(10, 10) = 5.0f;
  maps[0].at(11, 10) = 7.0f;
  const FeatureGrid grid = fastlk::suppress_and_select(maps, grid_32x32());
  CHECK(grid.feature_count() == 1);
  REQUIRE(grid.at(0, 0).has_value());
  CHECK(grid.at(0, 0)->x == 11);
  CHECK(grid.at(0, 0)->score == 7.0f);
}

TEST_CASE("spiral survival rules") {
  ResponseMap map = zero_map(32, 32);
  map.at(10, 10) = 5.0f;
  map.at(11, 10) = 7.0f;
  std::uint64_t comparisons = 0;
  CHECK(fastlk::spiral_is_local_max(map, 11, 10, 1, &comparisons));
  CHECK_FALSE(fastlk::spiral_is_local_max(map, 10, 10, 1, &comparisons));

  // Suppression by a strictly larger first-ring neighbor exits early.
  comparisons = 0;
  fastlk::spiral_is_local_max(map, 10, 10, 4, &comparisons);
  CHECK(comparisons <= 8);

  // Image-border neighbors are skipped, never suppressing.
  ResponseMap corner = zero_map(16, 16);
  corner.at(0, 0) = 1.0f;
  CHECK(fastlk::spiral_is_local_max(corner, 0, 0, 2, nullptr));
}

TEST_CASE("a plateau keeps exactly one survivor, the smallest (y, x)") {
  ResponseMap map = zero_map(32, 32);
  for (int y = 8; y < 11; ++y)
    for (int x = 8; x < 11; ++x) map.at(x, y) = 4.0f;

  int survivors = 0;
  for (int y = 8; y < 11; ++y) {
    for (int x = 8; x < 11; ++x) {
      if (fastlk::spiral_is_local_max(map, x, y, 2, nullptr)) {
        ++survivors;
        CHECK(x == 8);
        CHECK(y == 8);
      }
    }
  }
  CHECK(survivors == 1);

  // Deterministic: repeated runs yield the identical survivor set.
  std::vector<ResponseMap> maps;
  maps.push_back(std::move(map));
  GridConfig cfg = grid_32x32();
  cfg.nms_radius = 2;
  const FeatureGrid a = fastlk::suppress_and_select(maps, cfg);
  const FeatureGrid b = fastlk::suppress_and_select(maps, cfg);
  CHECK(testsupport::grids_equal(a, b));
}

TEST_CASE("zero scores are never emitted") {
  std::vector<ResponseMap> maps;
  maps.push_back(zero_map(64, 64));
  const FeatureGrid grid = fastlk::suppress_and_select(maps, grid_32x32());
  CHECK(grid.feature_count() == 0);
}

TEST_CASE("level count must match the grid configuration") {
  std::vector<ResponseMap> maps;
  maps.push_back(zero_map(64, 64));
  GridConfig cfg = grid_32x32();
  cfg.num_levels = 2;
  CHECK_THROWS_AS(fastlk::suppress_and_select(maps, cfg), fastlk::ConfigError);
}

TEST_CASE("coarse-level candidates land in their projected cells") {
  GridConfig cfg;
  cfg.cell_width_units = 1;
  cfg.cell_height_units = 16;  // 32 px cells at 2 levels
  cfg.num_levels = 2;
  cfg.nms_radius = 1;

  std::vector<ResponseMap> maps;
  maps.push_back(zero_map(128, 96, 0));
  maps.push_back(zero_map(64, 48, 1));
  maps[1].at(30, 20) = 9.0f;  // projects to (60, 40) -> cell (1, 1)

  const FeatureGrid grid = fastlk::suppress_and_select(maps, cfg);
  CHECK(grid.feature_count() == 1);
  REQUIRE(grid.at(1, 1).has_value());
  CHECK(grid.at(1, 1)->x == 60);
  CHECK(grid.at(1, 1)->y == 40);
  CHECK(grid.at(1, 1)->level == 1);

  // Exhaustive projection oracle: every level-1 pixel must map to the same
  // cell as rescale + division does.
  for (int y = 0; y < 48; ++y) {
    for (int x = 0; x < 64; ++x) {
      const auto [x0, y0] = fastlk::rescale_to_level0(x, y, 1);
      CHECK(x0 / cfg.cell_width() == (2 * x) / 32);
      CHECK(y0 / cfg.cell_height() == (2 * y) / 32);
    }
  }
}

TEST_CASE("cross-level cell ties prefer the lower level, then smaller (y, x)") {
  GridConfig cfg;
  cfg.cell_width_units = 1;
  cfg.cell_height_units = 16;
  cfg.num_levels = 2;
  cfg.nms_radius = 1;

  std::vector<ResponseMap> maps;
  maps.push_back(zero_map(64, 64, 0));
  maps.push_back(zero_map(32, 32, 1));
  maps[0].at(10, 10) = 3.0f;
  maps[1].at(4, 4) = 3.0f;  // projects to (8, 8), same cell, same score

  const FeatureGrid grid = fastlk::suppress_and_select(maps, cfg);
  REQUIRE(grid.at(0, 0).has_value());
  CHECK(grid.at(0, 0)->level == 0);
  CHECK(grid.at(0, 0)->x == 10);

  // Same level, same score: smaller (y, x) wins. Keep them out of each
  // other's suppression radius.
  std::vector<ResponseMap> tie;
  tie.push_back(zero_map(64, 64, 0));
  tie.push_back(zero_map(32, 32, 1));
  tie[0].at(20, 4) = 2.0f;
  tie[0].at(4, 20) = 2.0f;
  const FeatureGrid tied = fastlk::suppress_and_select(tie, cfg);
  REQUIRE(tied.at(0, 0).has_value());
  CHECK(tied.at(0, 0)->x == 20);
  CHECK(tied.at(0, 0)->y == 4);
}

TEST_CASE("partial edge cells participate normally") {
  std::vector<ResponseMap> maps;
  maps.push_back(zero_map(100, 70));  // 4x3 grid with ragged edges
  maps[0].at(99, 69) = 2.5f;
  const FeatureGrid grid = fastlk::suppress_and_select(maps, grid_32x32());
  REQUIRE(grid.cols == 4);
  REQUIRE(grid.rows == 3);
  REQUIRE(grid.at(3, 2).has_value());
  CHECK(grid.at(3, 2)->x == 99);
  CHECK(grid.at(3, 2)->y == 69);
}

TEST_CASE("oracle equivalence on random maps for n in {1, 2, 3, 4}") {
  for (int radius = 1; radius <= 4; ++radius) {
    GridConfig cfg = grid_32x32();
    cfg.nms_radius = radius;
    for (std::uint32_t seed = 0; seed < 6; ++seed) {
      // Mix sparse, dense, and heavily tied maps.
      const double density = seed % 2 == 0 ? 0.05 : 0.6;
      const int quantize = seed % 3 == 0 ? 3 : 40;
      std::vector<ResponseMap> maps;
      maps.push_back(random_map(97, 61, seed * 7 + radius, density, quantize));
      const FeatureGrid ours = fastlk::suppress_and_select(maps, cfg);
      const FeatureGrid ref = fastlk::oracle::naive_nms_then_argmax(maps, cfg);
      REQUIRE(testsupport::grids_equal(ours, ref));
      CHECK(ours.feature_count() <= ours.cols * ours.rows);
    }
  }
}

TEST_CASE("oracle equivalence across levels with heavy cross-level ties") {
  GridConfig cfg;
  cfg.cell_width_units = 1;
  cfg.cell_height_units = 16;
  cfg.num_levels = 2;
  for (int radius = 1; radius <= 4; ++radius) {
    cfg.nms_radius = radius;
    for (std::uint32_t seed = 0; seed < 4; ++seed) {
      std::vector<ResponseMap> maps;
      // Few distinct score values, so the same score shows up on both levels
      // and the cross-level tie rules are exercised constantly.
      maps.push_back(random_map(96, 64, seed * 13 + 1, 0.4, 3, 0));
      maps.push_back(random_map(48, 32, seed * 13 + 2, 0.4, 3, 1));
      const FeatureGrid ours = fastlk::suppress_and_select(maps, cfg, 4);
      const FeatureGrid ref = fastlk::oracle::naive_nms_then_argmax(maps, cfg);
      REQUIRE(testsupport::grids_equal(ours, ref));
    }
  }
}

TEST_CASE("oracle equivalence on a two-level pyramid of real responses") {
  const fastlk::Image img = fastlk::load_pgm(testsupport::data_path("coins.pgm"));
  const auto pyr = fastlk::build_pyramid(img, 2);
  const auto lut = fastlk::build_lookup_table(10);
  fastlk::FastParams params;
  const auto responses = fastlk::detect_responses(pyr, params, lut);

  GridConfig cfg;
  cfg.cell_width_units = 1;
  cfg.cell_height_units = 16;
  cfg.num_levels = 2;
  for (int radius = 1; radius <= 4; ++radius) {
    cfg.nms_radius = radius;
    const FeatureGrid ours = fastlk::suppress_and_select(responses, cfg);
    const FeatureGrid ref = fastlk::oracle::naive_nms_then_argmax(responses, cfg);
    REQUIRE(testsupport::grids_equal(ours, ref));
  }
}

TEST_CASE("suppression output is identical for any thread count") {
  std::vector<ResponseMap> maps;
  maps.push_back(random_map(320, 240, 99, 0.3, 5));
  GridConfig cfg = grid_32x32();
  cfg.nms_radius = 2;

  fastlk::NmsStats stats1;
  fastlk::NmsStats stats8;
  const FeatureGrid serial = fastlk::suppress_and_select(maps, cfg, 1, &stats1);
  const FeatureGrid parallel = fastlk::suppress_and_select(maps, cfg, 8, &stats8);
  CHECK(testsupport::grids_equal(serial, parallel));
  CHECK(stats1.comparisons == stats8.comparisons);
  CHECK(stats1.candidates == stats8.candidates);
}

TEST_CASE("mean comparisons per candidate stay below the raster bound") {
  const fastlk::Image img = fastlk::load_pgm(testsupport::data_path("camera.pgm"));
  const auto pyr = fastlk::build_pyramid(img, 1);
  const auto lut = fastlk::build_lookup_table(10);
  const auto responses = fastlk::detect_responses(pyr, fastlk::FastParams{}, lut);

  GridConfig cfg = grid_32x32();
  cfg.nms_radius = 2;
  fastlk::NmsStats stats;
  fastlk::suppress_and_select(responses, cfg, 1, &stats);
  REQUIRE(stats.candidates > 0);
  const double mean = static_cast<double>(stats.comparisons) /
                      static_cast<double>(stats.candidates);
  CHECK(mean < 25.0);  // (2n+1)^2 for n = 2
}
