// Copyright 2026 The fastlk Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fastlk/error.hpp"
#include "fastlk/fast.hpp"
#include "fastlk/oracle.hpp"
#include "support.hpp"

using fastlk::FastParams;
using fastlk::Image;
using fastlk::LookupTable;
using fastlk::ResponseMap;
using fastlk::ScoreKind;

namespace {

// 13x13 canvas with the probe pixel at the center.
Image flat_canvas(std::uint8_t value) {
  Image img = Image::allocate(13, 13);
  for (auto& v : img.data) v = value;
  return img;
}

void set_circle(Image* img, int cx, int cy, int index, std::uint8_t value) {
  const auto off = fastlk::kBresenhamCircle[static_cast<std::size_t>(index)];
  img->at(cx + off.dx, cy + off.dy) = value;
}

}  // namespace

TEST_CASE("circle geometry: 16 offsets, radius 3, circular adjacency") {
  CHECK(fastlk::kBresenhamCircle.size() == 16);
  int chebyshev_max = 0;
  for (int i = 0; i < 16; ++i) {
    const auto a = fastlk::kBresenhamCircle[static_cast<std::size_t>(i)];
    CHECK(std::abs(a.dx) <= 3);
    CHECK(std::abs(a.dy) <= 3);
    chebyshev_max = std::max({chebyshev_max, std::abs(a.dx), std::abs(a.dy)});
    const auto b = fastlk::kBresenhamCircle[static_cast<std::size_t>((i + 1) & 15)];
    CHECK(std::abs(a.dx - b.dx) <= 1);
    CHECK(std::abs(a.dy - b.dy) <= 1);
  }
  CHECK(chebyshev_max == 3);
}

TEST_CASE("lookup table basics") {
  const LookupTable lut = fastlk::build_lookup_table(9);
  CHECK(lut.size_bytes() == 8192);
  CHECK_FALSE(lut.test(0x0000));
  CHECK(lut.test(0xFFFF));
  for (int n = 9; n <= 16; ++n) {
    CHECK(fastlk::build_lookup_table(n).test(0xFFFF));
  }
  CHECK_THROWS_AS(fastlk::build_lookup_table(8), fastlk::InvalidArgument);
  CHECK_THROWS_AS(fastlk::build_lookup_table(17), fastlk::InvalidArgument);
}

TEST_CASE("lookup table equals the rotation-scan oracle for N in {9, 12}") {
  for (const int n : {9, 12}) {
    const LookupTable lut = fastlk::build_lookup_table(n);
    for (std::uint32_t mask = 0; mask <= 0xFFFFu; ++mask) {
      const auto m = static_cast<std::uint16_t>(mask);
      REQUIRE(lut.test(m) == fastlk::oracle::arc_oracle(m, n));
    }
  }
}

TEST_CASE("arc oracle reference values") {
  CHECK(fastlk::oracle::arc_oracle(0x00FF, 8));
  CHECK(fastlk::oracle::arc_oracle(0xF00F, 8));  // wraparound run of 8
  CHECK_FALSE(fastlk::oracle::arc_oracle(0x0F0F, 8));
}

TEST_CASE("classification on a constant image") {
  const Image img = flat_canvas(80);
  const LookupTable lut = fastlk::build_lookup_table(10);
  const auto pc = fastlk::classify_pixel(img, 6, 6, FastParams{}, lut);
  CHECK_FALSE(pc.is_corner);
  CHECK(pc.dark_mask == 0);
  CHECK(pc.bright_mask == 0);
}

TEST_CASE("fully dark circle yields mask 0xFFFF and a corner") {
  Image img = flat_canvas(200);
  for (int i = 0; i < 16; ++i) set_circle(&img, 6, 6, i, 50);
  const LookupTable lut = fastlk::build_lookup_table(10);
  const auto pc = fastlk::classify_pixel(img, 6, 6, FastParams{}, lut);
  CHECK(pc.dark_mask == 0xFFFF);
  CHECK(pc.bright_mask == 0);
  CHECK(pc.is_corner);
}

TEST_CASE("border pixels are rejected by classify_pixel") {
  const Image img = flat_canvas(10);
  const LookupTable lut = fastlk::build_lookup_table(10);
  CHECK_THROWS_AS(fastlk::classify_pixel(img, 2, 6, FastParams{}, lut),
                  fastlk::InvalidArgument);
  CHECK_THROWS_AS(fastlk::classify_pixel(img, 6, 10, FastParams{}, lut),
                  fastlk::InvalidArgument);
}

TEST_CASE("a 10-pixel bright arc is a corner for N=10 but not N=11") {
  Image img = flat_canvas(50);
  for (int i = 2; i < 12; ++i) set_circle(&img, 6, 6, i, 100);

  FastParams p10;
  p10.epsilon = 10;
  p10.arc_length = 10;
  const LookupTable lut10 = fastlk::build_lookup_table(10);
  const auto pc10 = fastlk::classify_pixel(img, 6, 6, p10, lut10);
  CHECK(pc10.is_corner);
  CHECK(fastlk::oracle::arc_oracle(pc10.bright_mask, 10));

  FastParams p11 = p10;
  p11.arc_length = 11;
  const LookupTable lut11 = fastlk::build_lookup_table(11);
  const auto pc11 = fastlk::classify_pixel(img, 6, 6, p11, lut11);
  CHECK_FALSE(pc11.is_corner);
  CHECK_FALSE(fastlk::oracle::arc_oracle(pc11.bright_mask, 11));
}

TEST_CASE("dark and bright masks are disjoint on random images") {
  const LookupTable lut = fastlk::build_lookup_table(9);
  FastParams params;
  params.arc_length = 9;
  params.epsilon = 7;
  for (std::uint32_t seed = 0; seed < 5; ++seed) {
    const Image img = testsupport::make_noise(32, 24, seed);
    for (int y = 3; y < img.height - 3; ++y) {
      for (int x = 3; x < img.width - 3; ++x) {
        const auto pc = fastlk::classify_pixel(img, x, y, params, lut);
        REQUIRE((pc.dark_mask & pc.bright_mask) == 0);
      }
    }
  }
}

TEST_CASE("corner scores on the all-dark circle") {
  Image img = flat_canvas(200);
  for (int i = 0; i < 16; ++i) set_circle(&img, 6, 6, i, 50);
  const LookupTable lut = fastlk::build_lookup_table(10);

  FastParams params;
  params.epsilon = 10;
  params.arc_length = 10;

  params.score = ScoreKind::kMt;
  // Largest threshold with 50 < 200 - e is 149; oracle is the linear scan.
  CHECK(fastlk::corner_score(img, 6, 6, params, lut) == 149.0f);
  {
    int expected = -1;
    for (int e = params.epsilon; e <= 255; ++e) {
      if (50 < 200 - e) expected = e;
    }
    CHECK(expected == 149);
  }

  params.score = ScoreKind::kSadB;
  CHECK(fastlk::corner_score(img, 6, 6, params, lut) == 16.0f * (150 - 10));

  params.score = ScoreKind::kSadA;  // the arc is the whole circle here
  CHECK(fastlk::corner_score(img, 6, 6, params, lut) == 16.0f * (150 - 10));
}

TEST_CASE("non-corners score zero") {
  const Image img = flat_canvas(128);
  const LookupTable lut = fastlk::build_lookup_table(10);
  for (const auto kind : {ScoreKind::kSadB, ScoreKind::kSadA, ScoreKind::kMt}) {
    FastParams params;
    params.score = kind;
    CHECK(fastlk::corner_score(img, 6, 6, params, lut) == 0.0f);
  }
}

TEST_CASE("SAD-A sums only the qualifying arc, SAD-B the whole circle") {
  Image img = flat_canvas(200);
  for (int i = 0; i < 12; ++i) set_circle(&img, 6, 6, i, 100);  // dark run of 12
  set_circle(&img, 6, 6, 13, 250);  // bright outlier outside the arc

  const LookupTable lut = fastlk::build_lookup_table(10);
  FastParams params;
  params.epsilon = 10;
  params.arc_length = 10;

  params.score = ScoreKind::kSadA;
  CHECK(fastlk::corner_score(img, 6, 6, params, lut) == 12.0f * (100 - 10));
  params.score = ScoreKind::kSadB;
  CHECK(fastlk::corner_score(img, 6, 6, params, lut) ==
        12.0f * (100 - 10) + (50 - 10));
}

TEST_CASE("MT binary search equals the linear-scan oracle on noise") {
  const LookupTable lut = fastlk::build_lookup_table(9);
  FastParams params;
  params.arc_length = 9;
  params.epsilon = 5;
  params.score = ScoreKind::kMt;
  for (std::uint32_t seed = 100; seed < 103; ++seed) {
    const Image img = testsupport::make_noise(40, 30, seed);
    const ResponseMap naive = fastlk::oracle::naive_fast(img, params);
    for (int y = 3; y < img.height - 3; ++y) {
      for (int x = 3; x < img.width - 3; ++x) {
        REQUIRE(fastlk::corner_score(img, x, y, params, lut) == naive.at(x, y));
      }
    }
  }
}

TEST_CASE("MT score is monotone in epsilon and corners persist downward") {
  const Image img = testsupport::make_noise(48, 36, 42);
  FastParams params;
  params.arc_length = 9;
  params.score = ScoreKind::kMt;
  const LookupTable lut = fastlk::build_lookup_table(9);

  for (int eps : {4, 8, 16, 32}) {
    params.epsilon = eps;
    FastParams lower = params;
    lower.epsilon = eps / 2;
    for (int y = 3; y < img.height - 3; ++y) {
      for (int x = 3; x < img.width - 3; ++x) {
        const float hi = fastlk::corner_score(img, x, y, params, lut);
        const float lo = fastlk::corner_score(img, x, y, lower, lut);
        if (hi > 0.0f) {
          REQUIRE(lo > 0.0f);      // corner at eps stays a corner at eps/2
          REQUIRE(lo >= hi);       // raising epsilon never raises MT
        }
      }
    }
  }
}

TEST_CASE("responses: constant pyramid is all zero, borders always zero") {
  Image img = Image::allocate(64, 48);
  for (auto& v : img.data) v = 77;
  const auto pyr = fastlk::build_pyramid(img, 2);
  const LookupTable lut = fastlk::build_lookup_table(10);
  const auto maps = fastlk::detect_responses(pyr, FastParams{}, lut);
  REQUIRE(maps.size() == 2);
  for (const auto& map : maps) {
    for (int y = 0; y < map.height; ++y)
      for (int x = 0; x < map.width; ++x) REQUIRE(map.at(x, y) == 0.0f);
  }
}

TEST_CASE("responses: a single synthetic corner lights up only its vicinity") {
  Image img = Image::allocate(64, 64);
  for (auto& v : img.data) v = 60;
  // Bright 5x5 square corner at (20, 20); its corners pass the segment test.
  for (int y = 20; y < 25; ++y)
    for (int x = 20; x < 25; ++x) img.at(x, y) = 180;

  const LookupTable lut = fastlk::build_lookup_table(10);
  const auto pyr = fastlk::build_pyramid(img, 1);
  const auto maps = fastlk::detect_responses(pyr, FastParams{}, lut);
  const ResponseMap& map = maps[0];

  int nonzero = 0;
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      if (map.at(x, y) > 0.0f) {
        ++nonzero;
        CHECK(x >= 17);
        CHECK(x <= 27);
        CHECK(y >= 17);
        CHECK(y <= 27);
      }
    }
  }
  CHECK(nonzero > 0);
}

TEST_CASE("responses equal the naive detector exactly on noise images") {
  const LookupTable lut = fastlk::build_lookup_table(10);
  for (const auto kind : {ScoreKind::kSadB, ScoreKind::kSadA, ScoreKind::kMt}) {
    FastParams params;
    params.epsilon = 10;
    params.arc_length = 10;
    params.score = kind;
    for (std::uint32_t seed = 0; seed < 10; ++seed) {
      const Image img = testsupport::make_noise(64, 64, seed);
      const auto pyr = fastlk::build_pyramid(img, 1);
      const auto fast = fastlk::detect_responses(pyr, params, lut);
      const ResponseMap naive = fastlk::oracle::naive_fast(img, params);
      for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
          REQUIRE(fast[0].at(x, y) == naive.at(x, y));
        }
      }
    }
  }
}

TEST_CASE("responses are identical for any thread count") {
  const Image img = fastlk::load_pgm(testsupport::data_path("coins.pgm"));
  const auto pyr = fastlk::build_pyramid(img, 2);
  const LookupTable lut = fastlk::build_lookup_table(10);
  FastParams params;
  params.score = ScoreKind::kSadA;
  const auto serial = fastlk::detect_responses(pyr, params, lut, 1);
  const auto parallel = fastlk::detect_responses(pyr, params, lut, 8);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t k = 0; k < serial.size(); ++k) {
    REQUIRE(serial[k].scores == parallel[k].scores);
  }
}

TEST_CASE("detect_responses rejects a mismatched lookup table") {
  const Image img = testsupport::make_noise(32, 32, 1);
  const auto pyr = fastlk::build_pyramid(img, 1);
  const LookupTable lut = fastlk::build_lookup_table(11);
  FastParams params;
  params.arc_length = 10;
  CHECK_THROWS_AS(fastlk::detect_responses(pyr, params, lut),
                  fastlk::InvalidArgument);
}
