// Copyright 2026 The fastlk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cassert>
#include <cstdint>
#include <vector>

#include "fastlk/image.hpp"

namespace fastlk {

/// Corner response flavors: sum of absolute differences over the whole circle,
/// over the contiguous arc only, or the maximum threshold at which the segment
/// test still passes.
enum class ScoreKind { kSadB, kSadA, kMt };

struct FastParams {
  int epsilon = 10;                    // intensity threshold, 0..255
  int arc_length = 10;                 // required contiguous count, 9..16
  ScoreKind score = ScoreKind::kSadB;
};

/// Throws InvalidArgument if epsilon or arc_length is out of range.
void validate(const FastParams& params);

inline constexpr int kCircleSize = 16;
inline constexpr int kCircleRadius = 3;
inline constexpr int kDetectBorder = 3;

struct CircleOffset {
  int dx;
  int dy;
};

/// Radius-3 Bresenham circle, starting at (0, -3) and proceeding clockwise
/// (image coordinates, y down). Adjacent entries are neighbors on the circle.
extern const std::array<CircleOffset, kCircleSize> kBresenhamCircle;

// Answers the segment test for every 16-bit comparison mask. Each answer is
// one bit, so all 2^16 entries pack into 2048 32-bit words (8 KB); the mask's
// high 11 bits select the word and its low 5 bits select the bit. Immutable
// after construction and safe to share across threads.
class LookupTable {
 public:
  bool test(std::uint16_t mask) const {
    return (words_[mask >> 5] >> (mask & 31u)) & 1u;
  }
  int arc_length() const { return arc_length_; }
  std::size_t size_bytes() const { return words_.size() * sizeof(std::uint32_t); }

 private:
  friend LookupTable build_lookup_table(int arc_length);

  std::array<std::uint32_t, 2048> words_{};
  int arc_length_ = 0;
};

/// Precomputes the segment test for all 65536 masks: entry(m) = 1 iff m has a
/// cyclic run of at least arc_length set bits. InvalidArgument outside [9, 16].
LookupTable build_lookup_table(int arc_length);

/// Single-precision corner-score raster aligned with one pyramid level.
/// Scores are zero at non-corners and inside the 3-pixel border.
struct ResponseMap {
  int width = 0;
  int height = 0;
  int stride = 0;  // multiple of kStrideAlignment
  int level = 0;
  std::vector<float> scores;

  static ResponseMap allocate(int width, int height, int level);

  float at(int x, int y) const {
    assert(x >= 0 && x < width && y >= 0 && y < height);
    return scores[static_cast<std::size_t>(y) * stride + x];
  }
  float& at(int x, int y) {
    assert(x >= 0 && x < width && y >= 0 && y < height);
    return scores[static_cast<std::size_t>(y) * stride + x];
  }
};

struct PixelClass {
  bool is_corner = false;
  std::uint16_t dark_mask = 0;    // bit i set iff I_i < I_center - epsilon
  std::uint16_t bright_mask = 0;  // bit i set iff I_i > I_center + epsilon
};

/// Labels the 16 circle pixels against the center and answers the segment
/// test with two table lookups (dark and bright masks are disjoint).
/// Requires 3 <= x < width-3 and 3 <= y < height-3.
PixelClass classify_pixel(const Image& img, int x, int y,
                          const FastParams& params, const LookupTable& lut);

/// Corner score of the pixel under params.score; 0 if the segment test fails.
float corner_score(const Image& img, int x, int y, const FastParams& params,
                   const LookupTable& lut);

/// Scores every interior pixel of every level. Pure per pixel; the output is
/// bit-identical for any thread count.
std::vector<ResponseMap> detect_responses(const ImagePyramid& pyr,
                                          const FastParams& params,
                                          const LookupTable& lut,
                                          int threads = 1);

}  // namespace fastlk
