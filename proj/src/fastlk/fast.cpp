// Copyright 2026 The fastlk Authors
// SPDX-License-Identifier: Apache-2.0

#include "fastlk/fast.hpp"

#include <algorithm>

#include "fastlk/error.hpp"
#include "fastlk/parallel.hpp"

namespace fastlk {

const std::array<CircleOffset, kCircleSize> kBresenhamCircle = {{
    {0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0}, {3, 1}, {2, 2}, {1, 3},
    {0, 3}, {-1, 3}, {-2, 2}, {-3, 1}, {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3},
}};

void validate(const FastParams& params) {
  if (params.epsilon < 0 || params.epsilon > 255) {
    throw InvalidArgument("epsilon must be in [0, 255], got " +
                          std::to_string(params.epsilon));
  }
  if (params.arc_length < 9 || params.arc_length > 16) {
    throw InvalidArgument("arc length must be in [9, 16], got " +
                          std::to_string(params.arc_length));
  }
}

namespace {

// Longest cyclic run of set bits, via a doubled 32-bit scan. Correct for any
// mask: a full mask is handled up front, and for non-full masks every cyclic
// run appears uninterrupted somewhere in the doubled word.
bool has_cyclic_run(std::uint16_t mask, int min_len) {
  if (mask == 0xFFFFu) return min_len <= 16;
  const std::uint32_t doubled = (static_cast<std::uint32_t>(mask) << 16) | mask;
  int run = 0;
  int best = 0;
  for (int i = 0; i < 32; ++i) {
    if ((doubled >> i) & 1u) {
      ++run;
      best = std::max(best, run);
    } else {
      run = 0;
    }
  }
  return best >= min_len;
}

}  // namespace

LookupTable build_lookup_table(int arc_length) {
  if (arc_length < 9 || arc_length > 16) {
    throw InvalidArgument("arc length must be in [9, 16], got " +
                          std::to_string(arc_length));
  }
  LookupTable lut;
  lut.arc_length_ = arc_length;
  for (std::uint32_t mask = 0; mask <= 0xFFFFu; ++mask) {
    if (has_cyclic_run(static_cast<std::uint16_t>(mask), arc_length)) {
      lut.words_[mask >> 5] |= 1u << (mask & 31u);
    }
  }
  return lut;
}

ResponseMap ResponseMap::allocate(int width, int height, int level) {
  if (width < 1 || height < 1) {
    throw InvalidArgument("response map dimensions must be positive");
  }
  ResponseMap map;
  map.width = width;
  map.height = height;
  map.stride = (width + kStrideAlignment - 1) / kStrideAlignment * kStrideAlignment;
  map.level = level;
  map.scores.assign(static_cast<std::size_t>(map.stride) * height, 0.0f);
  return map;
}

namespace {

struct CircleSample {
  int center = 0;
  std::array<int, kCircleSize> ring{};
};

CircleSample read_circle(const Image& img, int x, int y) {
  CircleSample s;
  s.center = img.at(x, y);
  for (int i = 0; i < kCircleSize; ++i) {
    s.ring[static_cast<std::size_t>(i)] =
        img.at(x + kBresenhamCircle[static_cast<std::size_t>(i)].dx,
               y + kBresenhamCircle[static_cast<std::size_t>(i)].dy);
  }
  return s;
}

void masks_at(const CircleSample& s, int epsilon, std::uint16_t* dark,
              std::uint16_t* bright) {
  const int lo = s.center - epsilon;
  const int hi = s.center + epsilon;
  std::uint16_t d = 0;
  std::uint16_t b = 0;
  for (int i = 0; i < kCircleSize; ++i) {
    const int v = s.ring[static_cast<std::size_t>(i)];
    d |= static_cast<std::uint16_t>((v < lo) ? (1u << i) : 0u);
    b |= static_cast<std::uint16_t>((v > hi) ? (1u << i) : 0u);
  }
  *dark = d;
  *bright = b;
}

bool segment_test(const CircleSample& s, int epsilon, const LookupTable& lut) {
  std::uint16_t dark = 0;
  std::uint16_t bright = 0;
  masks_at(s, epsilon, &dark, &bright);
  return lut.test(dark) || lut.test(bright);
}

// Best SAD over maximal cyclic runs of >= min_len set bits in mask, where each
// position contributes max(|ring - center| - epsilon, 0). Returns -1 when no
// run qualifies.
long best_arc_sum(std::uint16_t mask, int min_len, const CircleSample& s,
                  int epsilon) {
  if (mask == 0) return -1;
  const auto term = [&](int i) {
    const int d = std::abs(s.ring[static_cast<std::size_t>(i)] - s.center);
    return static_cast<long>(std::max(d - epsilon, 0));
  };
  if (mask == 0xFFFFu) {
    if (min_len > 16) return -1;
    long sum = 0;
    for (int i = 0; i < kCircleSize; ++i) sum += term(i);
    return sum;
  }
  // Start the scan just past a clear bit so every run is seen in one piece.
  int start = 0;
  while ((mask >> start) & 1u) ++start;
  long best = -1;
  int run_len = 0;
  long run_sum = 0;
  for (int step = 1; step <= kCircleSize; ++step) {
    const int i = (start + step) & 15;
    if ((mask >> i) & 1u) {
      ++run_len;
      run_sum += term(i);
      if (run_len >= min_len) best = std::max(best, run_sum);
    } else {
      run_len = 0;
      run_sum = 0;
    }
  }
  return best;
}

long sad_circle_sum(const CircleSample& s, int epsilon) {
  long sum = 0;
  for (int i = 0; i < kCircleSize; ++i) {
    const int d = std::abs(s.ring[static_cast<std::size_t>(i)] - s.center);
    sum += std::max(d - epsilon, 0);
  }
  return sum;
}

// Largest threshold in [epsilon, 255] at which the segment test still passes.
// The test is monotone in the threshold, so a binary search needs at most 8
// re-classifications.
int max_threshold_score(const CircleSample& s, int epsilon,
                        const LookupTable& lut) {
  int lo = epsilon;
  int hi = 255;
  while (lo < hi) {
    const int mid = (lo + hi + 1) / 2;
    if (segment_test(s, mid, lut)) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

float score_sample(const CircleSample& s, std::uint16_t dark,
                   std::uint16_t bright, const FastParams& params,
                   const LookupTable& lut) {
  switch (params.score) {
    case ScoreKind::kSadB:
      return static_cast<float>(sad_circle_sum(s, params.epsilon));
    case ScoreKind::kSadA: {
      long best = -1;
      if (lut.test(dark)) {
        best = std::max(best, best_arc_sum(dark, params.arc_length, s, params.epsilon));
      }
      if (lut.test(bright)) {
        best = std::max(best, best_arc_sum(bright, params.arc_length, s, params.epsilon));
      }
      return best < 0 ? 0.0f : static_cast<float>(best);
    }
    case ScoreKind::kMt:
      return static_cast<float>(max_threshold_score(s, params.epsilon, lut));
  }
  return 0.0f;
}

// Circle offsets in raster elements for a given stride.
std::array<int, kCircleSize> circle_element_offsets(int stride) {
  std::array<int, kCircleSize> off{};
  for (int i = 0; i < kCircleSize; ++i) {
    off[static_cast<std::size_t>(i)] =
        kBresenhamCircle[static_cast<std::size_t>(i)].dy * stride +
        kBresenhamCircle[static_cast<std::size_t>(i)].dx;
  }
  return off;
}

// Per-pixel scorer on a raw raster pointer; p points at the candidate pixel.
// The coarse pre-test looks at the four cardinal circle pixels first: any
// contiguous arc of at least 9 positions covers at least two of positions
// {0, 4, 8, 12}, so fewer than two dark and fewer than two bright cardinals
// rules the pixel out after 4 reads. Sound for every supported arc length.
float score_at(const std::uint8_t* p, const std::array<int, kCircleSize>& off,
               const FastParams& params, const LookupTable& lut) {
  const int center = p[0];
  const int lo = center - params.epsilon;
  const int hi = center + params.epsilon;

  const int v0 = p[off[0]];
  const int v4 = p[off[4]];
  const int v8 = p[off[8]];
  const int v12 = p[off[12]];
  const int dark_cardinals = (v0 < lo) + (v4 < lo) + (v8 < lo) + (v12 < lo);
  const int bright_cardinals = (v0 > hi) + (v4 > hi) + (v8 > hi) + (v12 > hi);
  if (dark_cardinals < 2 && bright_cardinals < 2) return 0.0f;

  CircleSample s;
  s.center = center;
  std::uint16_t dark = 0;
  std::uint16_t bright = 0;
  for (int i = 0; i < kCircleSize; ++i) {
    const int v = p[off[static_cast<std::size_t>(i)]];
    s.ring[static_cast<std::size_t>(i)] = v;
    dark |= static_cast<std::uint16_t>((v < lo) ? (1u << i) : 0u);
    bright |= static_cast<std::uint16_t>((v > hi) ? (1u << i) : 0u);
  }
  if (!lut.test(dark) && !lut.test(bright)) return 0.0f;
  return score_sample(s, dark, bright, params, lut);
}

}  // namespace

PixelClass classify_pixel(const Image& img, int x, int y,
                          const FastParams& params, const LookupTable& lut) {
  if (x < kDetectBorder || x >= img.width - kDetectBorder ||
      y < kDetectBorder || y >= img.height - kDetectBorder) {
    throw InvalidArgument("pixel (" + std::to_string(x) + ", " +
                          std::to_string(y) + ") violates the 3-pixel border");
  }
  const CircleSample s = read_circle(img, x, y);
  PixelClass pc;
  masks_at(s, params.epsilon, &pc.dark_mask, &pc.bright_mask);
  pc.is_corner = lut.test(pc.dark_mask) || lut.test(pc.bright_mask);
  return pc;
}

float corner_score(const Image& img, int x, int y, const FastParams& params,
                   const LookupTable& lut) {
  const PixelClass pc = classify_pixel(img, x, y, params, lut);
  if (!pc.is_corner) return 0.0f;
  const CircleSample s = read_circle(img, x, y);
  return score_sample(s, pc.dark_mask, pc.bright_mask, params, lut);
}

std::vector<ResponseMap> detect_responses(const ImagePyramid& pyr,
                                          const FastParams& params,
                                          const LookupTable& lut, int threads) {
  validate(params);
  if (lut.arc_length() != params.arc_length) {
    throw InvalidArgument("lookup table built for arc length " +
                          std::to_string(lut.arc_length()) + ", params use " +
                          std::to_string(params.arc_length));
  }
  std::vector<ResponseMap> maps;
  maps.reserve(static_cast<std::size_t>(pyr.num_levels()));
  for (int k = 0; k < pyr.num_levels(); ++k) {
    const Image& img = pyr.level(k);
    ResponseMap map = ResponseMap::allocate(img.width, img.height, k);
    const int rows = img.height - 2 * kDetectBorder;
    if (rows > 0 && img.width > 2 * kDetectBorder) {
      const std::array<int, kCircleSize> off = circle_element_offsets(img.stride);
      parallel_chunks(rows, threads, [&](int, int begin, int end) {
        for (int y = kDetectBorder + begin; y < kDetectBorder + end; ++y) {
          const std::uint8_t* row = &img.data[static_cast<std::size_t>(y) * img.stride];
          float* out = &map.scores[static_cast<std::size_t>(y) * map.stride];
          for (int x = kDetectBorder; x < img.width - kDetectBorder; ++x) {
            out[x] = score_at(row + x, off, params, lut);
          }
        }
      });
    }
    maps.push_back(std::move(map));
  }
  return maps;
}

}  // namespace fastlk
