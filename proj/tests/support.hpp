// Copyright 2026 The fastlk Authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared test inputs: deterministic noise and smooth synthetic textures,
// bilinear warp generators, and paths to the bundled photographs.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fastlk/image.hpp"
#include "fastlk/nms.hpp"

namespace testsupport {

inline std::string data_path(const std::string& name) {
#ifdef FASTLK_TEST_DATA_DIR
  return std::string(FASTLK_TEST_DATA_DIR) + "/" + name;
#else
  return "tests/data/" + name;
#endif
}

inline fastlk::Image make_noise(int width, int height, std::uint32_t seed) {
  fastlk::Image img = fastlk::Image::allocate(width, height);
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> dist(0, 255);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      img.at(x, y) = static_cast<std::uint8_t>(dist(rng));
    }
  }
  return img;
}

// Frozen random blob field that can be rendered at any (sub-pixel) offset.
// Rendering twice with different offsets gives an exactly consistent pair of
// views of the same continuous scene, with only uint8 quantization noise.
class BlobField {
 public:
  // density is the approximate pixel area per blob; smaller means busier.
  BlobField(int width, int height, std::uint32_t seed, int low = 30,
            int high = 190, int density = 600)
      : low_(low), high_(high) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ux(0.0, width - 1.0);
    std::uniform_real_distribution<double> uy(0.0, height - 1.0);
    std::uniform_real_distribution<double> usigma(1.5, 6.0);
    std::uniform_real_distribution<double> uamp(-1.0, 1.0);
    const int blobs = std::max(16, width * height / density);
    cx_.resize(blobs);
    cy_.resize(blobs);
    inv_two_sigma2_.resize(blobs);
    cutoff2_.resize(blobs);
    amp_.resize(blobs);
    for (int b = 0; b < blobs; ++b) {
      cx_[b] = ux(rng);
      cy_[b] = uy(rng);
      const double sigma = usigma(rng);
      inv_two_sigma2_[b] = 1.0 / (2.0 * sigma * sigma);
      cutoff2_[b] = 16.0 * sigma * sigma;  // ~exp(-8), no visible seam
      amp_[b] = uamp(rng);
    }
  }

  double sample(double x, double y) const {
    double v = 0.0;
    for (std::size_t b = 0; b < cx_.size(); ++b) {
      const double dx = x - cx_[b];
      const double dy = y - cy_[b];
      const double d2 = dx * dx + dy * dy;
      if (d2 < cutoff2_[b]) v += amp_[b] * std::exp(-d2 * inv_two_sigma2_[b]);
    }
    // Only a handful of blobs overlap any point, so half amplitude with a
    // clamp keeps the window-independent value inside [low, high].
    const double mid = 0.5 * (low_ + high_);
    const double span = 0.5 * (high_ - low_);
    return mid + span * std::clamp(0.5 * v, -1.0, 1.0);
  }

  // Pixel (x, y) = field(x + ox, y + oy); a feature at p in render(0, 0)
  // appears at p + s in render(-s.x, -s.y). A nonzero noise_seed adds
  // deterministic sub-quantization sensor noise, which keeps the rounding
  // error uncorrelated with the scene.
  fastlk::Image render(int width, int height, double ox = 0.0, double oy = 0.0,
                       std::uint32_t noise_seed = 0) const {
    fastlk::Image img = fastlk::Image::allocate(width, height);
    std::mt19937 rng(noise_seed);
    std::uniform_real_distribution<double> dither(-0.5, 0.5);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        double v = sample(x + ox, y + oy);
        if (noise_seed != 0) v += dither(rng);
        img.at(x, y) = static_cast<std::uint8_t>(
            std::lround(std::clamp(v, 0.0, 255.0)));
      }
    }
    return img;
  }

 private:
  int low_;
  int high_;
  std::vector<double> cx_, cy_, inv_two_sigma2_, cutoff2_, amp_;
};

// Smooth, feature-rich texture; values stay within [low, high] so gain and
// offset variants can be generated without clamping.
inline fastlk::Image make_texture(int width, int height, std::uint32_t seed,
                                  int low = 30, int high = 190,
                                  int density = 600) {
  return BlobField(width, height, seed, low, high, density)
      .render(width, height);
}

// Shifted copy: out(x, y) = src(x - sx, y - sy) via bilinear sampling with
// border clamping. A feature at p in src appears at p + (sx, sy).
inline fastlk::Image shift_image(const fastlk::Image& src, double sx, double sy) {
  fastlk::Image out = fastlk::Image::allocate(src.width, src.height);
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      const double px = std::clamp(x - sx, 0.0, src.width - 1.0);
      const double py = std::clamp(y - sy, 0.0, src.height - 1.0);
      out.at(x, y) = static_cast<std::uint8_t>(
          std::lround(fastlk::sample_bilinear(src, px, py)));
    }
  }
  return out;
}

inline fastlk::Image gain_offset(const fastlk::Image& src, double gain,
                                 double offset) {
  fastlk::Image out = fastlk::Image::allocate(src.width, src.height);
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      const double v = gain * src.at(x, y) + offset;
      out.at(x, y) =
          static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
    }
  }
  return out;
}

inline fastlk::Image crop(const fastlk::Image& src, int ox, int oy, int width,
                          int height) {
  fastlk::Image out = fastlk::Image::allocate(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      out.at(x, y) = src.at(ox + x, oy + y);
    }
  }
  return out;
}

inline bool grids_equal(const fastlk::FeatureGrid& a,
                        const fastlk::FeatureGrid& b) {
  if (a.cols != b.cols || a.rows != b.rows) return false;
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    const auto& ca = a.cells[i];
    const auto& cb = b.cells[i];
    if (ca.has_value() != cb.has_value()) return false;
    if (!ca.has_value()) continue;
    if (ca->x != cb->x || ca->y != cb->y || ca->score != cb->score ||
        ca->level != cb->level) {
      return false;
    }
  }
  return true;
}

}  // namespace testsupport
