// Copyright 2026 The fastlk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cassert>
#include <cstdint>
#include <string>
#include <vector>

namespace fastlk {

/// Rows are padded so that the stride is a multiple of this many elements.
/// Grid cell boundaries then coincide with row-segment boundaries.
inline constexpr int kStrideAlignment = 32;

/// 8-bit grayscale raster, row-major with padded stride.
struct Image {
  int width = 0;
  int height = 0;
  int stride = 0;  // elements per row, multiple of kStrideAlignment
  std::vector<std::uint8_t> data;

  /// Zero-filled image with an aligned stride.
  static Image allocate(int width, int height);

  std::uint8_t at(int x, int y) const {
    assert(x >= 0 && x < width && y >= 0 && y < height);
    return data[static_cast<std::size_t>(y) * stride + x];
  }
  std::uint8_t& at(int x, int y) {
    assert(x >= 0 && x < width && y >= 0 && y < height);
    return data[static_cast<std::size_t>(y) * stride + x];
  }

  bool same_size(const Image& other) const {
    return width == other.width && height == other.height;
  }
};

/// Halving pyramid; level 0 is the original resolution.
struct ImagePyramid {
  std::vector<Image> levels;

  int num_levels() const { return static_cast<int>(levels.size()); }
  const Image& level(int k) const { return levels[static_cast<std::size_t>(k)]; }
};

/// Builds a pyramid where level k pixel (x, y) is the rounded average of the
/// 2x2 block at (2x, 2y) of level k-1; odd trailing rows/columns are dropped.
/// Every level must keep width and height >= 8, otherwise InvalidArgument.
ImagePyramid build_pyramid(const Image& img, int num_levels);

/// Bilinear interpolation of the four surrounding pixels. Exact pixel value at
/// integer coordinates. Valid range is [0, width-1] x [0, height-1];
/// InvalidArgument outside it.
float sample_bilinear(const Image& img, double x, double y);

/// Reads a binary PGM (P5) file with maxval 255. IoError messages name the
/// offending file.
Image load_pgm(const std::string& path);

/// Writes a binary PGM (P5) file with maxval 255.
void save_pgm(const Image& img, const std::string& path);

}  // namespace fastlk
