// Copyright 2026 The fastlk Authors
// SPDX-License-Identifier: Apache-2.0

#include "fastlk/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "fastlk/error.hpp"

namespace fastlk {

namespace {

int aligned_stride(int width) {
  return (width + kStrideAlignment - 1) / kStrideAlignment * kStrideAlignment;
}

}  // namespace

Image Image::allocate(int width, int height) {
  if (width < 1 || height < 1) {
    throw InvalidArgument("image dimensions must be positive, got " +
                          std::to_string(width) + "x" + std::to_string(height));
  }
  Image img;
  img.width = width;
  img.height = height;
  img.stride = aligned_stride(width);
  img.data.assign(static_cast<std::size_t>(img.stride) * height, 0);
  return img;
}

ImagePyramid build_pyramid(const Image& img, int num_levels) {
  if (num_levels < 1) {
    throw InvalidArgument("pyramid needs at least one level");
  }
  const int min_dim = std::min(img.width, img.height);
  if (min_dim >> (num_levels - 1) < 8) {
    throw InvalidArgument("image " + std::to_string(img.width) + "x" +
                          std::to_string(img.height) + " too small for " +
                          std::to_string(num_levels) + " pyramid levels");
  }

  ImagePyramid pyr;
  pyr.levels.reserve(static_cast<std::size_t>(num_levels));
  pyr.levels.push_back(img);
  for (int k = 1; k < num_levels; ++k) {
    const Image& src = pyr.levels.back();
    Image dst = Image::allocate(src.width / 2, src.height / 2);
    for (int y = 0; y < dst.height; ++y) {
      const std::uint8_t* r0 = &src.data[static_cast<std::size_t>(2 * y) * src.stride];
      const std::uint8_t* r1 = r0 + src.stride;
      std::uint8_t* out = &dst.data[static_cast<std::size_t>(y) * dst.stride];
      for (int x = 0; x < dst.width; ++x) {
        const int sum = r0[2 * x] + r0[2 * x + 1] + r1[2 * x] + r1[2 * x + 1];
        out[x] = static_cast<std::uint8_t>((sum + 2) >> 2);  // round half up
      }
    }
    pyr.levels.push_back(std::move(dst));
  }
  return pyr;
}

float sample_bilinear(const Image& img, double x, double y) {
  if (!(x >= 0.0 && y >= 0.0 && x <= img.width - 1 && y <= img.height - 1)) {
    throw InvalidArgument("sample position (" + std::to_string(x) + ", " +
                          std::to_string(y) + ") outside image bounds");
  }
  const int x0 = static_cast<int>(x);
  const int y0 = static_cast<int>(y);
  const int x1 = std::min(x0 + 1, img.width - 1);
  const int y1 = std::min(y0 + 1, img.height - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = (1.0 - fx) * img.at(x0, y0) + fx * img.at(x1, y0);
  const double bot = (1.0 - fx) * img.at(x0, y1) + fx * img.at(x1, y1);
  return static_cast<float>((1.0 - fy) * top + fy * bot);
}

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
bool next_pgm_token(std::istream& in, std::string& tok) {
  tok.clear();
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  while (c != EOF && !std::isspace(c)) {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  return !tok.empty();
}

int parse_pgm_int(std::istream& in, const std::string& path, const char* what) {
  std::string tok;
  if (!next_pgm_token(in, tok)) {
    throw IoError(path + ": truncated PGM header (missing " + what + ")");
  }
  try {
    std::size_t used = 0;
    const int value = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return value;
  } catch (const std::exception&) {
    throw IoError(path + ": invalid PGM " + what + " '" + tok + "'");
  }
}

}  // namespace

Image load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(path + ": cannot open file");
  }
  std::string magic;
  if (!next_pgm_token(in, magic) || magic != "P5") {
    throw IoError(path + ": not a binary PGM (P5) file");
  }
  const int width = parse_pgm_int(in, path, "width");
  const int height = parse_pgm_int(in, path, "height");
  const int maxval = parse_pgm_int(in, path, "maxval");
  if (width < 1 || height < 1) {
    throw IoError(path + ": invalid PGM dimensions");
  }
  if (maxval != 255) {
    throw IoError(path + ": unsupported PGM maxval " + std::to_string(maxval) +
                  " (must be 255)");
  }
  // The header ends with exactly one whitespace byte before the raster.
  Image img = Image::allocate(width, height);
  for (int y = 0; y < height; ++y) {
    in.read(reinterpret_cast<char*>(&img.data[static_cast<std::size_t>(y) * img.stride]),
            width);
    if (in.gcount() != width) {
      throw IoError(path + ": truncated PGM pixel data");
    }
  }
  return img;
}

void save_pgm(const Image& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError(path + ": cannot open file for writing");
  }
  char header[64];
  const int len = std::snprintf(header, sizeof(header), "P5\n%d %d\n255\n",
                                img.width, img.height);
  out.write(header, len);
  for (int y = 0; y < img.height; ++y) {
    out.write(reinterpret_cast<const char*>(
                  &img.data[static_cast<std::size_t>(y) * img.stride]),
              img.width);
  }
  if (!out) {
    throw IoError(path + ": write failed");
  }
}

}  // namespace fastlk
