// Copyright 2026 The fastlk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "fastlk/fast.hpp"
#include "fastlk/nms.hpp"

// Deliberately naive, obviously correct reference implementations. They share
// the domain types with the production modules but none of their code paths,
// and they are single-threaded with no performance goals. Used as equality
// oracles in tests and for conformance reporting.

namespace fastlk {
namespace oracle {

/// True iff the 16-bit mask contains a cyclic run of at least min_len set
/// bits, decided by checking all 16 rotations.
bool arc_oracle(std::uint16_t mask, int min_len);

/// Per-pixel FAST with explicit branching and a rotation-scan arc check; no
/// lookup table. Same output contract as one level of detect_responses.
ResponseMap naive_fast(const Image& img, const FastParams& params, int level = 0);

/// naive_fast over every pyramid level.
std::vector<ResponseMap> naive_detect_responses(const ImagePyramid& pyr,
                                                const FastParams& params);

/// Full-neighborhood raster-scan suppression; mask entry is 1 where the pixel
/// has a positive score that survives its whole (2n+1)^2 neighborhood.
std::vector<std::uint8_t> raster_local_max_mask(const ResponseMap& resp,
                                                int radius);

/// Two independent passes: raster-scan suppression per level, then per-cell
/// argmax across levels (same tie rules as suppress_and_select).
FeatureGrid naive_nms_then_argmax(const std::vector<ResponseMap>& responses,
                                  const GridConfig& cfg);

/// Detection-conformance tallies against the naive detector: matched features
/// appear in the naive detector's suppressed output, subset_only are naive
/// survivors the pipeline did not emit, false_positives are emitted features
/// the naive detector does not consider corners at all.
struct Conformance {
  int matched = 0;
  int subset_only = 0;
  int false_positives = 0;
};

Conformance conformance_check(const ImagePyramid& pyr, const FeatureGrid& grid,
                              const FastParams& params, const GridConfig& cfg);

}  // namespace oracle
}  // namespace fastlk
