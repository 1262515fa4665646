// Copyright 2026 The fastlk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fastlk/fast.hpp"
#include "fastlk/lk.hpp"
#include "fastlk/nms.hpp"
#include "fastlk/oracle.hpp"

namespace fastlk {

struct FrontendConfig {
  FastParams fast;
  GridConfig grid;
  TrackerConfig tracker;
  int target_count = 100;       // desired simultaneous tracks
  double redetect_ratio = 0.3;  // re-detect when live < ratio * target
  int threads = 0;              // 0 selects the hardware default
};

void validate(const FrontendConfig& cfg);

/// Wall-clock stage timings (microseconds) plus per-frame counters.
struct FrameStats {
  double pyramid_us = 0.0;
  double crf_us = 0.0;
  double nms_us = 0.0;
  double track_us = 0.0;
  NmsStats nms;
  int feature_count = 0;       // features emitted (detect) / live tracks (track)
  int tracks_entering = 0;     // live tracks advanced this frame
  int tracks_surviving = 0;    // still converged after tracking
  int tracks_spawned = 0;
  bool redetect_fired = false;
  int track_iterations = 0;    // summed over advanced tracks
};

/// One whole detection pass over a frame: pyramid, corner responses, fused
/// suppression and cell selection.
struct DetectRun {
  ImagePyramid pyramid;
  FeatureGrid grid;
  FrameStats stats;
};

DetectRun detect_frame(const Image& frame, const FastParams& fast,
                       const LookupTable& lut, const GridConfig& grid,
                       int threads = 1);

/// A feature followed across frames; templates are built once at birth.
struct Track {
  std::int64_t id = 0;
  CellMax birth;
  FeatureTemplates templates;
  WarpState warp;
  int birth_frame = 0;
  int last_frame = 0;
};

/// Per-frame view of a track; position is the birth anchor plus translation.
/// A track that converged can still leave the live set when re-detection
/// thins multiply-occupied cells, so liveness is reported explicitly.
struct TrackObservation {
  std::int64_t id = 0;
  double x = 0.0;
  double y = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  TrackStatus status = TrackStatus::kConverged;
  bool live = true;
  int birth_frame = 0;
};

// Detect-track lifecycle over an image sequence. Advances live tracks with
// the previous state as the starting point, retires any track that fails to
// converge, and re-detects into unoccupied cells whenever the live count
// drops below redetect_ratio * target_count. Single caller, sequential
// frames; internal stages parallelize per the inner modules' contracts.
class Frontend {
 public:
  explicit Frontend(const FrontendConfig& cfg);

  struct FrameResult {
    std::vector<TrackObservation> tracks;  // live and just-retired, by id
    FrameStats stats;
    std::optional<oracle::Conformance> conformance;
  };

  /// Processes the next frame; dimensions must match the first frame.
  /// When with_conformance is set, re-detection frames also report the
  /// detector's conformance against the naive reference.
  FrameResult process_frame(const Image& frame, bool with_conformance = false);

  const std::vector<Track>& live_tracks() const { return tracks_; }
  const FrontendConfig& config() const { return cfg_; }
  int frames_processed() const { return frame_index_; }

  /// Grid cell holding a full-resolution position.
  std::pair<int, int> cell_of(double x, double y) const;

 private:
  FrontendConfig cfg_;
  LookupTable lut_;
  std::vector<Track> tracks_;  // ascending id
  std::int64_t next_id_ = 0;
  int frame_index_ = 0;
  int width_ = 0;
  int height_ = 0;
};

}  // namespace fastlk
