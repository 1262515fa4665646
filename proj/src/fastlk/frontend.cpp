// Copyright 2026 The fastlk Authors
// SPDX-License-Identifier: Apache-2.0

#include "fastlk/frontend.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <unordered_set>

#include "fastlk/error.hpp"

namespace fastlk {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_us(Clock::time_point since) {
  return std::chrono::duration<double, std::micro>(Clock::now() - since).count();
}

}  // namespace

void validate(const FrontendConfig& cfg) {
  validate(cfg.fast);
  validate(cfg.grid);
  validate(cfg.tracker);
  if (cfg.target_count < 1) {
    throw ConfigError("target track count must be positive");
  }
  if (!(cfg.redetect_ratio > 0.0 && cfg.redetect_ratio < 1.0)) {
    throw ConfigError("re-detection ratio must lie strictly between 0 and 1");
  }
}

DetectRun detect_frame(const Image& frame, const FastParams& fast,
                       const LookupTable& lut, const GridConfig& grid,
                       int threads) {
  DetectRun run;
  auto t0 = Clock::now();
  run.pyramid = build_pyramid(frame, grid.num_levels);
  run.stats.pyramid_us = elapsed_us(t0);

  t0 = Clock::now();
  const std::vector<ResponseMap> responses =
      detect_responses(run.pyramid, fast, lut, threads);
  run.stats.crf_us = elapsed_us(t0);

  t0 = Clock::now();
  run.grid = suppress_and_select(responses, grid, threads, &run.stats.nms);
  run.stats.nms_us = elapsed_us(t0);

  run.stats.feature_count = run.grid.feature_count();
  return run;
}

Frontend::Frontend(const FrontendConfig& cfg) : cfg_(cfg) {
  validate(cfg_);
  lut_ = build_lookup_table(cfg_.fast.arc_length);
}

std::pair<int, int> Frontend::cell_of(double x, double y) const {
  const int cx = static_cast<int>(x) / cfg_.grid.cell_width();
  const int cy = static_cast<int>(y) / cfg_.grid.cell_height();
  return {cx, cy};
}

Frontend::FrameResult Frontend::process_frame(const Image& frame,
                                              bool with_conformance) {
  if (frame_index_ == 0) {
    width_ = frame.width;
    height_ = frame.height;
    const int cells =
        cfg_.grid.grid_cols(width_) * cfg_.grid.grid_rows(height_);
    if (cfg_.target_count > cells) {
      throw ConfigError("target count " + std::to_string(cfg_.target_count) +
                        " exceeds the " + std::to_string(cells) +
                        " grid cells of a " + std::to_string(width_) + "x" +
                        std::to_string(height_) + " frame");
    }
  } else if (frame.width != width_ || frame.height != height_) {
    throw DimensionMismatch("frame " + std::to_string(frame_index_) + " is " +
                            std::to_string(frame.width) + "x" +
                            std::to_string(frame.height) + ", session expects " +
                            std::to_string(width_) + "x" +
                            std::to_string(height_));
  }

  FrameResult result;
  FrameStats& stats = result.stats;

  auto t0 = Clock::now();
  const ImagePyramid pyramid = build_pyramid(frame, cfg_.grid.num_levels);
  stats.pyramid_us = elapsed_us(t0);

  // Advance live tracks from their previous state.
  std::vector<TrackObservation> retired;
  t0 = Clock::now();
  stats.tracks_entering = static_cast<int>(tracks_.size());
  if (!tracks_.empty()) {
    std::vector<TrackItem> items;
    items.reserve(tracks_.size());
    for (const Track& track : tracks_) {
      items.push_back(TrackItem{&track.templates, track.warp});
    }
    const std::vector<TrackResult> outcomes =
        track_all(items, pyramid, cfg_.tracker, cfg_.threads);

    std::vector<Track> survivors;
    survivors.reserve(tracks_.size());
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
      Track& track = tracks_[i];
      const TrackResult& outcome = outcomes[i];
      stats.track_iterations += outcome.total_iterations();
      if (outcome.status == TrackStatus::kConverged) {
        track.warp = outcome.warp;
        track.last_frame = frame_index_;
        survivors.push_back(std::move(track));
      } else {
        retired.push_back(TrackObservation{
            track.id, track.birth.x + outcome.warp.tx,
            track.birth.y + outcome.warp.ty, outcome.warp.alpha,
            outcome.warp.beta, outcome.status, false, track.birth_frame});
      }
    }
    tracks_ = std::move(survivors);
  }
  stats.track_us = elapsed_us(t0);
  stats.tracks_surviving = static_cast<int>(tracks_.size());

  // Trigger rule: live < ratio * target. The small slack absorbs the
  // representation error of ratio * target without changing the integer
  // threshold.
  const int threshold = static_cast<int>(
      std::ceil(cfg_.redetect_ratio * cfg_.target_count - 1e-9));
  stats.redetect_fired = stats.tracks_surviving < threshold;

  if (stats.redetect_fired) {
    t0 = Clock::now();
    const std::vector<ResponseMap> responses =
        detect_responses(pyramid, cfg_.fast, lut_, cfg_.threads);
    stats.crf_us = elapsed_us(t0);

    t0 = Clock::now();
    FeatureGrid grid = suppress_and_select(responses, cfg_.grid, cfg_.threads,
                                           &stats.nms);
    stats.nms_us = elapsed_us(t0);

    if (with_conformance) {
      result.conformance =
          oracle::conformance_check(pyramid, grid, cfg_.fast, cfg_.grid);
    }

    // Keep at most one live track per cell (oldest id wins), then fill the
    // remaining cells with the strongest new detections.
    std::unordered_set<std::int64_t> occupied;
    std::vector<Track> deduped;
    deduped.reserve(tracks_.size());
    for (Track& track : tracks_) {
      const auto [cx, cy] = cell_of(track.birth.x + track.warp.tx,
                                    track.birth.y + track.warp.ty);
      const std::int64_t key = static_cast<std::int64_t>(cy) * grid.cols + cx;
      if (occupied.insert(key).second) {
        deduped.push_back(std::move(track));
      } else {
        retired.push_back(TrackObservation{
            track.id, track.birth.x + track.warp.tx,
            track.birth.y + track.warp.ty, track.warp.alpha, track.warp.beta,
            TrackStatus::kConverged, false, track.birth_frame});
      }
    }
    tracks_ = std::move(deduped);

    std::vector<CellMax> candidates;
    for (int cy = 0; cy < grid.rows; ++cy) {
      for (int cx = 0; cx < grid.cols; ++cx) {
        const auto& cell = grid.at(cx, cy);
        if (!cell.has_value()) continue;
        const std::int64_t key = static_cast<std::int64_t>(cy) * grid.cols + cx;
        if (occupied.count(key) != 0) continue;
        candidates.push_back(*cell);
      }
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const CellMax& a, const CellMax& b) {
                return cell_candidate_wins(a, b);
              });

    for (const CellMax& cand : candidates) {
      if (static_cast<int>(tracks_.size()) >= cfg_.target_count) break;
      FeatureTemplates templates = build_template(pyramid, cand, cfg_.tracker);
      if (!templates.ok()) continue;
      Track track;
      track.id = next_id_++;
      track.birth = cand;
      track.templates = std::move(templates);
      track.birth_frame = frame_index_;
      track.last_frame = frame_index_;
      tracks_.push_back(std::move(track));
      ++stats.tracks_spawned;
    }
    std::sort(tracks_.begin(), tracks_.end(),
              [](const Track& a, const Track& b) { return a.id < b.id; });
  }

  stats.feature_count = static_cast<int>(tracks_.size());

  result.tracks.reserve(tracks_.size() + retired.size());
  for (const Track& track : tracks_) {
    result.tracks.push_back(TrackObservation{
        track.id, track.birth.x + track.warp.tx, track.birth.y + track.warp.ty,
        track.warp.alpha, track.warp.beta, TrackStatus::kConverged, true,
        track.birth_frame});
  }
  result.tracks.insert(result.tracks.end(), retired.begin(), retired.end());
  std::sort(result.tracks.begin(), result.tracks.end(),
            [](const TrackObservation& a, const TrackObservation& b) {
              return a.id < b.id;
            });

  ++frame_index_;
  return result;
}

}  // namespace fastlk
