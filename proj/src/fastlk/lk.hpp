// Copyright 2026 The fastlk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fastlk/image.hpp"
#include "fastlk/nms.hpp"

namespace fastlk {

/// Which warp parameters the minimization estimates. Translation is always
/// active; gain and offset model an affine intensity change of the patch.
enum class ParamMode { kTranslation, kTranslationOffset, kTranslationGain, kFull };

enum class TrackStatus {
  kConverged,
  kDiverged,
  kOutOfBounds,
  kSingularHessian,
  kMaxIterations,
};

const char* to_string(TrackStatus status);
const char* to_string(ParamMode mode);

/// Warp parameters q = [t_x, t_y, alpha, beta]: translation in full-resolution
/// pixels plus intensity gain increment alpha and offset beta, modelling the
/// current patch as (1 + alpha) * T + beta. Gain must keep 1 + alpha positive.
struct WarpState {
  double tx = 0.0;
  double ty = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

struct TrackerConfig {
  ParamMode mode = ParamMode::kFull;
  int max_iterations = 30;            // per level
  double convergence_epsilon = 0.01;  // translation update norm, px per level
  double min_determinant_factor = 1e-6;  // threshold = factor * (patch area)^2

  /// 16x16 patches on the two finest levels, 8x8 below.
  int patch_size(int level) const { return level <= 1 ? 16 : 8; }
};

void validate(const TrackerConfig& cfg);

inline constexpr int kMaxWarpParams = 4;

int param_dims(ParamMode mode);
bool has_gain(ParamMode mode);
bool has_offset(ParamMode mode);

// Per-level template: intensities T, their central-difference gradients, the
// per-pixel coefficient vector of the incremental parameters evaluated at the
// initial appearance estimate (gain increment 0), and the inverse Hessian of
// the active-parameter block. All of it is fixed at build time so tracking
// iterations only resample the current image.
struct PatchTemplate {
  int level = 0;
  int patch = 0;                      // square side in level pixels
  double anchor_x = 0.0;              // level coordinates of the feature
  double anchor_y = 0.0;
  int dims = 0;                       // active parameter count
  std::vector<float> values;          // T, row-major patch
  std::vector<float> grad_x;
  std::vector<float> grad_y;
  std::vector<double> coeffs;         // dims entries per pixel
  std::array<double, kMaxWarpParams * kMaxWarpParams> hessian_inv{};
  double hessian_det = 0.0;
};

enum class TemplateError { kNone, kOutOfBounds, kSingularHessian };

struct FeatureTemplates {
  TemplateError error = TemplateError::kNone;
  std::vector<PatchTemplate> levels;  // ascending level order

  bool ok() const { return error == TemplateError::kNone && !levels.empty(); }
};

/// Samples per-level templates around the feature. Levels too small for their
/// patch are skipped; a patch (plus its one-pixel gradient margin) leaving a
/// usable level fails with kOutOfBounds, a textureless patch with
/// kSingularHessian.
FeatureTemplates build_template(const ImagePyramid& pyr, const CellMax& feature,
                                const TrackerConfig& cfg);

struct LevelTrace {
  int level = 0;
  int iterations = 0;
  // Translation state in full-resolution pixels when the level was entered
  // and left.
  double entry_tx = 0.0;
  double entry_ty = 0.0;
  double exit_tx = 0.0;
  double exit_ty = 0.0;
};

struct TrackResult {
  TrackStatus status = TrackStatus::kConverged;
  WarpState warp;
  std::vector<LevelTrace> levels;  // coarse-to-fine execution order
  double residual = 0.0;           // mean absolute photometric error at exit

  int total_iterations() const;
};

/// Coarse-to-fine minimization of the photometric error. Translation updates
/// compose inversely (t <- t - dt), gain and offset update additively; a level
/// ends when the translation update norm drops to convergence_epsilon or the
/// iteration budget runs out. Translation is rescaled by 2 when descending.
TrackResult track_feature(const FeatureTemplates& templates,
                          const ImagePyramid& current, const WarpState& init,
                          const TrackerConfig& cfg);

struct TrackItem {
  const FeatureTemplates* templates = nullptr;
  WarpState init;
};

/// track_feature over a batch, order preserving. Per-feature sums use a fixed
/// order, so results are bit-identical for any thread count.
std::vector<TrackResult> track_all(const std::vector<TrackItem>& items,
                                   const ImagePyramid& current,
                                   const TrackerConfig& cfg, int threads = 1);

}  // namespace fastlk
