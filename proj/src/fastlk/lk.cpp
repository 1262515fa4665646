// Copyright 2026 The fastlk Authors
// SPDX-License-Identifier: Apache-2.0

#include "fastlk/lk.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fastlk/error.hpp"
#include "fastlk/parallel.hpp"

namespace fastlk {

const char* to_string(TrackStatus status) {
  switch (status) {
    case TrackStatus::kConverged: return "CONVERGED";
    case TrackStatus::kDiverged: return "DIVERGED";
    case TrackStatus::kOutOfBounds: return "OUT_OF_BOUNDS";
    case TrackStatus::kSingularHessian: return "SINGULAR_HESSIAN";
    case TrackStatus::kMaxIterations: return "MAX_ITERATIONS";
  }
  return "UNKNOWN";
}

const char* to_string(ParamMode mode) {
  switch (mode) {
    case ParamMode::kTranslation: return "translation";
    case ParamMode::kTranslationOffset: return "translation_offset";
    case ParamMode::kTranslationGain: return "translation_gain";
    case ParamMode::kFull: return "full";
  }
  return "unknown";
}

void validate(const TrackerConfig& cfg) {
  if (cfg.max_iterations < 1) {
    throw InvalidArgument("tracker needs at least one iteration per level");
  }
  if (!(cfg.convergence_epsilon > 0.0)) {
    throw InvalidArgument("convergence epsilon must be positive");
  }
  if (!(cfg.min_determinant_factor > 0.0)) {
    throw InvalidArgument("determinant factor must be positive");
  }
}

int param_dims(ParamMode mode) {
  switch (mode) {
    case ParamMode::kTranslation: return 2;
    case ParamMode::kTranslationOffset: return 3;
    case ParamMode::kTranslationGain: return 3;
    case ParamMode::kFull: return 4;
  }
  return 0;
}

bool has_gain(ParamMode mode) {
  return mode == ParamMode::kTranslationGain || mode == ParamMode::kFull;
}

bool has_offset(ParamMode mode) {
  return mode == ParamMode::kTranslationOffset || mode == ParamMode::kFull;
}

int TrackResult::total_iterations() const {
  int total = 0;
  for (const LevelTrace& trace : levels) total += trace.iterations;
  return total;
}

namespace {

// Determinant of an n x n matrix (n <= 4) by LU elimination with partial
// pivoting.
double det_small(std::array<double, 16> m, int n) {
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int row = col + 1; row < n; ++row) {
      if (std::abs(m[static_cast<std::size_t>(row * n + col)]) >
          std::abs(m[static_cast<std::size_t>(pivot * n + col)])) {
        pivot = row;
      }
    }
    const double p = m[static_cast<std::size_t>(pivot * n + col)];
    if (p == 0.0) return 0.0;
    if (pivot != col) {
      for (int k = 0; k < n; ++k) {
        std::swap(m[static_cast<std::size_t>(col * n + k)],
                  m[static_cast<std::size_t>(pivot * n + k)]);
      }
      det = -det;
    }
    det *= p;
    for (int row = col + 1; row < n; ++row) {
      const double f = m[static_cast<std::size_t>(row * n + col)] / p;
      for (int k = col; k < n; ++k) {
        m[static_cast<std::size_t>(row * n + k)] -=
            f * m[static_cast<std::size_t>(col * n + k)];
      }
    }
  }
  return det;
}

// Gauss-Jordan inverse with partial pivoting; false on a vanishing pivot.
bool invert_small(std::array<double, 16> m, int n, std::array<double, 16>* out) {
  std::array<double, 16> inv{};
  for (int i = 0; i < n; ++i) inv[static_cast<std::size_t>(i * n + i)] = 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int row = col + 1; row < n; ++row) {
      if (std::abs(m[static_cast<std::size_t>(row * n + col)]) >
          std::abs(m[static_cast<std::size_t>(pivot * n + col)])) {
        pivot = row;
      }
    }
    const double p = m[static_cast<std::size_t>(pivot * n + col)];
    if (p == 0.0) return false;
    if (pivot != col) {
      for (int k = 0; k < n; ++k) {
        std::swap(m[static_cast<std::size_t>(col * n + k)],
                  m[static_cast<std::size_t>(pivot * n + k)]);
        std::swap(inv[static_cast<std::size_t>(col * n + k)],
                  inv[static_cast<std::size_t>(pivot * n + k)]);
      }
    }
    const double scale = 1.0 / p;
    for (int k = 0; k < n; ++k) {
      m[static_cast<std::size_t>(col * n + k)] *= scale;
      inv[static_cast<std::size_t>(col * n + k)] *= scale;
    }
    for (int row = 0; row < n; ++row) {
      if (row == col) continue;
      const double f = m[static_cast<std::size_t>(row * n + col)];
      if (f == 0.0) continue;
      for (int k = 0; k < n; ++k) {
        m[static_cast<std::size_t>(row * n + k)] -=
            f * m[static_cast<std::size_t>(col * n + k)];
        inv[static_cast<std::size_t>(row * n + k)] -=
            f * inv[static_cast<std::size_t>(col * n + k)];
      }
    }
  }
  *out = inv;
  return true;
}

}  // namespace

FeatureTemplates build_template(const ImagePyramid& pyr, const CellMax& feature,
                                const TrackerConfig& cfg) {
  validate(cfg);
  FeatureTemplates out;
  for (int k = 0; k < pyr.num_levels(); ++k) {
    const Image& img = pyr.level(k);
    const int patch = cfg.patch_size(k);
    if (img.width < patch + 2 || img.height < patch + 2) {
      continue;  // level too small for this patch size anywhere
    }
    const int half = patch / 2;
    const double ax = feature.x / static_cast<double>(1 << k);
    const double ay = feature.y / static_cast<double>(1 << k);
    // Offsets run from -half to half-1; gradients need one more pixel.
    if (ax - half - 1 < 0.0 || ax + half > img.width - 1 ||
        ay - half - 1 < 0.0 || ay + half > img.height - 1) {
      out.error = TemplateError::kOutOfBounds;
      out.levels.clear();
      return out;
    }

    PatchTemplate tpl;
    tpl.level = k;
    tpl.patch = patch;
    tpl.anchor_x = ax;
    tpl.anchor_y = ay;
    tpl.dims = param_dims(cfg.mode);
    const int npx = patch * patch;
    tpl.values.resize(static_cast<std::size_t>(npx));
    tpl.grad_x.resize(static_cast<std::size_t>(npx));
    tpl.grad_y.resize(static_cast<std::size_t>(npx));
    tpl.coeffs.resize(static_cast<std::size_t>(npx) * tpl.dims);

    std::array<double, 16> hessian{};
    std::size_t idx = 0;
    for (int oy = -half; oy < half; ++oy) {
      for (int ox = -half; ox < half; ++ox, ++idx) {
        const double px = ax + ox;
        const double py = ay + oy;
        const float value = sample_bilinear(img, px, py);
        const float gx =
            0.5f * (sample_bilinear(img, px + 1, py) - sample_bilinear(img, px - 1, py));
        const float gy =
            0.5f * (sample_bilinear(img, px, py + 1) - sample_bilinear(img, px, py - 1));
        tpl.values[idx] = value;
        tpl.grad_x[idx] = gx;
        tpl.grad_y[idx] = gy;

        double* u = &tpl.coeffs[idx * tpl.dims];
        u[0] = gx;
        u[1] = gy;
        int d = 2;
        if (has_gain(cfg.mode)) u[d++] = value;
        if (has_offset(cfg.mode)) u[d++] = 1.0;

        for (int r = 0; r < tpl.dims; ++r) {
          for (int c = 0; c < tpl.dims; ++c) {
            hessian[static_cast<std::size_t>(r * tpl.dims + c)] += u[r] * u[c];
          }
        }
      }
    }

    tpl.hessian_det = det_small(hessian, tpl.dims);
    const double area = static_cast<double>(npx);
    if (!(tpl.hessian_det >= cfg.min_determinant_factor * area * area)) {
      out.error = TemplateError::kSingularHessian;
      out.levels.clear();
      return out;
    }
    if (!invert_small(hessian, tpl.dims, &tpl.hessian_inv)) {
      out.error = TemplateError::kSingularHessian;
      out.levels.clear();
      return out;
    }
    out.levels.push_back(std::move(tpl));
  }
  if (out.levels.empty()) {
    out.error = TemplateError::kOutOfBounds;
  }
  return out;
}

TrackResult track_feature(const FeatureTemplates& templates,
                          const ImagePyramid& current, const WarpState& init,
                          const TrackerConfig& cfg) {
  validate(cfg);
  if (!templates.ok()) {
    throw InvalidArgument("cannot track a feature without valid templates");
  }
  if (!(std::isfinite(init.tx) && std::isfinite(init.ty) &&
        std::isfinite(init.alpha) && std::isfinite(init.beta))) {
    throw InvalidArgument("initial warp state must be finite");
  }

  TrackResult result;
  double tx0 = init.tx;
  double ty0 = init.ty;
  double gain = init.alpha;
  double offset = init.beta;
  bool aborted = false;
  bool finest_converged = false;

  for (auto it = templates.levels.rbegin(); it != templates.levels.rend(); ++it) {
    const PatchTemplate& tpl = *it;
    if (tpl.level >= current.num_levels()) {
      throw InvalidArgument("template level " + std::to_string(tpl.level) +
                            " missing from the current pyramid");
    }
    const Image& img = current.level(tpl.level);
    const double scale = static_cast<double>(1 << tpl.level);
    double tx = tx0 / scale;
    double ty = ty0 / scale;
    const int half = tpl.patch / 2;
    const int npx = tpl.patch * tpl.patch;
    const double max_step = 0.5 * std::hypot(img.width, img.height);

    LevelTrace trace;
    trace.level = tpl.level;
    trace.entry_tx = tx0;
    trace.entry_ty = ty0;
    bool level_converged = false;

    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
      // The whole warped patch must stay sampleable.
      const double bx0 = tpl.anchor_x - half + tx;
      const double bx1 = tpl.anchor_x + half - 1 + tx;
      const double by0 = tpl.anchor_y - half + ty;
      const double by1 = tpl.anchor_y + half - 1 + ty;
      if (bx0 < 0.0 || by0 < 0.0 || bx1 > img.width - 1 || by1 > img.height - 1) {
        result.status = TrackStatus::kOutOfBounds;
        aborted = true;
        break;
      }

      std::array<double, kMaxWarpParams> rhs{};
      double abs_error = 0.0;
      std::size_t idx = 0;
      for (int oy = -half; oy < half; ++oy) {
        for (int ox = -half; ox < half; ++ox, ++idx) {
          const double sample =
              sample_bilinear(img, tpl.anchor_x + ox + tx, tpl.anchor_y + oy + ty);
          const double r = sample - (1.0 + gain) * tpl.values[idx] - offset;
          abs_error += std::abs(r);
          const double* u = &tpl.coeffs[idx * tpl.dims];
          for (int d = 0; d < tpl.dims; ++d) rhs[static_cast<std::size_t>(d)] += u[d] * r;
        }
      }
      result.residual = abs_error / npx;

      std::array<double, kMaxWarpParams> delta{};
      for (int r = 0; r < tpl.dims; ++r) {
        double acc = 0.0;
        for (int c = 0; c < tpl.dims; ++c) {
          acc += tpl.hessian_inv[static_cast<std::size_t>(r * tpl.dims + c)] *
                 rhs[static_cast<std::size_t>(c)];
        }
        delta[static_cast<std::size_t>(r)] = acc;
      }

      ++trace.iterations;
      tx -= delta[0];
      ty -= delta[1];
      int d = 2;
      if (has_gain(cfg.mode)) gain += delta[static_cast<std::size_t>(d++)];
      if (has_offset(cfg.mode)) offset += delta[static_cast<std::size_t>(d++)];

      const double step = std::hypot(delta[0], delta[1]);
      if (step > max_step || !(gain > -1.0) || !std::isfinite(step)) {
        result.status = TrackStatus::kDiverged;
        aborted = true;
        break;
      }
      if (step <= cfg.convergence_epsilon) {
        level_converged = true;
        break;
      }
    }

    tx0 = tx * scale;
    ty0 = ty * scale;
    trace.exit_tx = tx0;
    trace.exit_ty = ty0;
    result.levels.push_back(trace);
    if (aborted) break;
    if (tpl.level == templates.levels.front().level) {
      finest_converged = level_converged;
    }
  }

  result.warp = WarpState{tx0, ty0, gain, offset};
  if (!aborted && !finest_converged) {
    result.status = TrackStatus::kMaxIterations;
  }
  return result;
}

std::vector<TrackResult> track_all(const std::vector<TrackItem>& items,
                                   const ImagePyramid& current,
                                   const TrackerConfig& cfg, int threads) {
  validate(cfg);
  // Preconditions are checked up front; workers must not throw.
  for (const TrackItem& item : items) {
    if (item.templates == nullptr || !item.templates->ok()) {
      throw InvalidArgument("batch contains a feature without valid templates");
    }
    if (item.templates->levels.back().level >= current.num_levels()) {
      throw InvalidArgument("batch templates reference a missing pyramid level");
    }
    if (!(std::isfinite(item.init.tx) && std::isfinite(item.init.ty) &&
          std::isfinite(item.init.alpha) && std::isfinite(item.init.beta))) {
      throw InvalidArgument("batch contains a non-finite initial warp state");
    }
  }
  std::vector<TrackResult> results(items.size());
  parallel_chunks(static_cast<int>(items.size()), threads,
                  [&](int, int begin, int end) {
                    for (int i = begin; i < end; ++i) {
                      const TrackItem& item = items[static_cast<std::size_t>(i)];
                      results[static_cast<std::size_t>(i)] =
                          track_feature(*item.templates, current, item.init, cfg);
                    }
                  });
  return results;
}

}  // namespace fastlk
