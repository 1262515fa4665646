// Copyright 2026 The fastlk Authors
// SPDX-License-Identifier: Apache-2.0
//
// extern-C shim over the C++ core: opaque handles own core objects, all
// exceptions are mapped to status codes with a thread-local message.

#include "fastlk/fastlk.h"

#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "fastlk/config.hpp"
#include "fastlk/error.hpp"
#include "fastlk/frontend.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const char* msg) { g_last_error = msg == nullptr ? "" : msg; }

flk_status fail(flk_status code, const char* msg) {
  set_error(msg);
  return code;
}

template <typename Fn>
flk_status guarded(Fn&& fn) {
  try {
    set_error("");
    return fn();
  } catch (const fastlk::IoError& e) {
    return fail(FLK_E_IO, e.what());
  } catch (const fastlk::DimensionMismatch& e) {
    return fail(FLK_E_DIMENSION, e.what());
  } catch (const fastlk::ConfigError& e) {
    return fail(FLK_E_CONFIG, e.what());
  } catch (const fastlk::InvalidArgument& e) {
    return fail(FLK_E_INVALID_ARG, e.what());
  } catch (const std::bad_alloc&) {
    return fail(FLK_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FLK_E_INTERNAL, e.what());
  }
}

void fill_stats(const fastlk::FrameStats& src, flk_frame_stats* dst) {
  if (dst == nullptr) return;
  dst->pyramid_us = src.pyramid_us;
  dst->crf_us = src.crf_us;
  dst->nms_us = src.nms_us;
  dst->track_us = src.track_us;
  dst->nms_comparisons = src.nms.comparisons;
  dst->nms_candidates = src.nms.candidates;
  dst->feature_count = src.feature_count;
  dst->tracks_entering = src.tracks_entering;
  dst->tracks_surviving = src.tracks_surviving;
  dst->tracks_spawned = src.tracks_spawned;
  dst->redetect_fired = src.redetect_fired ? 1 : 0;
  dst->track_iterations = src.track_iterations;
}

void fill_conformance(const fastlk::oracle::Conformance& src,
                      flk_conformance* dst) {
  dst->matched = src.matched;
  dst->subset_only = src.subset_only;
  dst->false_positives = src.false_positives;
}

// The C enum mirrors the core enum value for value.
static_assert(FLK_TRACK_CONVERGED ==
              static_cast<int>(fastlk::TrackStatus::kConverged));
static_assert(FLK_TRACK_DIVERGED ==
              static_cast<int>(fastlk::TrackStatus::kDiverged));
static_assert(FLK_TRACK_OUT_OF_BOUNDS ==
              static_cast<int>(fastlk::TrackStatus::kOutOfBounds));
static_assert(FLK_TRACK_SINGULAR_HESSIAN ==
              static_cast<int>(fastlk::TrackStatus::kSingularHessian));
static_assert(FLK_TRACK_MAX_ITERATIONS ==
              static_cast<int>(fastlk::TrackStatus::kMaxIterations));

}  // namespace

struct flk_image {
  fastlk::Image img;
};

struct flk_config {
  fastlk::FrontendConfig cfg;
};

struct flk_detector {
  fastlk::FrontendConfig cfg;
  fastlk::LookupTable lut;
  int first_width = 0;
  int first_height = 0;
};

struct flk_features {
  std::vector<flk_feature> items;
};

struct flk_session {
  std::unique_ptr<fastlk::Frontend> frontend;
};

struct flk_tracks {
  std::vector<flk_track_info> items;
};

extern "C" {

const char* flk_status_name(flk_status status) {
  switch (status) {
    case FLK_OK: return "ok";
    case FLK_E_INVALID_ARG: return "invalid argument";
    case FLK_E_IO: return "io error";
    case FLK_E_DIMENSION: return "dimension mismatch";
    case FLK_E_CONFIG: return "configuration error";
    case FLK_E_INTERNAL: return "internal error";
  }
  return "unknown";
}

const char* flk_last_error(void) { return g_last_error.c_str(); }

const char* flk_version_string(void) { return "0.1.0"; }

/* ---------------------------------------------------------------- images */

flk_status flk_image_create(int width, int height, const uint8_t* pixels,
                            flk_image** out) {
  if (pixels == nullptr || out == nullptr) {
    return fail(FLK_E_INVALID_ARG, "pixels and out must not be NULL");
  }
  return guarded([&] {
    auto handle = std::make_unique<flk_image>();
    handle->img = fastlk::Image::allocate(width, height);
    for (int y = 0; y < height; ++y) {
      std::memcpy(&handle->img.data[static_cast<std::size_t>(y) * handle->img.stride],
                  pixels + static_cast<std::size_t>(y) * width, width);
    }
    *out = handle.release();
    return FLK_OK;
  });
}

flk_status flk_image_load_pgm(const char* path, flk_image** out) {
  if (path == nullptr || out == nullptr) {
    return fail(FLK_E_INVALID_ARG, "path and out must not be NULL");
  }
  return guarded([&] {
    auto handle = std::make_unique<flk_image>();
    handle->img = fastlk::load_pgm(path);
    *out = handle.release();
    return FLK_OK;
  });
}

flk_status flk_image_save_pgm(const flk_image* image, const char* path) {
  if (image == nullptr || path == nullptr) {
    return fail(FLK_E_INVALID_ARG, "image and path must not be NULL");
  }
  return guarded([&] {
    fastlk::save_pgm(image->img, path);
    return FLK_OK;
  });
}

int flk_image_width(const flk_image* image) {
  return image == nullptr ? 0 : image->img.width;
}

int flk_image_height(const flk_image* image) {
  return image == nullptr ? 0 : image->img.height;
}

void flk_image_destroy(flk_image* image) { delete image; }

/* ----------------------------------------------------------------- config */

flk_status flk_config_create(flk_config** out) {
  if (out == nullptr) return fail(FLK_E_INVALID_ARG, "out must not be NULL");
  return guarded([&] {
    *out = new flk_config();
    return FLK_OK;
  });
}

flk_status flk_config_load_file(flk_config* config, const char* path) {
  if (config == nullptr || path == nullptr) {
    return fail(FLK_E_INVALID_ARG, "config and path must not be NULL");
  }
  return guarded([&] {
    fastlk::load_config_file(&config->cfg, path);
    return FLK_OK;
  });
}

flk_status flk_config_set(flk_config* config, const char* key,
                          const char* value) {
  if (config == nullptr || key == nullptr || value == nullptr) {
    return fail(FLK_E_INVALID_ARG, "config, key, and value must not be NULL");
  }
  return guarded([&] {
    fastlk::apply_config_entry(&config->cfg, key, value);
    return FLK_OK;
  });
}

void flk_config_destroy(flk_config* config) { delete config; }

/* -------------------------------------------------------------- detection */

flk_status flk_detector_create(const flk_config* config, flk_detector** out) {
  if (config == nullptr || out == nullptr) {
    return fail(FLK_E_INVALID_ARG, "config and out must not be NULL");
  }
  return guarded([&] {
    fastlk::validate(config->cfg);
    auto handle = std::make_unique<flk_detector>();
    handle->cfg = config->cfg;
    handle->lut = fastlk::build_lookup_table(config->cfg.fast.arc_length);
    *out = handle.release();
    return FLK_OK;
  });
}

flk_status flk_detector_run(flk_detector* detector, const flk_image* image,
                            flk_features** out_features, flk_frame_stats* stats,
                            flk_conformance* conformance) {
  if (detector == nullptr || image == nullptr || out_features == nullptr) {
    return fail(FLK_E_INVALID_ARG,
                "detector, image, and out_features must not be NULL");
  }
  return guarded([&] {
    if (detector->first_width == 0) {
      detector->first_width = image->img.width;
      detector->first_height = image->img.height;
    } else if (image->img.width != detector->first_width ||
               image->img.height != detector->first_height) {
      throw fastlk::DimensionMismatch(
          "frame is " + std::to_string(image->img.width) + "x" +
          std::to_string(image->img.height) + ", detector expects " +
          std::to_string(detector->first_width) + "x" +
          std::to_string(detector->first_height));
    }
    fastlk::DetectRun run =
        fastlk::detect_frame(image->img, detector->cfg.fast, detector->lut,
                             detector->cfg.grid, detector->cfg.threads);
    if (conformance != nullptr) {
      fill_conformance(fastlk::oracle::conformance_check(
                           run.pyramid, run.grid, detector->cfg.fast,
                           detector->cfg.grid),
                       conformance);
    }
    auto features = std::make_unique<flk_features>();
    features->items.reserve(static_cast<std::size_t>(run.grid.feature_count()));
    for (int cy = 0; cy < run.grid.rows; ++cy) {
      for (int cx = 0; cx < run.grid.cols; ++cx) {
        const auto& cell = run.grid.at(cx, cy);
        if (!cell.has_value()) continue;
        features->items.push_back(
            flk_feature{cell->x, cell->y, cell->score, cell->level, cx, cy});
      }
    }
    fill_stats(run.stats, stats);
    *out_features = features.release();
    return FLK_OK;
  });
}

void flk_detector_destroy(flk_detector* detector) { delete detector; }

int flk_features_count(const flk_features* features) {
  return features == nullptr ? 0 : static_cast<int>(features->items.size());
}

flk_status flk_features_get(const flk_features* features, int index,
                            flk_feature* out) {
  if (features == nullptr || out == nullptr) {
    return fail(FLK_E_INVALID_ARG, "features and out must not be NULL");
  }
  if (index < 0 || index >= static_cast<int>(features->items.size())) {
    return fail(FLK_E_INVALID_ARG, "feature index out of range");
  }
  *out = features->items[static_cast<std::size_t>(index)];
  return FLK_OK;
}

void flk_features_destroy(flk_features* features) { delete features; }

/* --------------------------------------------------------------- tracking */

const char* flk_track_status_name(flk_track_status status) {
  return fastlk::to_string(static_cast<fastlk::TrackStatus>(status));
}

flk_status flk_session_create(const flk_config* config, flk_session** out) {
  if (config == nullptr || out == nullptr) {
    return fail(FLK_E_INVALID_ARG, "config and out must not be NULL");
  }
  return guarded([&] {
    auto handle = std::make_unique<flk_session>();
    handle->frontend = std::make_unique<fastlk::Frontend>(config->cfg);
    *out = handle.release();
    return FLK_OK;
  });
}

flk_status flk_session_process(flk_session* session, const flk_image* image,
                               flk_tracks** out_tracks, flk_frame_stats* stats,
                               flk_conformance* conformance) {
  if (session == nullptr || image == nullptr || out_tracks == nullptr) {
    return fail(FLK_E_INVALID_ARG,
                "session, image, and out_tracks must not be NULL");
  }
  return guarded([&] {
    fastlk::Frontend::FrameResult frame =
        session->frontend->process_frame(image->img, conformance != nullptr);
    auto tracks = std::make_unique<flk_tracks>();
    tracks->items.reserve(frame.tracks.size());
    for (const fastlk::TrackObservation& obs : frame.tracks) {
      tracks->items.push_back(flk_track_info{
          obs.id, obs.x, obs.y, obs.alpha, obs.beta,
          static_cast<int>(obs.status), obs.live ? 1 : 0, obs.birth_frame});
    }
    fill_stats(frame.stats, stats);
    if (conformance != nullptr) {
      if (frame.conformance.has_value()) {
        fill_conformance(*frame.conformance, conformance);
      } else {
        fill_conformance(fastlk::oracle::Conformance{}, conformance);
      }
    }
    *out_tracks = tracks.release();
    return FLK_OK;
  });
}

void flk_session_destroy(flk_session* session) { delete session; }

int flk_tracks_count(const flk_tracks* tracks) {
  return tracks == nullptr ? 0 : static_cast<int>(tracks->items.size());
}

flk_status flk_tracks_get(const flk_tracks* tracks, int index,
                          flk_track_info* out) {
  if (tracks == nullptr || out == nullptr) {
    return fail(FLK_E_INVALID_ARG, "tracks and out must not be NULL");
  }
  if (index < 0 || index >= static_cast<int>(tracks->items.size())) {
    return fail(FLK_E_INVALID_ARG, "track index out of range");
  }
  *out = tracks->items[static_cast<std::size_t>(index)];
  return FLK_OK;
}

void flk_tracks_destroy(flk_tracks* tracks) { delete tracks; }

}  // extern "C"
