/* Copyright 2026 The fastlk Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * fastlk public C API.
 *
 * Sparse feature detection and tracking: FAST corners decided through a
 * bit-packed 8 KB segment-test table, fused Moore-neighborhood suppression
 * and grid-cell selection (at most one feature per cell), and a pyramidal
 * inverse-compositional Lucas-Kanade tracker with affine illumination
 * estimation.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Functions return FLK_OK on success; on failure they return an error code
 * and leave a human-readable message in flk_last_error() (thread local).
 * Handles are not synchronized: share them across threads only for const
 * use. Internal parallelism is controlled by the "threads" configuration
 * key and always produces bit-identical results for any thread count.
 */

#ifndef FASTLK_FASTLK_H_
#define FASTLK_FASTLK_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FLK_API __declspec(dllexport)
#else
#define FLK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* ---------------------------------------------------------------- status */

typedef enum flk_status {
  FLK_OK = 0,
  FLK_E_INVALID_ARG = 1, /* bad parameter or precondition violation */
  FLK_E_IO = 2,          /* file missing, unreadable, or malformed */
  FLK_E_DIMENSION = 3,   /* frame size does not match the session */
  FLK_E_CONFIG = 4,      /* invalid or inconsistent configuration */
  FLK_E_INTERNAL = 5
} flk_status;

FLK_API const char* flk_status_name(flk_status status);

/* Message describing the most recent failure on this thread ("" if none). */
FLK_API const char* flk_last_error(void);

FLK_API const char* flk_version_string(void);

/* ---------------------------------------------------------------- images */

typedef struct flk_image flk_image;

/* Copies w*h 8-bit pixels (row-major, tightly packed). */
FLK_API flk_status flk_image_create(int width, int height,
                                    const uint8_t* pixels, flk_image** out);

/* Reads a binary PGM (P5) file with maxval 255. */
FLK_API flk_status flk_image_load_pgm(const char* path, flk_image** out);

FLK_API flk_status flk_image_save_pgm(const flk_image* image, const char* path);

FLK_API int flk_image_width(const flk_image* image);
FLK_API int flk_image_height(const flk_image* image);

FLK_API void flk_image_destroy(flk_image* image);

/* ----------------------------------------------------------------- config */

typedef struct flk_config flk_config;

/* Defaults: epsilon=10, N=10, score_kind=sad_b, l=1, w=1, h=32, n=1,
 * target_count=100, redetect_ratio=0.3, param_mode=full, max_iterations=30,
 * convergence_epsilon=0.01, threads=0 (hardware default). */
FLK_API flk_status flk_config_create(flk_config** out);

/* Applies a flat "key = value" file on top of the current values. */
FLK_API flk_status flk_config_load_file(flk_config* config, const char* path);

/* Sets one key to a textual value, e.g. ("epsilon", "12"). */
FLK_API flk_status flk_config_set(flk_config* config, const char* key,
                                  const char* value);

FLK_API void flk_config_destroy(flk_config* config);

/* -------------------------------------------------------------- detection */

typedef struct flk_detector flk_detector;
typedef struct flk_features flk_features;

typedef struct flk_feature {
  int x;       /* full-resolution pixel coordinates */
  int y;
  float score;
  int level;   /* pyramid level of origin */
  int cell_x;  /* grid cell indices */
  int cell_y;
} flk_feature;

/* Stage timings in microseconds plus per-frame counters. Timings exclude
 * file I/O. Counter fields are deterministic; timings are wall clock. */
typedef struct flk_frame_stats {
  double pyramid_us;
  double crf_us;
  double nms_us;
  double track_us;
  uint64_t nms_comparisons; /* neighbor comparisons during suppression */
  uint64_t nms_candidates;  /* positive-response pixels examined */
  int feature_count;        /* emitted features / live tracks */
  int tracks_entering;
  int tracks_surviving;
  int tracks_spawned;
  int redetect_fired;       /* 0 or 1 */
  int track_iterations;     /* summed minimization iterations */
} flk_frame_stats;

/* Detection conformance against the naive per-pixel reference detector. */
typedef struct flk_conformance {
  int matched;         /* emitted features present in the reference output */
  int subset_only;     /* reference survivors the pipeline did not emit */
  int false_positives; /* emitted features the reference rejects (expect 0) */
} flk_conformance;

FLK_API flk_status flk_detector_create(const flk_config* config,
                                       flk_detector** out);

/* Runs pyramid construction, corner responses, and fused grid suppression on
 * one frame. stats and conformance may be NULL; a non-NULL conformance also
 * runs the (slow) naive reference detector. */
FLK_API flk_status flk_detector_run(flk_detector* detector,
                                    const flk_image* image,
                                    flk_features** out_features,
                                    flk_frame_stats* stats,
                                    flk_conformance* conformance);

FLK_API void flk_detector_destroy(flk_detector* detector);

FLK_API int flk_features_count(const flk_features* features);
FLK_API flk_status flk_features_get(const flk_features* features, int index,
                                    flk_feature* out);
FLK_API void flk_features_destroy(flk_features* features);

/* --------------------------------------------------------------- tracking */

typedef struct flk_session flk_session;
typedef struct flk_tracks flk_tracks;

typedef enum flk_track_status {
  FLK_TRACK_CONVERGED = 0,
  FLK_TRACK_DIVERGED = 1,
  FLK_TRACK_OUT_OF_BOUNDS = 2,
  FLK_TRACK_SINGULAR_HESSIAN = 3,
  FLK_TRACK_MAX_ITERATIONS = 4
} flk_track_status;

FLK_API const char* flk_track_status_name(flk_track_status status);

typedef struct flk_track_info {
  int64_t id;
  double x; /* current full-resolution position */
  double y;
  double alpha; /* intensity gain increment */
  double beta;  /* intensity offset */
  int status;   /* flk_track_status */
  int live;     /* 1 while tracked; 0 on the frame the track retires (any
                 * non-CONVERGED status, or a CONVERGED track dropped when
                 * re-detection thins a multiply-occupied cell) */
  int birth_frame;
} flk_track_info;

FLK_API flk_status flk_session_create(const flk_config* config,
                                      flk_session** out);

/* Advances the session by one frame. The returned snapshot holds live tracks
 * plus tracks retired on this frame, ordered by id. stats and conformance may
 * be NULL; conformance is filled only on frames where re-detection ran. */
FLK_API flk_status flk_session_process(flk_session* session,
                                       const flk_image* image,
                                       flk_tracks** out_tracks,
                                       flk_frame_stats* stats,
                                       flk_conformance* conformance);

FLK_API void flk_session_destroy(flk_session* session);

FLK_API int flk_tracks_count(const flk_tracks* tracks);
FLK_API flk_status flk_tracks_get(const flk_tracks* tracks, int index,
                                  flk_track_info* out);
FLK_API void flk_tracks_destroy(flk_tracks* tracks);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FASTLK_FASTLK_H_ */
