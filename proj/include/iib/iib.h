// Copyright 2026 The IIB Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/*
 * C interface to the IIB descriptor library. All objects are opaque
 * handles released with their matching *_free function. Every fallible
 * call returns an iib_status; the message of the last failure on the
 * calling thread is available from iib_last_error_message().
 */
#ifndef IIB_IIB_H_
#define IIB_IIB_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define IIB_API __declspec(dllexport)
#else
#define IIB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum iib_status {
  IIB_OK = 0,
  IIB_ERR_INVALID_ARGUMENT = 1,
  IIB_ERR_OUT_OF_BOUNDS = 2,
  IIB_ERR_IO = 3,
  IIB_ERR_FORMAT = 4,
  IIB_ERR_FINGERPRINT_MISMATCH = 5,
  IIB_ERR_INSUFFICIENT_DATA = 6,
  IIB_ERR_INTERNAL = 7
} iib_status;

IIB_API const char* iib_status_name(iib_status status);
/* Empty string when the last call on this thread succeeded. */
IIB_API const char* iib_last_error_message(void);
IIB_API const char* iib_version(void);
/* Version of the IIBD descriptor container. */
IIB_API uint32_t iib_format_version(void);

/* ---- images ------------------------------------------------------------ */

typedef struct iib_image iib_image;

IIB_API iib_status iib_image_load(const char* path, iib_image** out);
/* Copies width * height row-major values. */
IIB_API iib_status iib_image_create(int width, int height,
                                    const double* pixels, iib_image** out);
IIB_API iib_status iib_image_save_pgm(const iib_image* image,
                                      const char* path);
IIB_API int iib_image_width(const iib_image* image);
IIB_API int iib_image_height(const iib_image* image);
IIB_API const double* iib_image_pixels(const iib_image* image);
IIB_API void iib_image_free(iib_image* image);

/* ---- configuration ----------------------------------------------------- */

typedef struct iib_config iib_config;

/* Defaults: granularity 4, mean mapping, no overlap, channels gx,gy,go,gi,
 * radius 32, upright. */
IIB_API iib_status iib_config_create(iib_config** out);
IIB_API iib_status iib_config_set_granularity(iib_config* config, int g);
/* "mean", "max", "min", "quartile" or "sort". */
IIB_API iib_status iib_config_set_mapping(iib_config* config,
                                          const char* mapping);
IIB_API iib_status iib_config_set_overlap(iib_config* config, int overlap);
/* Comma-separated channel names in descriptor order. */
IIB_API iib_status iib_config_set_channels(iib_config* config,
                                           const char* channels);
IIB_API iib_status iib_config_set_radius(iib_config* config, double radius);
IIB_API iib_status iib_config_set_rotation(iib_config* config, int enabled);
IIB_API iib_status iib_config_descriptor_size(const iib_config* config,
                                              size_t* bits);
/* Human-readable fingerprint; owned by the config. */
IIB_API const char* iib_config_fingerprint(const iib_config* config);
IIB_API void iib_config_free(iib_config* config);

/* ---- channels ---------------------------------------------------------- */

typedef struct iib_channels iib_channels;

/* Default channels of `image` plus `extra_count` named extra channels. */
IIB_API iib_status iib_channels_compute(const iib_image* image,
                                        const char* const* extra_names,
                                        const iib_image* const* extras,
                                        size_t extra_count,
                                        iib_channels** out);
IIB_API size_t iib_channels_count(const iib_channels* channels);
IIB_API void iib_channels_free(iib_channels* channels);

/* ---- keypoints --------------------------------------------------------- */

typedef struct iib_keypoints iib_keypoints;

IIB_API iib_status iib_keypoints_create(iib_keypoints** out);
IIB_API iib_status iib_keypoints_add(iib_keypoints* kps, double x, double y,
                                     double radius, int has_angle,
                                     double angle);
/* CSV "x,y,radius,angle_rad"; empty radius takes default_radius. */
IIB_API iib_status iib_keypoints_load(const char* path, double default_radius,
                                      iib_keypoints** out);
IIB_API iib_status iib_keypoints_save(const iib_keypoints* kps,
                                      const char* path);
/* cols x rows interior grid whose ROS fit in a width x height image. */
IIB_API iib_status iib_keypoints_grid(int width, int height, int cols,
                                      int rows, double radius,
                                      iib_keypoints** out);
IIB_API size_t iib_keypoints_count(const iib_keypoints* kps);
IIB_API iib_status iib_keypoints_get(const iib_keypoints* kps, size_t index,
                                     double* x, double* y, double* radius,
                                     int* has_angle, double* angle);
IIB_API void iib_keypoints_free(iib_keypoints* kps);

/* ---- descriptors ------------------------------------------------------- */

typedef struct iib_descriptor_set iib_descriptor_set;
typedef struct iib_mask iib_mask;

/* Extracts one descriptor per in-bounds keypoint. `mask` may be NULL; when
 * given, its source fingerprint must equal the config fingerprint and the
 * output holds reduced descriptors. workers <= 0 uses all cores. */
IIB_API iib_status iib_extract(const iib_channels* channels,
                               const iib_keypoints* kps,
                               const iib_config* config, const iib_mask* mask,
                               int workers, iib_descriptor_set** out);
IIB_API size_t iib_descriptor_set_count(const iib_descriptor_set* set);
IIB_API size_t iib_descriptor_set_bits(const iib_descriptor_set* set);
IIB_API const char* iib_descriptor_set_fingerprint(
    const iib_descriptor_set* set);
/* Writes ceil(bits / 8) bytes, bit 0 in the low bit of byte 0. */
IIB_API iib_status iib_descriptor_set_get_bytes(const iib_descriptor_set* set,
                                                size_t index, uint8_t* buffer,
                                                size_t capacity);
IIB_API iib_status iib_descriptor_set_keypoint(const iib_descriptor_set* set,
                                               size_t index, double* x,
                                               double* y, double* radius,
                                               uint32_t* source_index);
/* Keypoints rejected by the last extraction; reason is a static string. */
IIB_API size_t iib_descriptor_set_skipped_count(const iib_descriptor_set* set);
IIB_API iib_status iib_descriptor_set_skipped(const iib_descriptor_set* set,
                                              size_t index,
                                              uint32_t* source_index,
                                              const char** reason);
IIB_API iib_status iib_descriptor_set_save(const iib_descriptor_set* set,
                                           const char* path);
IIB_API iib_status iib_descriptor_set_load(const char* path,
                                           iib_descriptor_set** out);
IIB_API iib_status iib_hamming(const iib_descriptor_set* a, size_t ia,
                               const iib_descriptor_set* b, size_t ib,
                               size_t* distance);
IIB_API void iib_descriptor_set_free(iib_descriptor_set* set);

/* ---- matching ---------------------------------------------------------- */

typedef enum iib_match_mode {
  IIB_MATCH_BRUTE = 0,
  IIB_MATCH_HIERARCHICAL = 1
} iib_match_mode;

typedef struct iib_matches iib_matches;

/* Mutual nearest neighbours. `threshold` is the per-granularity pruning
 * fraction in (0, 1] and is ignored by brute force. */
IIB_API iib_status iib_match(const iib_descriptor_set* query,
                             const iib_descriptor_set* train,
                             iib_match_mode mode, double threshold,
                             int workers, iib_matches** out);
IIB_API size_t iib_matches_count(const iib_matches* matches);
IIB_API iib_status iib_matches_get(const iib_matches* matches, size_t index,
                                   uint32_t* query, uint32_t* train,
                                   uint32_t* distance);
/* Match cost = hierarchical / brute-force bit comparisons. */
IIB_API double iib_matches_cost(const iib_matches* matches,
                                uint64_t* hierarchical_bits,
                                uint64_t* bruteforce_bits);
IIB_API void iib_matches_free(iib_matches* matches);

/* ---- evaluation -------------------------------------------------------- */

typedef struct iib_pr_point {
  double threshold;
  double precision;
  double recall;
  size_t correct;
  size_t putative;
  size_t correspondences;
  int no_putative;
  int no_correspondences;
} iib_pr_point;

IIB_API iib_status iib_homography_load(const char* path, double h[9]);
IIB_API iib_status iib_homography_save(const char* path, const double h[9]);

/* Precision and recall of `matches` between the keypoints of `ref` and
 * `test`, under homography h (ref -> test) and reprojection radius eps. */
IIB_API iib_status iib_evaluate(const iib_descriptor_set* ref,
                                const iib_descriptor_set* test,
                                const iib_matches* matches, const double h[9],
                                double epsilon, iib_pr_point* out);
/* One point per ascending distance threshold (brute force, mutual). */
IIB_API iib_status iib_pr_sweep(const iib_descriptor_set* ref,
                                const iib_descriptor_set* test,
                                const double h[9], double epsilon,
                                const double* thresholds, size_t count,
                                int workers, iib_pr_point* out);

/* Warped (bilinear, by h) and photometrically transformed copy:
 * clip(255 * (gain * I / 255 + bias)^gamma). */
IIB_API iib_status iib_synth(const iib_image* image, double gain, double bias,
                             double gamma, const double h[9], iib_image** out);

/* ---- selection --------------------------------------------------------- */

typedef struct iib_train_options {
  int rounds;
  size_t target_bits;
  uint64_t seed;
  int grid_cols;
  int grid_rows;
  double epsilon;
  size_t min_positives;
  int workers;
} iib_train_options;

IIB_API void iib_train_options_default(iib_train_options* options);

/* Learns quadruple weights on `count` image pairs (homographies packed as
 * 9 reals each) and keeps the target_bits worth of top-weighted ones. */
IIB_API iib_status iib_train_select(const iib_image* const* refs,
                                    const iib_image* const* tests,
                                    const double* homographies, size_t count,
                                    const iib_config* config,
                                    const iib_train_options* options,
                                    iib_mask** out);
IIB_API size_t iib_mask_bits(const iib_mask* mask);
IIB_API size_t iib_mask_quadruples(const iib_mask* mask);
/* Boosting rounds run and why training stopped (0 / "" for loaded masks). */
IIB_API size_t iib_mask_rounds(const iib_mask* mask);
IIB_API const char* iib_mask_stop_reason(const iib_mask* mask);
IIB_API iib_status iib_mask_save(const iib_mask* mask, const char* path);
IIB_API iib_status iib_mask_load(const char* path, iib_mask** out);
IIB_API void iib_mask_free(iib_mask* mask);

/* ---- benchmark --------------------------------------------------------- */

typedef struct iib_bench_report {
  size_t descriptors;
  size_t bits;
  uint64_t algebraic;        /* bit formulation stage */
  uint64_t relational;       /* bit formulation stage */
  uint64_t patch_algebraic;  /* integral-image lookups */
  double seconds;
  double descriptors_per_second;
} iib_bench_report;

/* An instrumented pass for the operation counts, then a timed pass. */
IIB_API iib_status iib_bench(const iib_channels* channels,
                             const iib_keypoints* kps,
                             const iib_config* config, int workers,
                             iib_bench_report* out);

#ifdef __cplusplus
}
#endif

#endif  /* IIB_IIB_H_ */
