// Copyright 2026 The SAFF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the SAFF foreground segmentation library.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns a saff_status;
 * on failure saff_last_error() holds a message for the calling thread. */
#ifndef SAFF_SAFF_H
#define SAFF_SAFF_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SAFF_BUILDING_LIBRARY)
#    define SAFF_API __declspec(dllexport)
#  else
#    define SAFF_API __declspec(dllimport)
#  endif
#else
#  define SAFF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum saff_status {
  SAFF_OK = 0,
  SAFF_E_IO = 1,
  SAFF_E_BAD_MAGIC = 2,
  SAFF_E_TRUNCATED = 3,
  SAFF_E_DIM_OVERFLOW = 4,
  SAFF_E_NONFINITE = 5,
  SAFF_E_FORMAT = 6,
  SAFF_E_SHAPE = 7,
  SAFF_E_INVALID_ARG = 8,
  SAFF_E_UNMATCHED = 9,
  SAFF_E_EMPTY = 10,
  SAFF_E_INTERNAL = 11
} saff_status;

typedef enum saff_dtype { SAFF_REAL32 = 0, SAFF_UINT8 = 1, SAFF_UINT32 = 2 } saff_dtype;

typedef enum saff_baseline { SAFF_BASELINE_SEMANTIC = 0, SAFF_BASELINE_SALIENCY = 1 } saff_baseline;

typedef struct saff_tensor saff_tensor;
typedef struct saff_result saff_result;

typedef struct saff_config {
  uint32_t k_target;         /* superpixel count target, default 256 */
  double compactness;        /* SLIC compactness, default 10 */
  uint32_t iterations;       /* SLIC iterations, default 10 */
  double w_e;                /* edge weight in exp(-w_e * E), default 3.5 */
  double th_bg;              /* background prior threshold, default 0.2 */
  double th_fg;              /* foreground prior threshold, default 0.6 */
  double binarize_threshold; /* pseudo-label mask threshold, default 0.5 */
  int balance;               /* nonzero: weight classes equally, default 1 */
} saff_config;

SAFF_API const char* saff_version(void);
SAFF_API const char* saff_status_tag(saff_status status);
SAFF_API const char* saff_last_error(void);
SAFF_API void saff_config_default(saff_config* config);

/* Tensors. `data` is copied; its element type must match dtype. */
SAFF_API saff_status saff_tensor_create(saff_dtype dtype, uint32_t ndim, const uint32_t* dims,
                                        const void* data, saff_tensor** out);
SAFF_API saff_status saff_tensor_read(const char* path, saff_tensor** out);
SAFF_API saff_status saff_tensor_write(const saff_tensor* tensor, const char* path);
SAFF_API void saff_tensor_free(saff_tensor* tensor);
SAFF_API saff_dtype saff_tensor_dtype(const saff_tensor* tensor);
SAFF_API uint32_t saff_tensor_ndim(const saff_tensor* tensor);
SAFF_API uint32_t saff_tensor_dim(const saff_tensor* tensor, uint32_t axis);
SAFF_API size_t saff_tensor_size(const saff_tensor* tensor);
SAFF_API const void* saff_tensor_data(const saff_tensor* tensor);

/* Segmentation of one image from its feature files. */
SAFF_API saff_status saff_segment_files(const saff_config* config, const char* image_ppm,
                                        const char* semantic_sft, const char* saliency_sft,
                                        const char* edge_sft, saff_result** out);
SAFF_API void saff_result_free(saff_result* result);
/* Borrowed HxW real32 confidence map, valid until saff_result_free. */
SAFF_API const saff_tensor* saff_result_confidence(const saff_result* result);
SAFF_API uint32_t saff_result_superpixels(const saff_result* result);
SAFF_API void saff_result_model(const saff_result* result, double weights[4], double* bias,
                                int* fallback_used);
SAFF_API void saff_result_pseudo_label_counts(const saff_result* result, size_t* foreground,
                                              size_t* background);
SAFF_API saff_status saff_result_write_confidence(const saff_result* result, const char* path);
/* Binarized confidence (0/255 P5) at the config's binarize threshold. */
SAFF_API saff_status saff_result_write_mask(const saff_result* result, const char* path);
/* <prefix>.{labels,features,Ms,Ma,Ms_norm,Ma_norm,E}.sft and <prefix>.model.json */
SAFF_API saff_status saff_result_dump(const saff_result* result, const char* prefix);

/* Dataset evaluation: writes the PR/F CSV when csv_path is non-null. */
SAFF_API saff_status saff_evaluate_dirs(const char* pred_dir, const char* gt_dir,
                                        const char* csv_path, double beta_sq, double* max_f,
                                        size_t* images);

/* Synthetic scene into `dir` (image.ppm, gt.pgm, semantic/saliency/edge.sft). */
SAFF_API saff_status saff_synth_scene(uint64_t seed, uint32_t height, uint32_t width,
                                      uint32_t channels, double noise, double min_fg_fraction,
                                      double max_fg_fraction, const char* dir);
/* Baseline confidence map from a semantic (HxWxD) or saliency (HxW) file. */
SAFF_API saff_status saff_baseline_file(saff_baseline mode, const char* feature_sft,
                                        const char* out_sft);

#ifdef __cplusplus
}
#endif

#endif /* SAFF_SAFF_H */
