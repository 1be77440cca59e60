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

#include "saff/saff.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "saff/error.hpp"
#include "saff/evaluation.hpp"
#include "saff/pipeline.hpp"
#include "saff/synth.hpp"

struct saff_tensor {
  saff::Tensor tensor;
};

struct saff_result {
  saff::SegmentResult result;
  saff_tensor confidence;
  double binarize_threshold = saff::kDefaultBinarizeThreshold;
};

namespace {

thread_local std::string g_last_error;

template <class Fn>
saff_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    g_last_error.clear();
    return SAFF_OK;
  } catch (const saff::Error& e) {
    g_last_error = e.what();
    return static_cast<saff_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SAFF_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SAFF_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SAFF_E_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw saff::Error(saff::ErrorCode::InvalidArgument, std::string(what) + " is null");
}

saff::RunConfig to_run_config(const saff_config* c) {
  saff::RunConfig rc;
  if (c) {
    rc.slic.k_target = c->k_target;
    rc.slic.compactness = c->compactness;
    rc.slic.iterations = c->iterations;
    rc.w_e = c->w_e;
    rc.th_bg = c->th_bg;
    rc.th_fg = c->th_fg;
    rc.binarize_threshold = c->binarize_threshold;
    rc.balance = c->balance != 0;
  }
  rc.validate();
  return rc;
}

}  // namespace

extern "C" {

const char* saff_version(void) { return "1.0.0"; }

const char* saff_status_tag(saff_status status) {
  if (status == SAFF_OK) return "OK";
  return saff::error_tag(static_cast<saff::ErrorCode>(status));
}

const char* saff_last_error(void) { return g_last_error.c_str(); }

void saff_config_default(saff_config* config) {
  if (!config) return;
  const saff::RunConfig rc;
  config->k_target = rc.slic.k_target;
  config->compactness = rc.slic.compactness;
  config->iterations = rc.slic.iterations;
  config->w_e = rc.w_e;
  config->th_bg = rc.th_bg;
  config->th_fg = rc.th_fg;
  config->binarize_threshold = rc.binarize_threshold;
  config->balance = rc.balance ? 1 : 0;
}

saff_status saff_tensor_create(saff_dtype dtype, uint32_t ndim, const uint32_t* dims,
                               const void* data, saff_tensor** out) {
  return guarded([&] {
    require(dims, "dims");
    require(data, "data");
    require(out, "out");
    *out = nullptr;
    if (ndim < 1 || ndim > 3) throw saff::Error(saff::ErrorCode::Shape, "ndim must be 1..3");
    saff::Tensor::Dims d(dims, dims + ndim);
    std::size_t n = 1;
    for (auto e : d) n *= e;
    saff::Tensor t;
    switch (dtype) {
      case SAFF_REAL32: {
        const auto* p = static_cast<const float*>(data);
        t = saff::Tensor::real32(std::move(d), std::vector<float>(p, p + n));
        break;
      }
      case SAFF_UINT8: {
        const auto* p = static_cast<const std::uint8_t*>(data);
        t = saff::Tensor::uint8(std::move(d), std::vector<std::uint8_t>(p, p + n));
        break;
      }
      case SAFF_UINT32: {
        const auto* p = static_cast<const std::uint32_t*>(data);
        t = saff::Tensor::uint32(std::move(d), std::vector<std::uint32_t>(p, p + n));
        break;
      }
      default:
        throw saff::Error(saff::ErrorCode::InvalidArgument, "unknown dtype");
    }
    *out = new saff_tensor{std::move(t)};
  });
}

saff_status saff_tensor_read(const char* path, saff_tensor** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new saff_tensor{saff::read_tensor(path)};
  });
}

saff_status saff_tensor_write(const saff_tensor* tensor, const char* path) {
  return guarded([&] {
    require(tensor, "tensor");
    require(path, "path");
    saff::write_tensor(tensor->tensor, path);
  });
}

void saff_tensor_free(saff_tensor* tensor) { delete tensor; }

saff_dtype saff_tensor_dtype(const saff_tensor* tensor) {
  return static_cast<saff_dtype>(tensor->tensor.dtype());
}

uint32_t saff_tensor_ndim(const saff_tensor* tensor) {
  return static_cast<uint32_t>(tensor->tensor.rank());
}

uint32_t saff_tensor_dim(const saff_tensor* tensor, uint32_t axis) {
  return axis < tensor->tensor.rank() ? tensor->tensor.dim(axis) : 0;
}

size_t saff_tensor_size(const saff_tensor* tensor) { return tensor->tensor.size(); }

const void* saff_tensor_data(const saff_tensor* tensor) {
  switch (tensor->tensor.dtype()) {
    case saff::DType::Real32: return tensor->tensor.values<float>().data();
    case saff::DType::UInt8: return tensor->tensor.values<std::uint8_t>().data();
    case saff::DType::UInt32: return tensor->tensor.values<std::uint32_t>().data();
  }
  return nullptr;
}

saff_status saff_segment_files(const saff_config* config, const char* image_ppm,
                               const char* semantic_sft, const char* saliency_sft,
                               const char* edge_sft, saff_result** out) {
  return guarded([&] {
    require(image_ppm, "image path");
    require(semantic_sft, "semantic path");
    require(saliency_sft, "saliency path");
    require(edge_sft, "edge path");
    require(out, "out");
    *out = nullptr;
    const auto rc = to_run_config(config);
    const auto image = saff::read_ppm(image_ppm);
    const auto semantic = saff::read_tensor(semantic_sft);
    const auto saliency = saff::read_tensor(saliency_sft);
    const auto edge = saff::read_tensor(edge_sft);
    auto* r = new saff_result;
    try {
      r->result = saff::segment({image, semantic, saliency, edge}, rc);
      r->confidence.tensor = r->result.confidence;
      r->binarize_threshold = rc.binarize_threshold;
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
  });
}

void saff_result_free(saff_result* result) { delete result; }

const saff_tensor* saff_result_confidence(const saff_result* result) {
  return result ? &result->confidence : nullptr;
}

uint32_t saff_result_superpixels(const saff_result* result) {
  return result ? result->result.labeling.count : 0;
}

void saff_result_model(const saff_result* result, double weights[4], double* bias,
                       int* fallback_used) {
  if (!result) return;
  const auto& m = result->result.model;
  if (weights) std::memcpy(weights, m.weights.data(), sizeof(double) * 4);
  if (bias) *bias = m.bias;
  if (fallback_used) *fallback_used = m.fallback_used ? 1 : 0;
}

void saff_result_pseudo_label_counts(const saff_result* result, size_t* foreground,
                                     size_t* background) {
  if (!result) return;
  if (foreground) *foreground = result->result.pseudo_labels.foreground.size();
  if (background) *background = result->result.pseudo_labels.background.size();
}

saff_status saff_result_write_confidence(const saff_result* result, const char* path) {
  return guarded([&] {
    require(result, "result");
    require(path, "path");
    saff::write_tensor(result->result.confidence, path);
  });
}

saff_status saff_result_write_mask(const saff_result* result, const char* path) {
  return guarded([&] {
    require(result, "result");
    require(path, "path");
    saff::write_pgm(saff::binarize(result->result.confidence, result->binarize_threshold), path);
  });
}

saff_status saff_result_dump(const saff_result* result, const char* prefix) {
  return guarded([&] {
    require(result, "result");
    require(prefix, "prefix");
    saff::dump_intermediates(result->result, prefix);
  });
}

saff_status saff_evaluate_dirs(const char* pred_dir, const char* gt_dir, const char* csv_path,
                               double beta_sq, double* max_f, size_t* images) {
  return guarded([&] {
    require(pred_dir, "prediction dir");
    require(gt_dir, "ground-truth dir");
    if (!(beta_sq > 0.0)) throw saff::Error(saff::ErrorCode::InvalidArgument, "beta_sq must be > 0");
    const auto res = saff::evaluate_directories(pred_dir, gt_dir, beta_sq);
    if (csv_path) {
      const auto csv = saff::curve_to_csv(res.curve);
      saff::write_file_atomic(csv_path, std::span(reinterpret_cast<const std::uint8_t*>(csv.data()),
                                                  csv.size()));
    }
    if (max_f) *max_f = res.curve.max_f;
    if (images) *images = res.images;
  });
}

saff_status saff_synth_scene(uint64_t seed, uint32_t height, uint32_t width, uint32_t channels,
                             double noise, double min_fg_fraction, double max_fg_fraction,
                             const char* dir) {
  return guarded([&] {
    require(dir, "dir");
    saff::SynthParams p;
    p.height = height;
    p.width = width;
    p.channels = channels;
    p.noise = noise;
    p.min_fg_fraction = min_fg_fraction;
    p.max_fg_fraction = max_fg_fraction;
    saff::write_scene(saff::generate_scene(seed, p), dir);
  });
}

saff_status saff_baseline_file(saff_baseline mode, const char* feature_sft, const char* out_sft) {
  return guarded([&] {
    require(feature_sft, "feature path");
    require(out_sft, "output path");
    const auto features = saff::read_tensor(feature_sft);
    switch (mode) {
      case SAFF_BASELINE_SEMANTIC:
        saff::write_tensor(saff::semantic_baseline(features), out_sft);
        break;
      case SAFF_BASELINE_SALIENCY:
        saff::write_tensor(saff::saliency_baseline(features), out_sft);
        break;
      default:
        throw saff::Error(saff::ErrorCode::InvalidArgument, "unknown baseline mode");
    }
  });
}

}  // extern "C"
