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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "saff/encoding.hpp"
#include "saff/evaluation.hpp"
#include "saff/fusion.hpp"
#include "saff/pnm.hpp"
#include "saff/superpixel.hpp"
#include "saff/tensor_io.hpp"

namespace saff {

inline constexpr double kDefaultEdgeWeight = 3.5;

struct RunConfig {
  SlicParams slic;
  double w_e = kDefaultEdgeWeight;
  double th_bg = kDefaultBackgroundThreshold;
  double th_fg = kDefaultForegroundThreshold;
  double binarize_threshold = kDefaultBinarizeThreshold;
  bool balance = true;
  bool dump_intermediates = false;
  std::uint64_t seed = 0;

  // Throws Error(InvalidArgument) on inconsistent settings.
  void validate() const;
};

struct SegmentInputs {
  const ImageRGB& image;
  const Tensor& semantic;  // HxWxD or HxW at any resolution; resampled as needed
  const Tensor& saliency;  // HxW at image resolution
  const Tensor& edge;      // HxW at image resolution
};

struct SegmentResult {
  SuperpixelLabeling labeling;
  EncodedFeatures features;
  PseudoLabelSet pseudo_labels;
  FusionModel model;
  Eigen::VectorXd scores;
  Tensor confidence;  // HxW real32 in [0,1]
};

/// Superpixels -> feature encoding -> adaptive weights -> confidence map.
SegmentResult segment(const SegmentInputs& inputs, const RunConfig& config);

std::string model_to_json(const FusionModel& model);

/// Writes <prefix>.<name>.sft for the labeling, feature table and affinity
/// matrices, plus <prefix>.model.json.
void dump_intermediates(const SegmentResult& result, const std::filesystem::path& prefix);

struct EvaluationResult {
  PrCurve curve;
  std::size_t images = 0;    // images contributing to the curve
  std::size_t excluded = 0;  // images skipped for an empty ground truth
};

/// Quantizes each map and aggregates PR curves; empty-gt images are skipped.
EvaluationResult evaluate_maps(std::span<const Tensor> confidence, std::span<const Tensor> gt,
                               double beta_sq = kDefaultBetaSquared);

/// Pairs <pred_dir>/<stem>.sft with <gt_dir>/<stem>.pgm or
/// <gt_dir>/<stem>/gt.pgm. Throws Error(Unmatched) for an empty prediction
/// directory or a prediction without ground truth.
EvaluationResult evaluate_directories(const std::filesystem::path& pred_dir,
                                      const std::filesystem::path& gt_dir,
                                      double beta_sq = kDefaultBetaSquared);

}  // namespace saff
