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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "saff/tensor_io.hpp"

namespace saff {

inline constexpr double kDefaultBetaSquared = 0.3;
inline constexpr int kThresholdCount = 256;

/// round-half-up(value * 255) for an HxW real32 map in [0,1].
Tensor quantize(const Tensor& confidence);

struct PrecisionRecall {
  double precision = 1.0;
  double recall = 0.0;
};

using PrPoints = std::array<PrecisionRecall, kThresholdCount>;

/// Per-threshold precision/recall of pixels >= t against a binary gt
/// (nonzero = foreground). Empty predictions have precision 1. Throws
/// Error(Empty) when gt has no foreground pixels.
PrPoints pr_at_thresholds(const Tensor& quantized, const Tensor& gt);

double f_measure(double precision, double recall, double beta_sq = kDefaultBetaSquared);

struct PrCurve {
  PrPoints points;
  std::array<double, kThresholdCount> f{};
  double max_f = 0.0;
  int best_threshold = 0;
};

/// Mean precision and mean recall per threshold across images, F on the
/// means. Throws Error(Empty) for an empty input.
PrCurve aggregate(std::span<const PrPoints> per_image, double beta_sq = kDefaultBetaSquared);

/// "threshold,precision,recall,f_measure" header, 256 rows, then
/// "max_f,<value>".
std::string curve_to_csv(const PrCurve& curve);

}  // namespace saff
